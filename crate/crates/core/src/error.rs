use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("edge {0} has a non-positive length")]
    NonPositiveLength(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("point not on graph: {0}")]
    PointNotOnGraph(String),
    #[error("ill-glued complex: {0}")]
    IllGlued(String),
    #[error("parameters not comparable: {0}")]
    NotComparable(String),
    #[error("parameter point lies on a critical line")]
    OnWall,
    #[error("wall orientation is ambiguous for line {0}")]
    AmbiguousWall(String),
    #[error("commutativity violation: {0}")]
    CommutativityViolation(String),
    #[error("integral homology has torsion: {0}")]
    TorsionDetected(String),
    #[error("indecomposability undecided for a piece of total dimension {0} after {1} attempts")]
    IndecomposabilityUndecided(usize, usize),
    #[error("not a cover: {0}")]
    NotACover(String),
    #[error("E2 page has entries in columns p >= 2")]
    ColumnsOutOfRange,
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
