//! Exact two-parameter persistent homology of second configuration spaces of metric trees.

pub mod closed_form_oracle;
pub mod config_complex;
pub mod decomposer;
pub mod error;
pub mod fp;
pub mod mayer_vietoris;
pub mod homology;
pub mod metric_graph;
pub mod param_chambers;
pub mod persistence_module;
pub mod rational;

pub use error::{Error, Result};
