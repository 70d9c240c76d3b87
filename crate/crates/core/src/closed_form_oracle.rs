//! Closed-form ranks and summand catalogs for star and generalized H graphs.
//!
//! Regions are written with the closed inequalities of the rank tables; the
//! functions still refuse points on a critical line, where the chamber
//! description is ambiguous.

use serde::Serialize;

use crate::decomposer::ClassKind;
use crate::error::{Error, Result};
use crate::param_chambers::ChamberArrangement;
use crate::rational::{qi, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GraphKind {
    /// `Star_k`, with `k = 3` the Y graph.
    Star(usize),
    /// Generalized H graph with hubs of degree `m` and `n`.
    H(usize, usize),
}

impl GraphKind {
    /// Offsets `c` of the lines `r = c` and `r = L + c` bounding the regions.
    fn walls(&self) -> (&'static [i64], &'static [i64]) {
        match self {
            GraphKind::Star(_) => (&[1, 2], &[0, 1]),
            GraphKind::H(..) => (&[1, 2], &[0, 1, 2]),
        }
    }

    pub fn check_off_walls(&self, r: &Q, l: &Q) -> Result<()> {
        if *r <= qi(0) || *l <= qi(0) {
            return Err(Error::InvalidArgument("r and L must be positive".into()));
        }
        let (fixed, shifted) = self.walls();
        if fixed.iter().any(|&c| *r == qi(c)) || shifted.iter().any(|&c| *r == l + qi(c)) {
            return Err(Error::OnWall);
        }
        Ok(())
    }
}

fn u(x: i64) -> usize {
    usize::try_from(x).expect("nonnegative rank")
}

/// `(h0, h1)` of the Y graph with `e1` of length `L`.
pub fn rank_y(r: &Q, l: &Q) -> Result<(usize, usize)> {
    GraphKind::Star(3).check_off_walls(r, l)?;
    let (one, two) = (qi(1), qi(2));
    let below_l = r <= l;
    let band = !below_l && *r <= l + &one;
    Ok(if *r <= one {
        if below_l {
            (1, 1)
        } else {
            (2, 0)
        }
    } else if *r <= two {
        if below_l {
            (4, 0)
        } else if band {
            (6, 0)
        } else {
            (2, 0)
        }
    } else if below_l {
        (2, 0)
    } else if band {
        (4, 0)
    } else {
        (0, 0)
    })
}

/// `(h0, h1)` of `Star_k`; `k = 3` is the Y graph.
pub fn rank_star(k: usize, r: &Q, l: &Q) -> Result<(usize, usize)> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("star needs k >= 3, got {k}")));
    }
    if k == 3 {
        return rank_y(r, l);
    }
    GraphKind::Star(k).check_off_walls(r, l)?;
    let k = k as i64;
    let (one, two) = (qi(1), qi(2));
    let below_l = r <= l;
    let band = !below_l && *r <= l + &one;
    let h0 = if *r <= one {
        1
    } else if *r <= two {
        if below_l {
            k * k - 3 * k + 4
        } else if band {
            k * k - k
        } else {
            k * k - 3 * k + 2
        }
    } else if below_l {
        2
    } else if band {
        2 * k - 2
    } else {
        0
    };
    let h1 = if *r <= one && below_l {
        k * k - 3 * k + 1
    } else if *r <= one && band {
        k * k - 5 * k + 5
    } else {
        0
    };
    Ok((u(h0), u(h1)))
}

/// `(h0, h1)` of `Star_k` with all edges of length 1.
pub fn rank_star_equal_length(k: usize, r: &Q) -> Result<(usize, usize)> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("star needs k >= 3, got {k}")));
    }
    if *r <= qi(0) {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    if *r == qi(1) || *r == qi(2) {
        return Err(Error::OnWall);
    }
    Ok(if *r < qi(1) {
        (1, k * (k - 3) + 1)
    } else if *r < qi(2) {
        (k * k - k, 0)
    } else {
        (0, 0)
    })
}

/// `(h0, h1)` of the generalized H graph with hub degrees `m`, `n` and bridge `L`.
pub fn rank_h(m: usize, n: usize, r: &Q, l: &Q) -> Result<(usize, usize)> {
    if m < 3 || n < 3 {
        return Err(Error::InvalidArgument(format!("generalized H needs m, n >= 3, got ({m}, {n})")));
    }
    GraphKind::H(m, n).check_off_walls(r, l)?;
    let (m, n) = (m as i64, n as i64);
    let (one, two) = (qi(1), qi(2));
    let h0 = if *r <= one {
        1
    } else if *r <= two {
        if *r <= l + &one {
            m * (m - 3) + n * (n - 3) + 6
        } else {
            (m + n) * (m + n - 5) + 6
        }
    } else if *r <= l + &one {
        2
    } else if *r <= l + &two {
        2 * (m - 1) * (n - 1)
    } else {
        0
    };
    let h1 = if *r <= one && r <= l {
        m * (m - 3) + n * (n - 3) + 3
    } else if *r <= one {
        (m + n) * (m + n - 7) + 11
    } else if r > l && *r <= l + &one {
        2 * (m - 2) * (n - 2)
    } else {
        0
    };
    Ok((u(h0), u(h1)))
}

/// The H graph with two leaves per hub, as its own table.
pub fn rank_h_base(r: &Q, l: &Q) -> Result<(usize, usize)> {
    GraphKind::H(3, 3).check_off_walls(r, l)?;
    let (one, two) = (qi(1), qi(2));
    let h0 = if *r <= one {
        1
    } else if *r <= two {
        if *r <= l + &one {
            6
        } else {
            12
        }
    } else if *r <= l + &one {
        2
    } else if *r <= l + &two {
        8
    } else {
        0
    };
    let h1 = if *r <= one && r <= l {
        3
    } else if *r <= one {
        5
    } else if r > l && *r <= l + &one {
        2
    } else {
        0
    };
    Ok((h0, h1))
}

pub fn rank_table(kind: GraphKind, r: &Q, l: &Q) -> Result<(usize, usize)> {
    match kind {
        GraphKind::Star(k) => rank_star(k, r, l),
        GraphKind::H(m, n) => rank_h(m, n, r, l),
    }
}

/// Which module a catalog describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CatalogKind {
    Ph0(GraphKind),
    Ph1(GraphKind),
}

type Fiber = Box<dyn Fn(&Q, &Q) -> usize + Send + Sync>;

/// One isomorphism class: its fiber dimension as a function of `(r, L)`.
pub struct CatalogEntry {
    pub name: &'static str,
    pub interval: bool,
    /// `None` where the closed form leaves the count open.
    pub multiplicity: Option<usize>,
    fiber: Fiber,
}

impl CatalogEntry {
    pub fn fiber(&self, r: &Q, l: &Q) -> usize {
        (self.fiber)(r, l)
    }

    /// `(chamber id, dimension)` at the chamber samples, nonzero only.
    pub fn dims_on(&self, arr: &ChamberArrangement) -> Vec<(usize, usize)> {
        arr.chambers
            .iter()
            .map(|c| (c.id, self.fiber(&c.sample.r, &c.sample.l)))
            .filter(|&(_, d)| d > 0)
            .collect()
    }
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("interval", &self.interval)
            .field("multiplicity", &self.multiplicity)
            .finish()
    }
}

#[derive(Debug)]
pub struct SummandCatalog {
    pub kind: CatalogKind,
    pub entries: Vec<CatalogEntry>,
    /// Whether every indecomposable is an interval module.
    pub interval_decomposable: bool,
}

impl SummandCatalog {
    /// Whether all multiplicities are given.
    pub fn is_complete(&self) -> bool {
        !self.entries.is_empty() && self.entries.iter().all(|e| e.multiplicity.is_some())
    }

    /// Classes in the decomposer's descriptor form, sorted; `None` if a multiplicity is open.
    pub fn class_table(&self, arr: &ChamberArrangement) -> Option<Vec<(ClassKind, usize)>> {
        let mut out = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let dims = e.dims_on(arr);
            let kind = if e.interval {
                ClassKind::Interval { support: dims.iter().map(|&(c, _)| c).collect() }
            } else {
                ClassKind::NonInterval { dims }
            };
            out.push((kind, e.multiplicity?));
        }
        out.sort();
        Some(out)
    }

    /// `sum_entries multiplicity * fiber` at `(r, L)`; `None` if incomplete.
    pub fn mass(&self, r: &Q, l: &Q) -> Option<usize> {
        self.entries.iter().map(|e| e.multiplicity.map(|m| m * e.fiber(r, l))).sum()
    }
}

fn interval(name: &'static str, multiplicity: Option<usize>, region: impl Fn(&Q, &Q) -> bool + Send + Sync + 'static) -> CatalogEntry {
    CatalogEntry { name, interval: true, multiplicity, fiber: Box::new(move |r, l| usize::from(region(r, l))) }
}

/// Fibers `[r <= 1, 1 < r <= 2, 2 < r]` by rows `[r <= L, L < r <= L+1, L+1 < r]`.
fn grid(rows: [[usize; 3]; 3]) -> Fiber {
    Box::new(move |r, l| {
        let col = if *r <= qi(1) {
            0
        } else if *r <= qi(2) {
            1
        } else {
            2
        };
        let row = if r <= l {
            0
        } else if *r <= l + qi(1) {
            1
        } else {
            2
        };
        rows[row][col]
    })
}

fn m1_entry() -> CatalogEntry {
    CatalogEntry { name: "M1", interval: false, multiplicity: Some(1), fiber: grid([[1, 2, 1], [1, 2, 1], [0, 1, 0]]) }
}

/// The indecomposable summands predicted in closed form.
pub fn expected_summands(kind: CatalogKind) -> Result<SummandCatalog> {
    let one = || qi(1);
    let two = || qi(2);
    let entries = match kind {
        CatalogKind::Ph0(GraphKind::Star(3)) => vec![
            m1_entry(),
            interval("M2", Some(1), move |r, l| *r > one() && *r <= l + one()),
            interval("E", Some(2), move |r, l| *r > one() && r > l && *r <= l + one()),
            interval("F", Some(1), move |r, l| (*r > one() && *r <= two()) || (*r <= one() && r > l)),
        ],
        CatalogKind::Ph0(GraphKind::Star(k)) if k >= 4 => vec![
            m1_entry(),
            interval("M2", Some(1), move |r, l| *r > one() && *r <= l + one()),
            interval("E", Some(2 * k - 4), move |r, l| *r > one() && r > l && *r <= l + one()),
            interval("F", Some(k * k - 3 * k + 1), move |r, _| *r > one() && *r <= two()),
        ],
        CatalogKind::Ph1(GraphKind::Star(3)) => vec![interval("N", Some(1), move |r, l| *r <= one() && r <= l)],
        CatalogKind::Ph1(GraphKind::Star(k)) if k >= 4 => vec![
            interval("N'1", None, move |r, l| *r <= one() && r <= l),
            interval("N'2", None, move |r, l| *r <= one() && r > l),
            interval("N'3", None, move |r, _| *r <= one()),
        ],
        CatalogKind::Ph0(GraphKind::H(m, n)) if m >= 3 && n >= 3 => vec![
            interval("N1", Some(1), move |r, l| *r <= l + two()),
            interval("N2", Some(1), move |r, l| *r > one() && *r <= l + two()),
            interval("E", Some((m - 1) * (m - 2) + (n - 1) * (n - 2)), move |r, _| *r > one() && *r <= two()),
            interval("F", Some(2 * m * n - 2 * m - 2 * n), move |r, l| *r > one() && *r > l + one() && *r <= l + two()),
        ],
        CatalogKind::Ph1(GraphKind::H(m, n)) if m >= 3 && n >= 3 => Vec::new(),
        other => return Err(Error::Unsupported(format!("no catalog for {other:?}"))),
    };
    Ok(SummandCatalog { kind, entries, interval_decomposable: !matches!(kind, CatalogKind::Ph0(GraphKind::Star(_))) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn table_examples() {
        assert_eq!(rank_star(4, &q(3, 2), &qi(3)).unwrap(), (8, 0));
        assert_eq!(rank_star(4, &q(1, 2), &qi(2)).unwrap(), (1, 5));
        assert_eq!(rank_star(3, &q(1, 2), &qi(1)).unwrap(), (1, 1));
        assert_eq!(rank_h(3, 3, &q(5, 2), &qi(1)).unwrap(), (8, 0));
        assert_eq!(rank_h(4, 3, &q(1, 2), &qi(1)).unwrap(), (1, 7));
        assert_eq!(rank_h(3, 3, &q(3, 2), &q(1, 4)).unwrap(), (12, 0));
    }

    #[test]
    fn walls_are_rejected() {
        assert_eq!(rank_star(4, &qi(1), &qi(3)), Err(Error::OnWall));
        assert_eq!(rank_star(4, &qi(3), &qi(2)), Err(Error::OnWall));
        assert_eq!(rank_h(3, 3, &q(5, 2), &q(1, 2)), Err(Error::OnWall));
        assert!(matches!(rank_star(4, &qi(0), &qi(1)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn star_catalog_masses() {
        let c = expected_summands(CatalogKind::Ph0(GraphKind::Star(5))).unwrap();
        let m: Vec<usize> = c.entries.iter().map(|e| e.multiplicity.unwrap()).collect();
        assert_eq!(m, vec![1, 1, 6, 11]);
        assert!(!c.interval_decomposable);
        assert!(!expected_summands(CatalogKind::Ph1(GraphKind::Star(4))).unwrap().is_complete());
    }

    #[test]
    fn unsupported_catalogs() {
        assert!(matches!(expected_summands(CatalogKind::Ph0(GraphKind::Star(2))), Err(Error::Unsupported(_))));
    }
}
