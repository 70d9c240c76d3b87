//! Persistence modules over the chamber poset.
//!
//! A chamber carries the homology at its sample point; a wall carries the map
//! induced between two points straddling it. Those points give the same
//! chain complex as the samples of their chambers (checked), so the map is
//! expressed in the chambers' own bases.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp::Mat;
use crate::homology::betti;
use crate::homology::induced::{induced_between, Built};
use crate::metric_graph::{MetricGraph, ParamPoint};
use crate::param_chambers::{graph_arrangement, ChamberArrangement};
use crate::rational::fmt_q;

/// The ambient order: `reach[a][b]` iff `a <= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    pub n: usize,
    pub reach: Vec<Vec<bool>>,
    pub labels: Vec<String>,
}

impl Poset {
    pub fn from_arrows(n: usize, arrows: &[(usize, usize)], labels: Vec<String>) -> Poset {
        let mut reach = vec![vec![false; n]; n];
        for (v, row) in reach.iter_mut().enumerate() {
            row[v] = true;
        }
        let mut changed = true;
        for &(a, b) in arrows {
            reach[a][b] = true;
        }
        while changed {
            changed = false;
            for a in 0..n {
                for m in 0..n {
                    if a != m && reach[a][m] {
                        for b in 0..n {
                            if reach[m][b] && !reach[a][b] {
                                reach[a][b] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        Poset { n, reach, labels }
    }

    pub fn from_arrangement(arr: &ChamberArrangement) -> Poset {
        let labels = arr.chambers.iter().map(|c| format!("({}, {})", fmt_q(&c.sample.r), fmt_q(&c.sample.l))).collect();
        Poset { n: arr.len(), reach: arr.reachability(), labels }
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.reach[a][b]
    }
}

/// A representation of a finite poset: spaces on `nodes`, maps on `arrows`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PersistenceModule {
    pub prime: u32,
    pub degree: usize,
    pub poset: Poset,
    /// Ambient element of each node.
    pub nodes: Vec<usize>,
    pub dims: Vec<usize>,
    /// `(source, target)` node indices.
    pub arrows: Vec<(usize, usize)>,
    /// `dims[target] x dims[source]`.
    pub maps: Vec<Mat>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FunctorialityReport {
    pub pairs_checked: usize,
    pub paths_compared: usize,
    pub violations: Vec<String>,
}

impl FunctorialityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Both degrees at once, sharing the complexes.
pub struct ChamberModules {
    pub arrangement: ChamberArrangement,
    pub betti: Vec<[usize; 3]>,
    pub modules: Vec<PersistenceModule>,
}

fn same_complex(a: &Built, b: &Built) -> bool {
    a.cc == b.cc
}

/// Builds the modules in the requested degrees over the chamber poset of `g`.
pub fn build_modules(g: &MetricGraph, degrees: &[usize], prime: u32) -> Result<ChamberModules> {
    let arr = graph_arrangement(g)?;
    let mut samples = Vec::with_capacity(arr.len());
    let mut bettis = Vec::with_capacity(arr.len());
    for c in &arr.chambers {
        let b = Built::new(g, &c.sample, prime)?;
        let h = betti(&b.cc);
        if !h.torsion_free() {
            return Err(Error::TorsionDetected(format!(
                "at ({}, {}): {:?}",
                fmt_q(&c.sample.r),
                fmt_q(&c.sample.l),
                h.torsion
            )));
        }
        let fp = [b.basis.dim(0), b.basis.dim(1)];
        if fp != [h.betti[0], h.betti[1]] {
            return Err(Error::TorsionDetected("prime-field rank differs from integral rank".into()));
        }
        bettis.push(h.betti);
        samples.push(b);
    }
    let poset = Poset::from_arrangement(&arr);
    let mut maps: Vec<Vec<Mat>> = vec![Vec::new(); degrees.len()];
    for w in &arr.walls {
        let a = Built::new(g, &w.source_point, prime)?;
        let b = Built::new(g, &w.target_point, prime)?;
        if !same_complex(&a, &samples[w.source]) || !same_complex(&b, &samples[w.target]) {
            return Err(Error::IllGlued(format!("cell structure changes inside a chamber near wall {}", arr.lines[w.line])));
        }
        for (k, &d) in degrees.iter().enumerate() {
            let m = induced_between(g, &a, &b, d, prime)?;
            let (ds, dt) = (samples[w.source].basis.dim(d), samples[w.target].basis.dim(d));
            debug_assert_eq!((m.rows, m.cols), (dt, ds));
            maps[k].push(m);
        }
    }
    let arrows: Vec<(usize, usize)> = arr.walls.iter().map(|w| (w.source, w.target)).collect();
    let modules = degrees
        .iter()
        .zip(maps)
        .map(|(&d, maps)| PersistenceModule {
            prime,
            degree: d,
            poset: poset.clone(),
            nodes: (0..arr.len()).collect(),
            dims: samples.iter().map(|s| s.basis.dim(d)).collect(),
            arrows: arrows.clone(),
            maps,
        })
        .collect();
    Ok(ChamberModules { arrangement: arr, betti: bettis, modules })
}

/// `PH_degree` of `g` as a chamber-poset module; commutativity is verified.
pub fn build_module(g: &MetricGraph, degree: usize, prime: u32) -> Result<PersistenceModule> {
    let mut cm = build_modules(g, &[degree], prime)?;
    let m = cm.modules.pop().expect("one module");
    let rep = check_functoriality(&m);
    if let Some(v) = rep.violations.first() {
        return Err(Error::CommutativityViolation(v.clone()));
    }
    Ok(m)
}

impl PersistenceModule {
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn node_of(&self, ambient: usize) -> Option<usize> {
        self.nodes.iter().position(|&x| x == ambient)
    }

    /// Checks shapes and returns an error naming the first mismatch.
    pub fn validate(&self) -> Result<()> {
        if self.arrows.len() != self.maps.len() || self.nodes.len() != self.dims.len() {
            return Err(Error::InvalidArgument("module has inconsistent sizes".into()));
        }
        for (k, (&(s, t), m)) in self.arrows.iter().zip(&self.maps).enumerate() {
            if (m.rows, m.cols) != (self.dims[t], self.dims[s]) {
                return Err(Error::InvalidArgument(format!("map {k} has shape {}x{}", m.rows, m.cols)));
            }
            if !self.poset.leq(self.nodes[s], self.nodes[t]) {
                return Err(Error::InvalidArgument(format!("arrow {k} goes against the order")));
            }
        }
        Ok(())
    }

    fn out_arrows(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (k, &(s, _)) in self.arrows.iter().enumerate() {
            out[s].push(k);
        }
        out
    }

    /// Composite along the least arrow path from node `a` to node `b`.
    pub fn map_between(&self, a: usize, b: usize) -> Option<Mat> {
        if a == b {
            return Some(Mat::identity(self.dims[a]));
        }
        let out = self.out_arrows();
        let mut prev: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            for &k in &out[v] {
                let t = self.arrows[k].1;
                if !seen[t] {
                    seen[t] = true;
                    prev[t] = Some(k);
                    queue.push_back(t);
                }
            }
        }
        if !seen[b] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = b;
        while v != a {
            let k = prev[v].unwrap();
            path.push(k);
            v = self.arrows[k].0;
        }
        let mut m = Mat::identity(self.dims[a]);
        for &k in path.iter().rev() {
            m = self.maps[k].mul(&m, self.prime);
        }
        Some(m)
    }
}

/// Compares composites of all arrow paths of length at most three with equal ends.
pub fn check_functoriality(m: &PersistenceModule) -> FunctorialityReport {
    let out = m.out_arrows();
    let mut by_ends: BTreeMap<(usize, usize), Vec<(Vec<usize>, Mat)>> = BTreeMap::new();
    for start in 0..m.nodes.len() {
        let mut frontier: Vec<(usize, Vec<usize>, Mat)> = vec![(start, Vec::new(), Mat::identity(m.dims[start]))];
        for _ in 0..3 {
            let mut next = Vec::new();
            for (v, path, mat) in &frontier {
                for &k in &out[*v] {
                    let t = m.arrows[k].1;
                    let mut p = path.clone();
                    p.push(k);
                    let comp = m.maps[k].mul(mat, m.prime);
                    by_ends.entry((start, t)).or_default().push((p.clone(), comp.clone()));
                    next.push((t, p, comp));
                }
            }
            frontier = next;
        }
    }
    let mut rep = FunctorialityReport::default();
    for ((a, b), paths) in &by_ends {
        rep.pairs_checked += 1;
        rep.paths_compared += paths.len();
        let first = &paths[0];
        for other in &paths[1..] {
            if other.1 != first.1 {
                rep.violations.push(format!(
                    "nodes {} -> {}: arrow paths {:?} and {:?} disagree",
                    m.nodes[*a], m.nodes[*b], first.0, other.0
                ));
            }
        }
    }
    rep
}

/// Restriction to the nodes with nonzero fibers. Arrows become the covering
/// pairs of the induced suborder, carrying composite maps.
pub fn restrict_support(m: &PersistenceModule) -> PersistenceModule {
    let keep: Vec<usize> = (0..m.nodes.len()).filter(|&v| m.dims[v] > 0).collect();
    let leq = |a: usize, b: usize| m.poset.leq(m.nodes[a], m.nodes[b]);
    let mut arrows = Vec::new();
    let mut maps = Vec::new();
    for (i, &a) in keep.iter().enumerate() {
        for (j, &b) in keep.iter().enumerate() {
            if a == b || !leq(a, b) {
                continue;
            }
            let covered = keep.iter().any(|&c| c != a && c != b && leq(a, c) && leq(c, b));
            if covered {
                continue;
            }
            arrows.push((i, j));
            maps.push(m.map_between(a, b).unwrap_or_else(|| Mat::zeros(m.dims[b], m.dims[a])));
        }
    }
    PersistenceModule {
        prime: m.prime,
        degree: m.degree,
        poset: m.poset.clone(),
        nodes: keep.iter().map(|&v| m.nodes[v]).collect(),
        dims: keep.iter().map(|&v| m.dims[v]).collect(),
        arrows,
        maps,
    }
}

/// Sample point of each node, for reporting.
pub fn node_samples(m: &PersistenceModule, arr: &ChamberArrangement) -> Vec<ParamPoint> {
    m.nodes.iter().map(|&c| arr.chambers[c].sample.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::DEFAULT_PRIME;
    use crate::rational::qi;

    fn chain3(maps: Vec<Mat>) -> PersistenceModule {
        let poset = Poset::from_arrows(3, &[(0, 1), (1, 2)], vec!["a".into(), "b".into(), "c".into()]);
        PersistenceModule {
            prime: DEFAULT_PRIME,
            degree: 0,
            poset,
            nodes: vec![0, 1, 2],
            dims: vec![1, 1, 1],
            arrows: vec![(0, 1), (1, 2)],
            maps,
        }
    }

    #[test]
    fn identity_module_passes() {
        let m = chain3(vec![Mat::identity(1), Mat::identity(1)]);
        m.validate().unwrap();
        assert!(check_functoriality(&m).passed());
    }

    #[test]
    fn corrupted_square_is_reported() {
        let poset = Poset::from_arrows(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], vec![String::new(); 4]);
        let one = Mat::identity(1);
        let mut m = PersistenceModule {
            prime: DEFAULT_PRIME,
            degree: 0,
            poset,
            nodes: vec![0, 1, 2, 3],
            dims: vec![1; 4],
            arrows: vec![(0, 1), (0, 2), (1, 3), (2, 3)],
            maps: vec![one.clone(); 4],
        };
        assert!(check_functoriality(&m).passed());
        m.maps[3] = Mat::from_rows(&[vec![2]], 1);
        assert_eq!(check_functoriality(&m).violations.len(), 1);
    }

    #[test]
    fn zero_module_restricts_to_nothing() {
        let mut m = chain3(vec![Mat::zeros(0, 0), Mat::zeros(0, 0)]);
        m.dims = vec![0, 0, 0];
        let r = restrict_support(&m);
        assert!(r.nodes.is_empty() && r.arrows.is_empty());
    }

    #[test]
    fn y_module_h1() {
        let y = MetricGraph::star(3, qi(1)).unwrap();
        let m = build_module(&y, 1, DEFAULT_PRIME).unwrap();
        let s = restrict_support(&m);
        assert_eq!(s.dims, vec![1]);
    }
}
