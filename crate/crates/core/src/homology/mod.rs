//! Integral and prime-field homology of the cellular chain complexes, with
//! deterministic bases for `H_0` and `H_1`.
//!
//! `H_0` classes are represented by the least 0-cell of each component.
//! `H_1` classes are fundamental cycles of a spanning forest built in 1-cell
//! order, kept greedily while independent modulo boundaries. Cell order is
//! combinatorial, so inside a chamber the bases do not depend on the sample point.

pub mod induced;
pub mod snf;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::config_complex::ChainComplex;
use crate::fp::{self, Reducer, SparseCol};

pub use induced::induced_map;
pub use snf::{invariant_factors, smith_normal_form, verify_snf, SnfResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub betti: [usize; 3],
    /// Invariant factors greater than one, per degree.
    pub torsion: [Vec<String>; 3],
}

impl HomologySummary {
    pub fn torsion_free(&self) -> bool {
        self.torsion.iter().all(|t| t.is_empty())
    }
}

/// Integral homology via Smith normal form.
pub fn betti(c: &ChainComplex) -> HomologySummary {
    let f1 = invariant_factors(&c.d1, c.n[0]);
    let f2 = invariant_factors(&c.d2, c.n[1]);
    let (r1, r2) = (f1.len(), f2.len());
    let tors = |f: &[BigInt]| f.iter().filter(|d| !d.is_one()).map(|d| d.to_string()).collect::<Vec<_>>();
    HomologySummary {
        betti: [c.n[0] - r1, c.n[1] - r1 - r2, c.n[2] - r2],
        torsion: [tors(&f1), tors(&f2), Vec::new()],
    }
}

pub fn sparse_mod(col: &[(usize, i64)], p: u32) -> SparseCol {
    fp::sparse_from_i64(col, p)
}

/// Betti numbers over `F_p`.
pub fn betti_fp(c: &ChainComplex, p: u32) -> [usize; 3] {
    let d1: Vec<SparseCol> = c.d1.iter().map(|x| sparse_mod(x, p)).collect();
    let d2: Vec<SparseCol> = c.d2.iter().map(|x| sparse_mod(x, p)).collect();
    let (r1, r2) = (fp::sparse_rank(&d1, p), fp::sparse_rank(&d2, p));
    [c.n[0] - r1, c.n[1] - r1 - r2, c.n[2] - r2]
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let n = self.parent[y];
            self.parent[y] = r;
            y = n;
        }
        r
    }

    /// Links two classes; the smaller root survives. Returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Component labels of the 1-skeleton, numbered in order of their least 0-cell.
pub fn components(c: &ChainComplex) -> (Vec<usize>, Vec<usize>) {
    let mut uf = UnionFind::new(c.n[0]);
    for col in &c.d1 {
        if col.len() == 2 {
            uf.union(col[0].0, col[1].0);
        }
    }
    let mut label = vec![usize::MAX; c.n[0]];
    let mut reps = Vec::new();
    for v in 0..c.n[0] {
        let r = uf.find(v);
        if label[r] == usize::MAX {
            label[r] = reps.len();
            reps.push(v);
        }
        label[v] = label[r];
    }
    (reps, label)
}

/// Deterministic homology bases in degrees 0 and 1.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub h0_reps: Vec<usize>,
    pub component: Vec<usize>,
    pub h1: Vec<Vec<(usize, i64)>>,
}

impl HomologyBasis {
    pub fn dim(&self, degree: usize) -> usize {
        match degree {
            0 => self.h0_reps.len(),
            1 => self.h1.len(),
            _ => 0,
        }
    }
}

/// Fundamental cycles of the spanning forest grown in 1-cell order.
fn fundamental_cycles(c: &ChainComplex) -> Vec<Vec<(usize, i64)>> {
    let n0 = c.n[0];
    let mut uf = UnionFind::new(n0);
    let mut tree_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n0];
    let mut extra = Vec::new();
    for (e, col) in c.d1.iter().enumerate() {
        let (a, b) = (col[0].0, col[1].0);
        if uf.union(a, b) {
            tree_adj[a].push((b, e));
            tree_adj[b].push((a, e));
        } else {
            extra.push(e);
        }
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n0];
    let mut depth = vec![0usize; n0];
    let mut seen = vec![false; n0];
    for root in 0..n0 {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &(y, e) in &tree_adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, e));
                    depth[y] = depth[x] + 1;
                    stack.push(y);
                }
            }
        }
    }
    let tail = |e: usize| c.d1[e][0].0;
    extra
        .into_iter()
        .map(|e| {
            // e runs a -> b; close it with the forest path from b back to a.
            let (a, b) = (c.d1[e][0].0, c.d1[e][1].0);
            let mut cyc: Vec<(usize, i64)> = vec![(e, 1)];
            let (mut x, mut y) = (b, a);
            let mut back: Vec<(usize, i64)> = Vec::new();
            while x != y {
                if depth[x] >= depth[y] {
                    let (px, ex) = parent[x].unwrap();
                    // traverse x -> px
                    cyc.push((ex, if tail(ex) == x { 1 } else { -1 }));
                    x = px;
                } else {
                    let (py, ey) = parent[y].unwrap();
                    // the path reaches y from py, so traverse py -> y
                    back.push((ey, if tail(ey) == py { 1 } else { -1 }));
                    y = py;
                }
            }
            cyc.extend(back.into_iter().rev());
            cyc.sort();
            cyc
        })
        .collect()
}

pub fn homology_basis(c: &ChainComplex, p: u32) -> HomologyBasis {
    let (h0_reps, component) = components(c);
    let mut red = Reducer::new(p, 0);
    for col in &c.d2 {
        red.add(sparse_mod(col, p), None);
    }
    let mut h1 = Vec::new();
    for cyc in fundamental_cycles(c) {
        if red.add(sparse_mod(&cyc, p), None) {
            h1.push(cyc);
        }
    }
    HomologyBasis { h0_reps, component, h1 }
}
