//! First and second pages of the Mayer–Vietoris spectral sequence for a cover
//! of a configuration complex by at most four subcomplexes, rows `q = 0, 1`.
//!
//! `E1_{p,q}` is the sum of `H_q` over the intersections of `p + 1` pieces,
//! taken in increasing index order; `d1` is the alternating sum of the maps
//! induced by dropping one index.

use serde::Serialize;

use crate::config_complex::{ChainComplex, PolyComplex};
use crate::error::{Error, Result};
use crate::fp::{Mat, Reducer};
use crate::homology::{homology_basis, sparse_mod, HomologyBasis};
use crate::metric_graph::{GraphPoint, MetricGraph};

pub const MAX_PIECES: usize = 4;

/// Cells of a subcomplex as masks over 0-, 1- and 2-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSet {
    pub cells: [Vec<bool>; 3],
}

impl CellSet {
    pub fn full(cx: &PolyComplex) -> CellSet {
        let [a, b, c] = cx.counts();
        CellSet { cells: [vec![true; a], vec![true; b], vec![true; c]] }
    }

    /// Configurations with the first robot on the edges `first` and the second on `second`.
    pub fn product(cx: &PolyComplex, first: &[usize], second: &[usize]) -> CellSet {
        let g = &cx.graph;
        let on = |p: &GraphPoint, set: &[usize]| match p {
            GraphPoint::Vertex(v) => set.iter().any(|&e| g.edge(e).u == *v || g.edge(e).v == *v),
            GraphPoint::Interior(e, _) => set.contains(e),
        };
        let inside = |k: &(GraphPoint, GraphPoint)| on(&k.0, first) && on(&k.1, second);
        CellSet {
            cells: [
                cx.points.iter().map(inside).collect(),
                cx.edges.iter().map(|e| inside(&e.mid)).collect(),
                cx.faces.iter().map(|f| first.contains(&f.chart.0) && second.contains(&f.chart.1)).collect(),
            ],
        }
    }

    pub fn intersect(&self, o: &CellSet) -> CellSet {
        CellSet { cells: std::array::from_fn(|d| self.cells[d].iter().zip(&o.cells[d]).map(|(a, b)| *a && *b).collect()) }
    }

    pub fn is_empty(&self) -> bool {
        self.cells[0].iter().all(|x| !x)
    }

    fn closed(&self, cc: &ChainComplex) -> bool {
        let edges_ok = cc.d1.iter().enumerate().all(|(e, col)| !self.cells[1][e] || col.iter().all(|&(v, _)| self.cells[0][v]));
        let faces_ok = cc.d2.iter().enumerate().all(|(f, col)| !self.cells[2][f] || col.iter().all(|&(e, _)| self.cells[1][e]));
        edges_ok && faces_ok
    }
}

/// Pieces in a fixed order; their union is the whole complex.
#[derive(Clone, Debug)]
pub struct OrderedCover {
    pub names: Vec<String>,
    pub pieces: Vec<CellSet>,
}

impl OrderedCover {
    pub fn new(cc: &ChainComplex, names: Vec<String>, pieces: Vec<CellSet>) -> Result<OrderedCover> {
        if pieces.is_empty() || pieces.len() > MAX_PIECES || names.len() != pieces.len() {
            return Err(Error::NotACover(format!("need 1 to {MAX_PIECES} named pieces, got {}", pieces.len())));
        }
        for (name, s) in names.iter().zip(&pieces) {
            if (0..3).any(|d| s.cells[d].len() != cc.n[d]) {
                return Err(Error::NotACover(format!("piece {name} has the wrong cell count")));
            }
            if !s.closed(cc) {
                return Err(Error::NotACover(format!("piece {name} is not closed under faces")));
            }
        }
        for d in 0..3 {
            if (0..cc.n[d]).any(|c| pieces.iter().all(|s| !s.cells[d][c])) {
                return Err(Error::NotACover(format!("some {d}-cell lies in no piece")));
            }
        }
        Ok(OrderedCover { names, pieces })
    }

    /// `U11, U12, U21, U22` for the split of the edges into `a` and the rest.
    pub fn split(cx: &PolyComplex, cc: &ChainComplex, a: &[usize]) -> Result<OrderedCover> {
        let b: Vec<usize> = (0..cx.graph.num_edges()).filter(|e| !a.contains(e)).collect();
        let pieces = vec![
            CellSet::product(cx, a, a),
            CellSet::product(cx, a, &b),
            CellSet::product(cx, &b, a),
            CellSet::product(cx, &b, &b),
        ];
        let names = ["U11", "U12", "U21", "U22"].iter().map(|s| s.to_string()).collect();
        OrderedCover::new(cc, names, pieces)
    }

    /// The split of a star at its center with `A = {e1}`.
    pub fn star(cx: &PolyComplex, cc: &ChainComplex) -> Result<OrderedCover> {
        let e1 = cx.graph.edge_index("e1").ok_or_else(|| Error::InvalidArgument("graph has no edge e1".into()))?;
        OrderedCover::split(cx, cc, &[e1])
    }

    /// The split of a generalized H graph at the bridge midpoint.
    pub fn h_graph(cx: &PolyComplex, cc: &ChainComplex) -> Result<OrderedCover> {
        let g = &cx.graph;
        let hub = g.vertex_index("a").ok_or_else(|| Error::InvalidArgument("graph has no hub a".into()))?;
        let a: Vec<usize> = (0..g.num_edges())
            .filter(|&e| {
                let ed = g.edge(e);
                ed.u == hub || ed.v == hub
            })
            .collect();
        OrderedCover::split(cx, cc, &a)
    }
}

/// Entry dimensions `dims[p][q]` and, on the first page, `d1[p][q]: E_{p,q} -> E_{p-1,q}` for `p >= 1`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralPage {
    pub dims: Vec<[usize; 2]>,
    #[serde(skip)]
    pub d1: Vec<[Mat; 2]>,
    pub ranks: Vec<[usize; 2]>,
}

impl SpectralPage {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims.get(p).map_or(0, |x| x[q])
    }

    /// Rank of `d1: E_{p,q} -> E_{p-1,q}`.
    pub fn rank(&self, p: usize, q: usize) -> usize {
        if p == 0 {
            return 0;
        }
        self.ranks.get(p - 1).map_or(0, |x| x[q])
    }

    /// `d1 d1 = 0` wherever composable.
    pub fn d1_squares_to_zero(&self, prime: u32) -> bool {
        self.d1.windows(2).all(|w| (0..2).all(|q| w[0][q].mul(&w[1][q], prime).is_zero()))
    }
}

struct Piece {
    cc: ChainComplex,
    /// Ambient 0- and 1-cell ids of the restricted cells.
    ids: [Vec<usize>; 3],
    basis: HomologyBasis,
}

impl Piece {
    fn new(cc: &ChainComplex, s: &CellSet, prime: u32) -> Piece {
        let (sub, ids) = cc.restrict([&s.cells[0], &s.cells[1], &s.cells[2]]);
        let basis = homology_basis(&sub, prime);
        Piece { cc: sub, ids, basis }
    }
}

/// `H_q(small) -> H_q(big)` for pieces with `small` contained in `big`.
fn inclusion(small: &Piece, big: &Piece, q: usize, prime: u32) -> Mat {
    let (ds, db) = (small.basis.dim(q), big.basis.dim(q));
    let mut out = Mat::zeros(db, ds);
    if ds == 0 || db == 0 {
        return out;
    }
    let pos = |d: usize, ambient: usize| big.ids[d].binary_search(&ambient).expect("nested pieces");
    if q == 0 {
        let mut rep_of_label = vec![usize::MAX; big.cc.n[0]];
        for (k, &v) in big.basis.h0_reps.iter().enumerate() {
            rep_of_label[big.basis.component[v]] = k;
        }
        for (k, &v) in small.basis.h0_reps.iter().enumerate() {
            let w = pos(0, small.ids[0][v]);
            out.set(rep_of_label[big.basis.component[w]], k, 1);
        }
        return out;
    }
    let mut red = Reducer::new(prime, db);
    for col in &big.cc.d2 {
        red.add(sparse_mod(col, prime), None);
    }
    for (k, z) in big.basis.h1.iter().enumerate() {
        red.add(sparse_mod(z, prime), Some(k));
    }
    for (k, z) in small.basis.h1.iter().enumerate() {
        let mut moved: Vec<(usize, i64)> = z.iter().map(|&(e, c)| (pos(1, small.ids[1][e]), c)).collect();
        moved.sort_unstable();
        let coords = red.coordinates(&sparse_mod(&moved, prime)).expect("a cycle of a subcomplex is a cycle");
        for (t, v) in coords.into_iter().enumerate() {
            out.set(t, k, v);
        }
    }
    out
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// `(E1, E2)` of the cover, rows `q = 0, 1`, columns `p < pieces`.
pub fn mv_pages(cc: &ChainComplex, cover: &OrderedCover, prime: u32) -> (SpectralPage, SpectralPage) {
    let n = cover.pieces.len();
    // Column p: intersections of p + 1 pieces, lexicographic.
    let mut columns: Vec<Vec<(Vec<usize>, Piece)>> = Vec::with_capacity(n);
    for p in 0..n {
        let mut col = Vec::new();
        for idx in subsets(n, p + 1) {
            let mut s = cover.pieces[idx[0]].clone();
            for &i in &idx[1..] {
                s = s.intersect(&cover.pieces[i]);
            }
            col.push((idx, Piece::new(cc, &s, prime)));
        }
        columns.push(col);
    }
    let dims: Vec<[usize; 2]> = columns
        .iter()
        .map(|col| std::array::from_fn(|q| col.iter().map(|(_, pc)| pc.basis.dim(q)).sum()))
        .collect();
    let mut d1: Vec<[Mat; 2]> = Vec::new();
    for p in 1..n {
        d1.push(std::array::from_fn(|q| {
            let mut m = Mat::zeros(dims[p - 1][q], dims[p][q]);
            let mut col0 = 0;
            for (idx, piece) in &columns[p] {
                let w = piece.basis.dim(q);
                for j in 0..idx.len() {
                    let face: Vec<usize> = idx.iter().enumerate().filter(|&(t, _)| t != j).map(|(_, &i)| i).collect();
                    let mut row0 = 0;
                    for (fidx, fpiece) in &columns[p - 1] {
                        if *fidx == face {
                            let block = inclusion(piece, fpiece, q, prime);
                            for r in 0..block.rows {
                                for c in 0..block.cols {
                                    let v = block.get(r, c);
                                    if v != 0 {
                                        let v = if j % 2 == 0 { v } else { crate::fp::neg(v, prime) };
                                        let cur = m.get(row0 + r, col0 + c);
                                        m.set(row0 + r, col0 + c, crate::fp::add(cur, v, prime));
                                    }
                                }
                            }
                        }
                        row0 += fpiece.basis.dim(q);
                    }
                }
                col0 += w;
            }
            m
        }));
    }
    let ranks: Vec<[usize; 2]> = d1.iter().map(|d| std::array::from_fn(|q| d[q].rank(prime))).collect();
    let rank = |p: usize, q: usize| if p == 0 || p >= n { 0 } else { ranks[p - 1][q] };
    let e2: Vec<[usize; 2]> = (0..n).map(|p| std::array::from_fn(|q| dims[p][q] - rank(p, q) - rank(p + 1, q))).collect();
    let e1 = SpectralPage { dims, d1, ranks: ranks.clone() };
    let e2 = SpectralPage { dims: e2, d1: Vec::new(), ranks: Vec::new() };
    (e1, e2)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// `(n, b_n, dim E2_{0,n} + dim E2_{1,n-1})`.
    pub checks: Vec<(usize, usize, usize)>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|&(_, b, s)| b == s)
    }
}

/// Checks `b_n = dim E2_{0,n} + dim E2_{1,n-1}` for `n = 0, 1`.
pub fn check_convergence(e2: &SpectralPage, betti: &[usize; 3]) -> Result<ConvergenceReport> {
    if (2..e2.dims.len()).any(|p| e2.dims[p].iter().any(|&x| x > 0)) {
        return Err(Error::ColumnsOutOfRange);
    }
    let checks = vec![(0, betti[0], e2.dim(0, 0)), (1, betti[1], e2.dim(0, 1) + e2.dim(1, 0))];
    Ok(ConvergenceReport { checks })
}

/// Edge ids of the graph, for building custom covers.
pub fn edge_ids(g: &MetricGraph, names: &[&str]) -> Result<Vec<usize>> {
    names.iter().map(|n| g.edge_index(n).ok_or_else(|| Error::InvalidArgument(format!("no edge {n}")))).collect()
}
