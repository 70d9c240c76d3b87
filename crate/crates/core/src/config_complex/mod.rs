//! Polyhedral cell structure on the restricted configuration space `X^2_{r,L}`.
//!
//! Each ordered pair of edges `(i, j)` is a chart `[0, L_i] x [0, L_j]` with
//! robot 1 at coordinate `x` of edge `i` and robot 2 at coordinate `y` of edge
//! `j`. On a tree the distance is affine on each chart, so the space is a union
//! of convex polygons. Cells are glued through canonical point keys, and box
//! sides are subdivided at every 0-cell lying on them so that cuts made in one
//! chart propagate to its neighbours.

pub mod polygon;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric_graph::{cmp_point_pairs, GraphPoint, MetricGraph, ParamPoint};
use crate::rational::{qi, Affine, Q};
pub use polygon::{solve_polygon, Constraint, Polygon, Pt};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Branch {
    /// Distinct edges.
    Off,
    /// Same edge, `x - y >= r`.
    XMinusY,
    /// Same edge, `y - x >= r`.
    YMinusX,
}

/// Distance on a chart as `sx*x + sy*y + k(L)`; the system requires it to be `>= r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartForm {
    pub i: usize,
    pub j: usize,
    pub branch: Branch,
    pub sx: i64,
    pub sy: i64,
    pub k: Affine,
}

impl ChartForm {
    pub fn proximity(&self, r: &Q, l: &Q) -> Constraint {
        Constraint::new(qi(-self.sx), qi(-self.sy), self.k.eval(l) - r)
    }
}

/// One convex piece of the space: box constraints followed by one proximity constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSystem {
    pub i: usize,
    pub j: usize,
    pub branch: Branch,
    pub constraints: Vec<Constraint>,
}

pub fn chart_forms(g: &MetricGraph) -> Vec<ChartForm> {
    let ne = g.num_edges();
    let mut out = Vec::new();
    for i in 0..ne {
        for j in 0..ne {
            if i == j {
                out.push(ChartForm { i, j, branch: Branch::XMinusY, sx: 1, sy: -1, k: Affine::zero() });
                out.push(ChartForm { i, j, branch: Branch::YMinusX, sx: -1, sy: 1, k: Affine::zero() });
                continue;
            }
            let (ei, ej) = (g.edge(i), g.edge(j));
            let pi = g.near_endpoint(i, j);
            let qj = g.near_endpoint(j, i);
            let mut k = g.vertex_distance_affine(pi, qj).clone();
            let sx = if pi == ei.u {
                1
            } else {
                k = k + ei.len.clone();
                -1
            };
            let sy = if qj == ej.u {
                1
            } else {
                k = k + ej.len.clone();
                -1
            };
            out.push(ChartForm { i, j, branch: Branch::Off, sx, sy, k });
        }
    }
    out
}

fn box_constraints(li: &Q, lj: &Q) -> Vec<Constraint> {
    vec![
        Constraint::new(-Q::one(), Q::zero(), Q::zero()),
        Constraint::new(Q::one(), Q::zero(), li.clone()),
        Constraint::new(Q::zero(), -Q::one(), Q::zero()),
        Constraint::new(Q::zero(), Q::one(), lj.clone()),
    ]
}

/// All cell systems at parameter `p`, ordered by `(i, j, branch)`.
pub fn cell_systems(g: &MetricGraph, p: &ParamPoint) -> Vec<CellSystem> {
    let g = g.with_l(&p.l);
    chart_forms(&g)
        .into_iter()
        .map(|f| {
            let mut constraints = box_constraints(&g.edge_len(f.i), &g.edge_len(f.j));
            constraints.push(f.proximity(&p.r, &p.l));
            CellSystem { i: f.i, j: f.j, branch: f.branch, constraints }
        })
        .collect()
}

/// Extra lines `a*x + b*y = c` per chart, used to refine a complex.
pub type Cuts = BTreeMap<(usize, usize), Vec<Constraint>>;

pub type PointKey = (GraphPoint, GraphPoint);

/// A 1-cell oriented from `a` to `b` (`a < b` in point order), with chart coordinates of its ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCell {
    pub a: usize,
    pub b: usize,
    pub mid: PointKey,
    pub chart: (usize, usize),
    pub pa: Pt,
    pub pb: Pt,
}

/// A 2-cell: a convex piece of one chart, oriented counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceCell {
    pub chart: (usize, usize),
    pub branch: Branch,
    pub piece: usize,
    pub polygon: Polygon,
    pub boundary: Vec<(usize, i64)>,
}

#[derive(Clone, Debug)]
pub struct PolyComplex {
    pub graph: MetricGraph,
    pub param: ParamPoint,
    pub points: Vec<PointKey>,
    pub edges: Vec<EdgeCell>,
    pub faces: Vec<FaceCell>,
    index: HashMap<PointKey, usize>,
}

struct Piece {
    chart: (usize, usize),
    branch: Branch,
    piece: usize,
    poly: Polygon,
}

fn key_at(g: &MetricGraph, chart: (usize, usize), p: &Pt) -> PointKey {
    (
        g.point(chart.0, p.0.clone()).expect("x inside its edge"),
        g.point(chart.1, p.1.clone()).expect("y inside its edge"),
    )
}

fn cmp_keys(a: &PointKey, b: &PointKey) -> Ordering {
    cmp_point_pairs(a, b)
}

/// Builds the glued complex, optionally refined along `cuts`.
pub fn build_complex(g: &MetricGraph, p: &ParamPoint, cuts: Option<&Cuts>) -> PolyComplex {
    let g = g.with_l(&p.l);
    let mut pieces = Vec::new();
    for s in cell_systems(&g, p) {
        let poly = solve_polygon(&s.constraints);
        if poly.dim < 0 {
            continue;
        }
        let mut parts = vec![poly];
        if let Some(lines) = cuts.and_then(|c| c.get(&(s.i, s.j))) {
            for line in lines {
                let mut next = Vec::new();
                for part in parts {
                    if part.dim == 0 {
                        next.push(part);
                        continue;
                    }
                    let d = part.dim;
                    let (lo, hi) = part.split(line);
                    let mut keep: Vec<Polygon> = [lo, hi].into_iter().filter(|q| q.dim == d).collect();
                    keep.dedup();
                    if keep.is_empty() {
                        next.push(part);
                    } else {
                        next.extend(keep);
                    }
                }
                parts = next;
            }
        }
        for (k, poly) in parts.into_iter().enumerate() {
            pieces.push(Piece { chart: (s.i, s.j), branch: s.branch, piece: k, poly });
        }
    }

    let mut keys: Vec<PointKey> = pieces
        .iter()
        .flat_map(|pc| pc.poly.vertices.iter().map(|v| key_at(&g, pc.chart, v)).collect::<Vec<_>>())
        .collect();
    keys.sort_by(cmp_keys);
    keys.dedup();
    let index: HashMap<PointKey, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();

    // Interior positions of 0-cells on box sides: (fixed robot, vertex, moving edge) -> sorted t.
    let mut sides: HashMap<(u8, usize, usize), Vec<Q>> = HashMap::new();
    for (p1, p2) in &keys {
        match (p1, p2) {
            (GraphPoint::Vertex(w), GraphPoint::Interior(e, t)) => sides.entry((0, *w, *e)).or_default().push(t.clone()),
            (GraphPoint::Interior(e, t), GraphPoint::Vertex(w)) => sides.entry((1, *w, *e)).or_default().push(t.clone()),
            _ => {}
        }
    }
    for v in sides.values_mut() {
        v.sort();
        v.dedup();
    }

    let mut edge_ids: HashMap<(usize, usize, PointKey), usize> = HashMap::new();
    let mut edges: Vec<EdgeCell> = Vec::new();
    let mut faces: Vec<FaceCell> = Vec::new();
    for pc in &pieces {
        let (i, j) = pc.chart;
        let (li, lj) = (g.edge_len(i), g.edge_len(j));
        let mut boundary = Vec::new();
        for (s, t) in pc.poly.edges() {
            let mut path = vec![s.clone()];
            let between = |a: &Q, b: &Q, x: &Q| (a < x && x < b) || (b < x && x < a);
            if s.0 == t.0 && (s.0.is_zero() || s.0 == li) {
                let w = if s.0.is_zero() { g.edge(i).u } else { g.edge(i).v };
                if let Some(ts) = sides.get(&(0, w, j)) {
                    let mut mids: Vec<Q> = ts.iter().filter(|x| between(&s.1, &t.1, x)).cloned().collect();
                    if s.1 > t.1 {
                        mids.reverse();
                    }
                    path.extend(mids.into_iter().map(|y| (s.0.clone(), y)));
                }
            } else if s.1 == t.1 && (s.1.is_zero() || s.1 == lj) {
                let w = if s.1.is_zero() { g.edge(j).u } else { g.edge(j).v };
                if let Some(ts) = sides.get(&(1, w, i)) {
                    let mut mids: Vec<Q> = ts.iter().filter(|x| between(&s.0, &t.0, x)).cloned().collect();
                    if s.0 > t.0 {
                        mids.reverse();
                    }
                    path.extend(mids.into_iter().map(|x| (x, s.1.clone())));
                }
            }
            path.push(t.clone());
            for w in path.windows(2) {
                let (ka, kb) = (key_at(&g, pc.chart, &w[0]), key_at(&g, pc.chart, &w[1]));
                let (ia, ib) = (index[&ka], index[&kb]);
                let mid_pt = ((&w[0].0 + &w[1].0) / qi(2), (&w[0].1 + &w[1].1) / qi(2));
                let mid = key_at(&g, pc.chart, &mid_pt);
                let (a, b, pa, pb) =
                    if ia < ib { (ia, ib, w[0].clone(), w[1].clone()) } else { (ib, ia, w[1].clone(), w[0].clone()) };
                let id = *edge_ids.entry((a, b, mid.clone())).or_insert_with(|| {
                    edges.push(EdgeCell { a, b, mid, chart: pc.chart, pa, pb });
                    edges.len() - 1
                });
                boundary.push((id, if ia < ib { 1 } else { -1 }));
            }
        }
        if pc.poly.dim == 2 {
            faces.push(FaceCell { chart: pc.chart, branch: pc.branch, piece: pc.piece, polygon: pc.poly.clone(), boundary });
        }
    }

    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&x, &y| {
        let (ex, ey) = (&edges[x], &edges[y]);
        (ex.a, ex.b).cmp(&(ey.a, ey.b)).then_with(|| cmp_keys(&ex.mid, &ey.mid))
    });
    let mut rank = vec![0; edges.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let edges: Vec<EdgeCell> = order.iter().map(|&o| edges[o].clone()).collect();
    for f in &mut faces {
        for (e, _) in &mut f.boundary {
            *e = rank[*e];
        }
    }
    PolyComplex { graph: g, param: p.clone(), points: keys, edges, faces, index }
}

impl PolyComplex {
    pub fn counts(&self) -> [usize; 3] {
        [self.points.len(), self.edges.len(), self.faces.len()]
    }

    pub fn point_index(&self, key: &PointKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// 0-cells with their coordinates in each chart containing them.
    pub fn chart_points(&self) -> HashMap<(usize, usize), Vec<(usize, Pt)>> {
        let g = &self.graph;
        let mut out: HashMap<(usize, usize), Vec<(usize, Pt)>> = HashMap::new();
        let carriers = |p: &GraphPoint| -> Vec<usize> {
            match p {
                GraphPoint::Vertex(v) => g.incident(*v).iter().map(|&(_, e)| e).collect(),
                GraphPoint::Interior(e, _) => vec![*e],
            }
        };
        for (idx, (p1, p2)) in self.points.iter().enumerate() {
            for e1 in carriers(p1) {
                for e2 in carriers(p2) {
                    let x = g.coord_on(p1, e1).unwrap();
                    let y = g.coord_on(p2, e2).unwrap();
                    out.entry((e1, e2)).or_default().push((idx, (x, y)));
                }
            }
        }
        out
    }

    /// 1-cells indexed by their endpoint pair.
    pub fn edges_by_ends(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            m.entry((e.a, e.b)).or_default().push(k);
        }
        m
    }
}

/// Integer boundary matrices stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub n: [usize; 3],
    pub d1: Vec<Vec<(usize, i64)>>,
    pub d2: Vec<Vec<(usize, i64)>>,
}

impl ChainComplex {
    /// Dense integer matrix of `d_k` (`k` = 1 or 2).
    pub fn dense(&self, k: usize) -> Vec<Vec<i64>> {
        let (rows, cols) = match k {
            1 => (self.n[0], &self.d1),
            2 => (self.n[1], &self.d2),
            _ => panic!("degree {k} has no boundary matrix"),
        };
        let mut m = vec![vec![0i64; cols.len()]; rows];
        for (j, c) in cols.iter().enumerate() {
            for &(i, v) in c {
                m[i][j] += v;
            }
        }
        m
    }

    /// Restriction to a subcomplex given by cell masks (the masks must be closed under faces).
    pub fn restrict(&self, keep: [&[bool]; 3]) -> (ChainComplex, [Vec<usize>; 3]) {
        let ids: [Vec<usize>; 3] = std::array::from_fn(|d| (0..self.n[d]).filter(|&c| keep[d][c]).collect());
        let mut newpos: [HashMap<usize, usize>; 3] = Default::default();
        for d in 0..3 {
            newpos[d] = ids[d].iter().enumerate().map(|(k, &c)| (c, k)).collect();
        }
        let remap = |cols: &Vec<Vec<(usize, i64)>>, d: usize| -> Vec<Vec<(usize, i64)>> {
            ids[d]
                .iter()
                .map(|&c| cols[c].iter().map(|&(r, v)| (newpos[d - 1][&r], v)).collect())
                .collect()
        };
        let cc = ChainComplex { n: [ids[0].len(), ids[1].len(), ids[2].len()], d1: remap(&self.d1, 1), d2: remap(&self.d2, 2) };
        (cc, ids)
    }

    /// Checks `d1 * d2 = 0` exactly.
    pub fn check(&self) -> Result<()> {
        for (f, col) in self.d2.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(e, s) in col {
                for &(v, t) in &self.d1[e] {
                    *acc.entry(v).or_default() += s * t;
                }
            }
            if acc.values().any(|&x| x != 0) {
                return Err(Error::IllGlued(format!("boundary of 2-cell {f} is not a cycle")));
            }
        }
        Ok(())
    }
}

/// Signed boundary matrices of a complex, verified to satisfy `d1 d2 = 0`.
pub fn chain_complex(cx: &PolyComplex) -> Result<ChainComplex> {
    let d1 = cx.edges.iter().map(|e| vec![(e.a, -1), (e.b, 1)]).collect();
    let d2 = cx
        .faces
        .iter()
        .map(|f| {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(e, s) in &f.boundary {
                *acc.entry(e).or_default() += s;
            }
            acc.into_iter().filter(|&(_, v)| v != 0).collect()
        })
        .collect();
    let cc = ChainComplex { n: cx.counts(), d1, d2 };
    cc.check()?;
    Ok(cc)
}
