//! Maps on homology induced by growing the space.
//!
//! From `(r0, L0)` to `(r1, L1)` with `r1 <= r0` and `L1 >= L0`, each robot is
//! moved by the stretch `t -> t * len1(e) / len0(e)` on every edge. The stretch
//! never shrinks distances, so it maps `X_{r0,L0}` into `X_{r1,L1}`; when `L`
//! does not change it is the inclusion. The target is refined along the
//! stretched proximity lines of the source so that every source cell lands on a
//! union of target cells.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::config_complex::{build_complex, chain_complex, chart_forms, ChainComplex, Constraint, Cuts, PolyComplex, Pt};
use crate::error::{Error, Result};
use crate::fp::{Mat, Reducer};
use crate::homology::{components, homology_basis, sparse_mod, HomologyBasis};
use crate::metric_graph::{GraphPoint, MetricGraph, ParamPoint};
use crate::rational::{fmt_q, Q};

/// A complex together with its chain complex and homology basis.
pub struct Built {
    pub cx: PolyComplex,
    pub cc: ChainComplex,
    pub basis: HomologyBasis,
}

impl Built {
    pub fn new(g: &MetricGraph, p: &ParamPoint, prime: u32) -> Result<Built> {
        let cx = build_complex(g, p, None);
        let cc = chain_complex(&cx)?;
        let basis = homology_basis(&cc, prime);
        Ok(Built { cx, cc, basis })
    }
}

pub fn check_comparable(from: &ParamPoint, to: &ParamPoint) -> Result<()> {
    if to.r > from.r || to.l < from.l {
        return Err(Error::NotComparable(format!(
            "({}, {}) -> ({}, {}) needs r to decrease and L to increase",
            fmt_q(&from.r),
            fmt_q(&from.l),
            fmt_q(&to.r),
            fmt_q(&to.l)
        )));
    }
    Ok(())
}

/// Matrix of `H_degree(X_from) -> H_degree(X_to)` in the canonical bases.
pub fn induced_map(g: &MetricGraph, from: &ParamPoint, to: &ParamPoint, degree: usize, prime: u32) -> Result<Mat> {
    check_comparable(from, to)?;
    let src = Built::new(g, from, prime)?;
    if from == to {
        return Ok(Mat::identity(src.basis.dim(degree)));
    }
    let tgt = Built::new(g, to, prime)?;
    induced_between(g, &src, &tgt, degree, prime)
}

fn stretch_factors(g: &MetricGraph, from: &ParamPoint, to: &ParamPoint) -> Vec<Q> {
    let (g0, g1) = (g.with_l(&from.l), g.with_l(&to.l));
    (0..g.num_edges()).map(|e| g1.edge_len(e) / g0.edge_len(e)).collect()
}

fn stretch_point(p: &GraphPoint, lam: &[Q]) -> GraphPoint {
    match p {
        GraphPoint::Vertex(v) => GraphPoint::Vertex(*v),
        GraphPoint::Interior(e, t) => GraphPoint::Interior(*e, t * &lam[*e]),
    }
}

/// Source proximity lines expressed in target chart coordinates.
fn stretched_cuts(g: &MetricGraph, from: &ParamPoint, lam: &[Q]) -> Cuts {
    let mut cuts = Cuts::new();
    for f in chart_forms(g) {
        let line = Constraint::new(
            Q::from_integer(f.sx.into()) / &lam[f.i],
            Q::from_integer(f.sy.into()) / &lam[f.j],
            &from.r - f.k.eval(&from.l),
        );
        cuts.entry((f.i, f.j)).or_default().push(line);
    }
    cuts
}

struct Pusher<'a> {
    cx: &'a PolyComplex,
    chart_points: std::collections::HashMap<(usize, usize), Vec<(usize, Pt)>>,
    by_ends: std::collections::HashMap<(usize, usize), Vec<usize>>,
}

impl<'a> Pusher<'a> {
    fn new(cx: &'a PolyComplex) -> Self {
        Pusher { cx, chart_points: cx.chart_points(), by_ends: cx.edges_by_ends() }
    }

    /// Signed 1-cells covering the straight segment `s -> t` of `chart`.
    fn segment(&self, chart: (usize, usize), s: &Pt, t: &Pt) -> Result<Vec<(usize, i64)>> {
        let pts = self.chart_points.get(&chart).map(|v| v.as_slice()).unwrap_or(&[]);
        let (dx, dy) = (&t.0 - &s.0, &t.1 - &s.1);
        let mut on: Vec<(Q, usize)> = Vec::new();
        for (idx, q) in pts {
            let (qx, qy) = (&q.0 - &s.0, &q.1 - &s.1);
            if !(&qx * &dy - &qy * &dx).is_zero() {
                continue;
            }
            let u = (&qx * &dx + &qy * &dy) / (&dx * &dx + &dy * &dy);
            if u >= Q::zero() && u <= Q::from_integer(1.into()) {
                on.push((u, *idx));
            }
        }
        on.sort();
        on.dedup();
        if on.len() < 2 || !on[0].0.is_zero() || on.last().unwrap().0 != Q::from_integer(1.into()) {
            return Err(Error::IllGlued("image segment endpoints are not 0-cells".into()));
        }
        let mut out = Vec::new();
        for w in on.windows(2) {
            let (x, y) = (w[0].1, w[1].1);
            let (a, b) = if x < y { (x, y) } else { (y, x) };
            let cands = self.by_ends.get(&(a, b)).ok_or_else(|| Error::IllGlued("image segment leaves the 1-skeleton".into()))?;
            let id = if cands.len() == 1 {
                cands[0]
            } else {
                let m = ((&w[0].0 + &w[1].0) / Q::from_integer(2.into())).clone();
                let mid_pt = (&s.0 + &m * &dx, &s.1 + &m * &dy);
                let g = &self.cx.graph;
                let key = (g.point(chart.0, mid_pt.0).unwrap(), g.point(chart.1, mid_pt.1).unwrap());
                *cands
                    .iter()
                    .find(|&&c| self.cx.edges[c].mid == key)
                    .ok_or_else(|| Error::IllGlued("ambiguous image 1-cell".into()))?
            };
            out.push((id, if x < y { 1 } else { -1 }));
        }
        Ok(out)
    }

    /// Pushes a 1-chain of `src` through the chart-wise scaling by `lam`.
    fn chain(&self, src: &PolyComplex, chain: &[(usize, i64)], lam: &[Q]) -> Result<Vec<(usize, i64)>> {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for &(e, c) in chain {
            let ed = &src.edges[e];
            let (i, j) = ed.chart;
            let s = (&ed.pa.0 * &lam[i], &ed.pa.1 * &lam[j]);
            let t = (&ed.pb.0 * &lam[i], &ed.pb.1 * &lam[j]);
            for (f, sg) in self.segment(ed.chart, &s, &t)? {
                *acc.entry(f).or_default() += c * sg;
            }
        }
        Ok(acc.into_iter().filter(|&(_, v)| v != 0).collect())
    }
}

/// Induced map between two already built complexes.
pub fn induced_between(g: &MetricGraph, src: &Built, tgt: &Built, degree: usize, prime: u32) -> Result<Mat> {
    let (from, to) = (&src.cx.param, &tgt.cx.param);
    check_comparable(from, to)?;
    let (ds, dt) = (src.basis.dim(degree), tgt.basis.dim(degree));
    if degree > 1 {
        return Ok(Mat::zeros(dt, ds));
    }
    if ds == 0 || dt == 0 {
        return Ok(Mat::zeros(dt, ds));
    }
    let lam = stretch_factors(g, from, to);
    let cuts = stretched_cuts(g, from, &lam);
    let refined = build_complex(g, to, Some(&cuts));
    let rcc = chain_complex(&refined)?;
    let mut out = Mat::zeros(dt, ds);
    if degree == 0 {
        let (_, rlabel) = components(&rcc);
        let mut comp_to_basis = vec![usize::MAX; rcc.n[0].max(1)];
        for (k, &v) in tgt.basis.h0_reps.iter().enumerate() {
            let ri = refined.point_index(&tgt.cx.points[v]).ok_or_else(|| Error::IllGlued("target 0-cell lost in refinement".into()))?;
            comp_to_basis[rlabel[ri]] = k;
        }
        for (k, &v) in src.basis.h0_reps.iter().enumerate() {
            let (p1, p2) = &src.cx.points[v];
            let img = (stretch_point(p1, &lam), stretch_point(p2, &lam));
            let ri = refined.point_index(&img).ok_or_else(|| Error::IllGlued("image of a 0-cell is not a 0-cell".into()))?;
            let t = comp_to_basis[rlabel[ri]];
            if t == usize::MAX {
                return Err(Error::IllGlued("refined component without a basis class".into()));
            }
            out.set(t, k, 1);
        }
        return Ok(out);
    }
    let pusher = Pusher::new(&refined);
    let ones: Vec<Q> = vec![Q::from_integer(1.into()); g.num_edges()];
    let mut red = Reducer::new(prime, dt);
    for col in &rcc.d2 {
        red.add(sparse_mod(col, prime), None);
    }
    for (k, z) in tgt.basis.h1.iter().enumerate() {
        let pushed = pusher.chain(&tgt.cx, z, &ones)?;
        if !red.add(sparse_mod(&pushed, prime), Some(k)) {
            return Err(Error::IllGlued("subdivision lost a homology class".into()));
        }
    }
    for (k, z) in src.basis.h1.iter().enumerate() {
        let img = pusher.chain(&src.cx, z, &lam)?;
        let coords = red
            .coordinates(&sparse_mod(&img, prime))
            .ok_or_else(|| Error::IllGlued("image of a cycle is not a cycle".into()))?;
        for (t, v) in coords.into_iter().enumerate() {
            out.set(t, k, v);
        }
    }
    Ok(out)
}
