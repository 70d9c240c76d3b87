//! Critical lines in the `(r, L)` plane, their chambers, and the chamber order.
//!
//! A line is critical when a proximity constraint passes through a corner of
//! its chart box, i.e. `r` equals the distance between two vertex positions.
//! Lines are kept even if nothing changes across them. Chambers are the faces
//! of the arrangement inside the window `(0, B)^2`; covering relations point
//! across each wall in the direction of growth (smaller `r`, larger `L`).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::config_complex::{chart_forms, Constraint, Polygon};
use crate::error::{Error, Result};
use crate::metric_graph::{MetricGraph, ParamPoint};
use crate::rational::{fmt_q, qi, Affine, Q};

/// The line `alpha*r + beta*L = gamma`, with integer coefficients, primitive,
/// and first nonzero of `(alpha, beta)` positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CriticalLine {
    pub alpha: Q,
    pub beta: Q,
    pub gamma: Q,
}

impl CriticalLine {
    pub fn new(alpha: Q, beta: Q, gamma: Q) -> Result<Self> {
        if alpha.is_zero() && beta.is_zero() {
            return Err(Error::InvalidArgument("line with alpha = beta = 0".into()));
        }
        let lcm = [&alpha, &beta, &gamma].iter().fold(BigInt::one(), |m, x| m.lcm(x.denom()));
        let ints: Vec<BigInt> = [&alpha, &beta, &gamma].iter().map(|x| (*x * Q::from_integer(lcm.clone())).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let lead = if ints[0].is_zero() { &ints[1] } else { &ints[0] };
        if lead.is_negative() {
            g = -g;
        }
        let f = |x: &BigInt| Q::from_integer(x / &g);
        Ok(CriticalLine { alpha: f(&ints[0]), beta: f(&ints[1]), gamma: f(&ints[2]) })
    }

    /// The line `r = c + b*L`.
    pub fn from_affine(a: &Affine) -> Self {
        CriticalLine::new(Q::one(), -a.b.clone(), a.c.clone()).expect("alpha = 1")
    }

    /// `alpha*r + beta*L - gamma`.
    pub fn eval(&self, r: &Q, l: &Q) -> Q {
        &self.alpha * r + &self.beta * l - &self.gamma
    }

    pub fn sign(&self, p: &ParamPoint) -> i8 {
        let v = self.eval(&p.r, &p.l);
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }

    /// `Some(c + b*L)` when the line is `r = c + b*L`.
    pub fn as_affine(&self) -> Option<Affine> {
        if self.alpha.is_zero() {
            return None;
        }
        Some(Affine::new(&self.gamma / &self.alpha, -&self.beta / &self.alpha))
    }

    fn constraint(&self) -> Constraint {
        Constraint::new(self.alpha.clone(), self.beta.clone(), self.gamma.clone())
    }
}

impl fmt::Display for CriticalLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_affine() {
            Some(a) => write!(f, "r = {a}"),
            None => write!(f, "{}*r + {}*L = {}", fmt_q(&self.alpha), fmt_q(&self.beta), fmt_q(&self.gamma)),
        }
    }
}

/// Deduplicated critical lines of a graph, sorted.
pub fn critical_lines(g: &MetricGraph) -> Vec<CriticalLine> {
    let mut out = BTreeSet::new();
    for f in chart_forms(g) {
        let (li, lj) = (&g.edge(f.i).len, &g.edge(f.j).len);
        for x in [Affine::zero(), li.clone()] {
            for y in [Affine::zero(), lj.clone()] {
                let d = x.scale(&qi(f.sx)) + y.scale(&qi(f.sy)) + f.k.clone();
                if d.c.is_negative() || d.b.is_negative() || (d.c.is_zero() && d.b.is_zero()) {
                    continue;
                }
                out.insert(CriticalLine::from_affine(&d));
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct Chamber {
    pub id: usize,
    pub sample: ParamPoint,
    pub signs: Vec<i8>,
    pub polygon: Polygon,
}

/// A covering relation `source -> target` across `line`, with two points
/// straddling the wall used to compute its structure map.
#[derive(Clone, Debug)]
pub struct Wall {
    pub source: usize,
    pub target: usize,
    pub line: usize,
    pub source_point: ParamPoint,
    pub target_point: ParamPoint,
}

#[derive(Clone, Debug)]
pub struct ChamberArrangement {
    pub lines: Vec<CriticalLine>,
    pub bound: Q,
    pub chambers: Vec<Chamber>,
    pub walls: Vec<Wall>,
    index: HashMap<Vec<i8>, usize>,
}

/// One plus the largest coordinate of any pairwise intersection or axis
/// intercept, and at least two plus the largest constant.
pub fn default_bound(lines: &[CriticalLine]) -> Q {
    let mut m = Q::zero();
    for (k, a) in lines.iter().enumerate() {
        if m < a.gamma {
            m = a.gamma.clone();
        }
        for b in &lines[k + 1..] {
            let det = &a.alpha * &b.beta - &a.beta * &b.alpha;
            if det.is_zero() {
                continue;
            }
            let r = (&a.gamma * &b.beta - &a.beta * &b.gamma) / &det;
            let l = (&a.alpha * &b.gamma - &a.gamma * &b.alpha) / &det;
            m = m.max(r).max(l);
        }
        if !a.alpha.is_zero() {
            m = m.max(&a.gamma / &a.alpha);
        }
        if !a.beta.is_zero() {
            m = m.max(&a.gamma / &a.beta);
        }
    }
    let c = lines.iter().map(|l| l.gamma.clone()).max().unwrap_or_else(Q::zero);
    (m + Q::one()).max(c + qi(2))
}

fn vertex_average(p: &Polygon) -> (Q, Q) {
    p.centroid()
}

/// Chambers of the arrangement inside `(0, bound)^2`.
pub fn arrangement(lines: &[CriticalLine], bound: &Q) -> Result<ChamberArrangement> {
    if !bound.is_positive() {
        return Err(Error::InvalidArgument("window bound must be positive".into()));
    }
    let z = Q::zero();
    let window = Polygon::from_points(vec![
        (z.clone(), z.clone()),
        (bound.clone(), z.clone()),
        (bound.clone(), bound.clone()),
        (z.clone(), bound.clone()),
    ]);
    let mut pieces = vec![window];
    for line in lines {
        let c = line.constraint();
        let mut next = Vec::new();
        for p in pieces {
            let (lo, hi) = p.split(&c);
            if lo.dim == 2 && hi.dim == 2 {
                next.push(lo);
                next.push(hi);
            } else {
                next.push(p);
            }
        }
        pieces = next;
    }
    let mut chambers: Vec<Chamber> = pieces
        .into_iter()
        .map(|poly| {
            let (r, l) = vertex_average(&poly);
            let sample = ParamPoint { r, l };
            let signs = lines.iter().map(|ln| ln.sign(&sample)).collect();
            Chamber { id: 0, sample, signs, polygon: poly }
        })
        .collect();
    chambers.sort_by(|a, b| (&a.sample.r, &a.sample.l).cmp(&(&b.sample.r, &b.sample.l)));
    let mut index = HashMap::new();
    for (k, c) in chambers.iter_mut().enumerate() {
        c.id = k;
        if c.signs.contains(&0) {
            return Err(Error::IllGlued("chamber sample lies on a line".into()));
        }
        index.insert(c.signs.clone(), k);
    }
    let mut arr = ChamberArrangement { lines: lines.to_vec(), bound: bound.clone(), chambers, walls: Vec::new(), index };
    arr.walls = arr.compute_walls()?;
    arr.check_acyclic()?;
    Ok(arr)
}

/// Critical lines of `g` and their arrangement in the default window.
pub fn graph_arrangement(g: &MetricGraph) -> Result<ChamberArrangement> {
    let lines = critical_lines(g);
    arrangement(&lines, &default_bound(&lines))
}

impl ChamberArrangement {
    pub fn len(&self) -> usize {
        self.chambers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chambers.is_empty()
    }

    pub fn chamber_of(&self, p: &ParamPoint) -> Result<usize> {
        let signs: Vec<i8> = self.lines.iter().map(|l| l.sign(p)).collect();
        if signs.contains(&0) {
            return Err(Error::OnWall);
        }
        self.index
            .get(&signs)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("({}, {}) is outside the chamber window", fmt_q(&p.r), fmt_q(&p.l))))
    }

    fn compute_walls(&self) -> Result<Vec<Wall>> {
        let mut walls = Vec::new();
        let n = self.chambers.len();
        for a in 0..n {
            for b in a + 1..n {
                let (sa, sb) = (&self.chambers[a].signs, &self.chambers[b].signs);
                let diff: Vec<usize> = (0..sa.len()).filter(|&k| sa[k] != sb[k]).collect();
                if diff.len() != 1 {
                    continue;
                }
                walls.push(self.orient_wall(a, b, diff[0])?);
            }
        }
        walls.sort_by_key(|w| (w.source, w.target));
        Ok(walls)
    }

    fn orient_wall(&self, a: usize, b: usize, li: usize) -> Result<Wall> {
        let line = &self.lines[li];
        if line.alpha == line.beta {
            return Err(Error::AmbiguousWall(line.to_string()));
        }
        // The segment between the samples crosses only this line.
        let (pa, pb) = (&self.chambers[a].sample, &self.chambers[b].sample);
        let (fa, fb) = (line.eval(&pa.r, &pa.l), line.eval(&pb.r, &pb.l));
        let t = &fa / (&fa - &fb);
        let w = (&pa.r + &t * (&pb.r - &pa.r), &pa.l + &t * (&pb.l - &pa.l));
        let mut limit = w.0.clone().min(w.1.clone()) / qi(2);
        for (k, g) in self.lines.iter().enumerate() {
            if k == li {
                continue;
            }
            let v = g.eval(&w.0, &w.1).abs();
            let s = g.alpha.abs() + g.beta.abs();
            let cap = v / (qi(2) * s);
            if cap < limit {
                limit = cap;
            }
        }
        let mut eps = Q::one();
        while eps >= limit {
            eps /= qi(2);
        }
        let src = ParamPoint::new(&w.0 + &eps, &w.1 - &eps)?;
        let tgt = ParamPoint::new(&w.0 - &eps, &w.1 + &eps)?;
        let (cs, ct) = (self.chamber_of(&src)?, self.chamber_of(&tgt)?);
        let pair = if (cs, ct) == (a, b) || (cs, ct) == (b, a) { (cs, ct) } else { return Err(Error::IllGlued("wall points left their chambers".into())) };
        Ok(Wall { source: pair.0, target: pair.1, line: li, source_point: src, target_point: tgt })
    }

    /// Successors along walls.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.chambers.len()];
        for w in &self.walls {
            out[w.source].push(w.target);
        }
        out
    }

    /// Chambers in a topological order of the wall relation.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.chambers.len();
        let succ = self.successors();
        let mut indeg = vec![0usize; n];
        for w in &self.walls {
            indeg[w.target] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut out = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            out.push(v);
            for &t in &succ[v] {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    ready.insert(t);
                }
            }
        }
        (out.len() == n).then_some(out)
    }

    fn check_acyclic(&self) -> Result<()> {
        match self.topological_order() {
            Some(_) => Ok(()),
            None => Err(Error::IllGlued("chamber relation has a cycle".into())),
        }
    }

    /// `reach[a][b]` iff `a <= b` in the generated order.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.chambers.len();
        let succ = self.successors();
        let order = self.topological_order().expect("acyclic");
        let mut reach = vec![vec![false; n]; n];
        for &v in order.iter().rev() {
            reach[v][v] = true;
            for &t in &succ[v] {
                let row = reach[t].clone();
                for (k, x) in row.into_iter().enumerate() {
                    if x {
                        reach[v][k] = true;
                    }
                }
            }
        }
        reach
    }

    /// Transitive reduction of the wall relation.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let reach = self.reachability();
        let succ = self.successors();
        let mut out = Vec::new();
        for w in &self.walls {
            let implied = succ[w.source].iter().any(|&m| m != w.target && reach[m][w.target]);
            if !implied {
                out.push((w.source, w.target));
            }
        }
        out
    }
}

#[derive(Serialize)]
pub struct ChamberRecord {
    pub id: usize,
    pub sample_r: String,
    pub sample_l: String,
}

impl Chamber {
    pub fn record(&self) -> ChamberRecord {
        ChamberRecord { id: self.id, sample_r: fmt_q(&self.sample.r), sample_l: fmt_q(&self.sample.l) }
    }
}
