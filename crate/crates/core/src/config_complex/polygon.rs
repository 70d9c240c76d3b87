//! Exact convex polygons cut out by half-planes.

use num_traits::{Signed, Zero};

use crate::rational::Q;

pub type Pt = (Q, Q);

/// Half-plane `a*x + b*y <= c`; also used for the line `a*x + b*y = c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub a: Q,
    pub b: Q,
    pub c: Q,
}

impl Constraint {
    pub fn new(a: Q, b: Q, c: Q) -> Self {
        Constraint { a, b, c }
    }

    /// `a*x + b*y - c`.
    pub fn eval(&self, p: &Pt) -> Q {
        &self.a * &p.0 + &self.b * &p.1 - &self.c
    }

    pub fn holds(&self, p: &Pt) -> bool {
        !self.eval(p).is_positive()
    }

    pub fn flipped(&self) -> Constraint {
        Constraint { a: -self.a.clone(), b: -self.b.clone(), c: -self.c.clone() }
    }
}

/// Convex polygon with vertices counterclockwise, starting at the lowest-then-leftmost vertex.
/// `dim` is -1 (empty), 0 (point), 1 (segment) or 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    pub dim: i8,
    pub vertices: Vec<Pt>,
}

impl Polygon {
    pub fn empty() -> Self {
        Polygon { dim: -1, vertices: Vec::new() }
    }

    pub fn from_points(points: Vec<Pt>) -> Self {
        let h = hull(points);
        let dim = match h.len() {
            0 => -1,
            1 => 0,
            2 => 1,
            _ => 2,
        };
        Polygon { dim, vertices: h }
    }

    /// Edges as consecutive vertex pairs (one edge for a segment, none for a point).
    pub fn edges(&self) -> Vec<(Pt, Pt)> {
        match self.dim {
            1 => vec![(self.vertices[0].clone(), self.vertices[1].clone())],
            2 => {
                let n = self.vertices.len();
                (0..n).map(|k| (self.vertices[k].clone(), self.vertices[(k + 1) % n].clone())).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Keeps the part where `h` holds.
    pub fn clip(&self, h: &Constraint) -> Polygon {
        if self.dim < 0 {
            return Polygon::empty();
        }
        let n = self.vertices.len();
        if n == 1 {
            return if h.holds(&self.vertices[0]) { self.clone() } else { Polygon::empty() };
        }
        let mut out = Vec::new();
        let m = if self.dim == 1 { 1 } else { n };
        for k in 0..m {
            let p = &self.vertices[k];
            let q = &self.vertices[(k + 1) % n];
            let (fp, fq) = (h.eval(p), h.eval(q));
            if !fp.is_positive() {
                out.push(p.clone());
            }
            if (fp.is_positive() && fq.is_negative()) || (fp.is_negative() && fq.is_positive()) {
                let t = &fp / (&fp - &fq);
                out.push((&p.0 + &t * (&q.0 - &p.0), &p.1 + &t * (&q.1 - &p.1)));
            }
            if self.dim == 1 && !fq.is_positive() {
                out.push(q.clone());
            }
        }
        Polygon::from_points(out)
    }

    /// Splits along a line into the `<=` part and the `>=` part.
    pub fn split(&self, line: &Constraint) -> (Polygon, Polygon) {
        (self.clip(line), self.clip(&line.flipped()))
    }

    pub fn centroid(&self) -> Pt {
        let n = Q::from_integer(self.vertices.len().into());
        let sx: Q = self.vertices.iter().map(|p| p.0.clone()).sum();
        let sy: Q = self.vertices.iter().map(|p| p.1.clone()).sum();
        (sx / &n, sy / n)
    }
}

fn cross(o: &Pt, a: &Pt, b: &Pt) -> Q {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Strict convex hull, counterclockwise, starting at the minimum by `(y, x)`.
pub fn hull(mut pts: Vec<Pt>) -> Vec<Pt> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return order_start(pts);
    }
    let mut lower: Vec<Pt> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Pt> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    order_start(lower)
}

fn order_start(mut v: Vec<Pt>) -> Vec<Pt> {
    if v.len() <= 1 {
        return v;
    }
    if v.len() == 2 {
        v.sort_by(|a, b| (&a.1, &a.0).cmp(&(&b.1, &b.0)));
        return v;
    }
    let k = (0..v.len()).min_by(|&a, &b| (&v[a].1, &v[a].0).cmp(&(&v[b].1, &v[b].0))).unwrap();
    v.rotate_left(k);
    v
}

/// Feasible region of a bounded system of half-planes.
pub fn solve_polygon(cons: &[Constraint]) -> Polygon {
    let mut cand = Vec::new();
    for (k, c1) in cons.iter().enumerate() {
        for c2 in &cons[k + 1..] {
            let det = &c1.a * &c2.b - &c1.b * &c2.a;
            if det.is_zero() {
                continue;
            }
            let x = (&c1.c * &c2.b - &c1.b * &c2.c) / &det;
            let y = (&c1.a * &c2.c - &c1.c * &c2.a) / &det;
            let p = (x, y);
            if cons.iter().all(|h| h.holds(&p)) {
                cand.push(p);
            }
        }
    }
    Polygon::from_points(cand)
}
