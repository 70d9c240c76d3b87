//! Finite metric trees with one optional symbolic length parameter `L`.
//!
//! Every edge length is an affine form `c + b*L` with `c, b >= 0`, not both
//! zero. A graph carries a current value of `L`, so concrete lengths are
//! always available; [`MetricGraph::with_l`] moves along the family.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, qi, Affine, Q};

/// An edge `u -- v`; the coordinate `t` on it runs from `u` (t = 0) to `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
    pub len: Affine,
}

#[derive(Clone, Debug)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    l: Q,
    adj: Vec<Vec<(usize, usize)>>,
    vdist: Vec<Vec<Affine>>,
    hops: Vec<Vec<usize>>,
}

/// A point of the graph in canonical form: endpoints are always vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphPoint {
    Vertex(usize),
    Interior(usize, Q),
}

impl GraphPoint {
    /// Combinatorial part: `(0, v)` for a vertex, `(1, e)` for an edge interior.
    pub fn anchor(&self) -> (u8, usize) {
        match self {
            GraphPoint::Vertex(v) => (0, *v),
            GraphPoint::Interior(e, _) => (1, *e),
        }
    }

    pub fn t(&self) -> Q {
        match self {
            GraphPoint::Vertex(_) => Q::zero(),
            GraphPoint::Interior(_, t) => t.clone(),
        }
    }
}

/// Orders points by anchors first, then positions.
pub fn cmp_point_pairs(a: &(GraphPoint, GraphPoint), b: &(GraphPoint, GraphPoint)) -> Ordering {
    (a.0.anchor(), a.1.anchor())
        .cmp(&(b.0.anchor(), b.1.anchor()))
        .then_with(|| a.0.t().cmp(&b.0.t()))
        .then_with(|| a.1.t().cmp(&b.1.t()))
}

/// A point of the parameter plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamPoint {
    pub r: Q,
    pub l: Q,
}

impl ParamPoint {
    pub fn new(r: Q, l: Q) -> Result<Self> {
        if !r.is_positive() || !l.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "parameters must be positive, got r={}, L={}",
                fmt_q(&r),
                fmt_q(&l)
            )));
        }
        Ok(ParamPoint { r, l })
    }
}

/// Text form of a graph: `{"vertices":[..], "edges":[{"id","u","v","len"}], "L": ".."}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub u: String,
    pub v: String,
    pub len: String,
}

impl MetricGraph {
    /// Validates and builds a tree. `edges` are `(id, u, v, len)` with vertex names.
    pub fn build(vertices: Vec<String>, edges: Vec<(String, String, String, Affine)>, l: Q) -> Result<Self> {
        if !l.is_positive() {
            return Err(Error::InvalidArgument("L must be positive".into()));
        }
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Parse(format!("duplicate vertex id {v}")));
            }
        }
        let mut ids = BTreeMap::new();
        let mut out = Vec::new();
        for (id, u, v, len) in edges {
            if ids.insert(id.clone(), ()).is_some() {
                return Err(Error::Parse(format!("duplicate edge id {id}")));
            }
            let ui = *index.get(&u).ok_or_else(|| Error::Parse(format!("unknown vertex {u}")))?;
            let vi = *index.get(&v).ok_or_else(|| Error::Parse(format!("unknown vertex {v}")))?;
            if ui == vi {
                return Err(Error::NotATree(format!("loop {id} at {u}; subdivide it first")));
            }
            if len.c.is_negative() || len.b.is_negative() || (len.c.is_zero() && len.b.is_zero()) {
                return Err(Error::NonPositiveLength(id));
            }
            out.push(Edge { id, u: ui, v: vi, len });
        }
        let n = vertices.len();
        if n == 0 {
            return Err(Error::NotATree("no vertices".into()));
        }
        if out.len() + 1 != n {
            return Err(Error::NotATree(format!("{} vertices but {} edges", n, out.len())));
        }
        let mut adj = vec![Vec::new(); n];
        for (e, ed) in out.iter().enumerate() {
            adj[ed.u].push((ed.v, e));
            adj[ed.v].push((ed.u, e));
        }
        let mut g = MetricGraph { vertices, edges: out, l, adj, vdist: Vec::new(), hops: Vec::new() };
        for s in 0..n {
            let (d, h) = g.bfs(s);
            if h.iter().any(|&x| x == usize::MAX) {
                return Err(Error::NotATree("graph is disconnected".into()));
            }
            g.vdist.push(d);
            g.hops.push(h);
        }
        Ok(g)
    }

    fn bfs(&self, s: usize) -> (Vec<Affine>, Vec<usize>) {
        let n = self.vertices.len();
        let mut d = vec![Affine::zero(); n];
        let mut h = vec![usize::MAX; n];
        h[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &(y, e) in &self.adj[x] {
                if h[y] == usize::MAX {
                    h[y] = h[x] + 1;
                    d[y] = d[x].clone() + self.edges[e].len.clone();
                    queue.push_back(y);
                }
            }
        }
        (d, h)
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        let l = match &spec.l {
            Some(s) => parse_q(s)?,
            None => qi(1),
        };
        let edges = spec
            .edges
            .iter()
            .map(|e| Ok((e.id.clone(), e.u.clone(), e.v.clone(), Affine::parse(&e.len)?)))
            .collect::<Result<Vec<_>>>()?;
        MetricGraph::build(spec.vertices.clone(), edges, l)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GraphSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        MetricGraph::from_spec(&spec)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    u: self.vertices[e.u].clone(),
                    v: self.vertices[e.v].clone(),
                    len: e.len.to_string(),
                })
                .collect(),
            l: if self.has_symbolic() { Some(fmt_q(&self.l)) } else { None },
        }
    }

    /// `Star_k`: edge `e1` has length `L`, the others length 1, all oriented away from the center.
    pub fn star(k: usize, l1: Q) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidArgument(format!("star needs k >= 3, got {k}")));
        }
        let mut vertices = vec!["c".to_string()];
        let mut edges = Vec::new();
        for i in 1..=k {
            vertices.push(format!("v{i}"));
            let len = if i == 1 { Affine::l() } else { Affine::constant(qi(1)) };
            edges.push((format!("e{i}"), "c".to_string(), format!("v{i}"), len));
        }
        MetricGraph::build(vertices, edges, l1)
    }

    /// Generalized H graph: hubs `a` (m-1 leaves) and `b` (n-1 leaves) joined by a
    /// bridge of length `L`, subdivided at `mid` into `f = a--mid` and `f' = b--mid`.
    pub fn generalized_h(m: usize, n: usize, l1: Q) -> Result<Self> {
        if m < 3 || n < 3 {
            return Err(Error::InvalidArgument(format!("generalized H needs m, n >= 3, got ({m}, {n})")));
        }
        let mut vertices = vec!["a".to_string(), "b".to_string(), "mid".to_string()];
        let mut edges = Vec::new();
        let one = Affine::constant(qi(1));
        for i in 2..=m {
            vertices.push(format!("l{i}"));
            edges.push((format!("e{i}"), "a".to_string(), format!("l{i}"), one.clone()));
        }
        for j in (m + 1)..(m + n) {
            vertices.push(format!("r{j}"));
            edges.push((format!("e{j}"), "b".to_string(), format!("r{j}"), one.clone()));
        }
        let half = Affine::new(Q::zero(), crate::rational::q(1, 2));
        edges.push(("f".to_string(), "a".to_string(), "mid".to_string(), half.clone()));
        edges.push(("f'".to_string(), "b".to_string(), "mid".to_string(), half));
        MetricGraph::build(vertices, edges, l1)
    }

    /// A single edge of length `len`.
    pub fn segment(len: Affine, l: Q) -> Result<Self> {
        MetricGraph::build(
            vec!["p".into(), "q".into()],
            vec![("e1".into(), "p".into(), "q".into(), len)],
            l,
        )
    }

    pub fn with_l(&self, l: &Q) -> MetricGraph {
        let mut g = self.clone();
        g.l = l.clone();
        g
    }

    pub fn l(&self) -> &Q {
        &self.l
    }

    pub fn has_symbolic(&self) -> bool {
        self.edges.iter().any(|e| !e.len.is_constant())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn edge_len(&self, e: usize) -> Q {
        self.edges[e].len.eval(&self.l)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Incident `(neighbor, edge)` pairs.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn vertex_distance_affine(&self, u: usize, v: usize) -> &Affine {
        &self.vdist[u][v]
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> Q {
        self.vdist[u][v].eval(&self.l)
    }

    pub fn hop_distance(&self, u: usize, v: usize) -> usize {
        self.hops[u][v]
    }

    /// Canonical point at coordinate `t` of edge `e`.
    pub fn point(&self, e: usize, t: Q) -> Result<GraphPoint> {
        if e >= self.edges.len() {
            return Err(Error::PointNotOnGraph(format!("no edge with index {e}")));
        }
        let len = self.edge_len(e);
        if t.is_negative() || t > len {
            return Err(Error::PointNotOnGraph(format!("t={} outside [0, {}]", fmt_q(&t), fmt_q(&len))));
        }
        Ok(if t.is_zero() {
            GraphPoint::Vertex(self.edges[e].u)
        } else if t == len {
            GraphPoint::Vertex(self.edges[e].v)
        } else {
            GraphPoint::Interior(e, t)
        })
    }

    /// Coordinate of `p` in the closed edge `e`, if `p` lies on it.
    pub fn coord_on(&self, p: &GraphPoint, e: usize) -> Option<Q> {
        match p {
            GraphPoint::Vertex(v) if *v == self.edges[e].u => Some(Q::zero()),
            GraphPoint::Vertex(v) if *v == self.edges[e].v => Some(self.edge_len(e)),
            GraphPoint::Interior(f, t) if *f == e => Some(t.clone()),
            _ => None,
        }
    }

    fn check_point(&self, p: &GraphPoint) -> Result<()> {
        match p {
            GraphPoint::Vertex(v) if *v < self.vertices.len() => Ok(()),
            GraphPoint::Interior(e, t) if *e < self.edges.len() => {
                if t.is_positive() && *t < self.edge_len(*e) {
                    Ok(())
                } else {
                    Err(Error::PointNotOnGraph(format!("{p:?} is not canonical")))
                }
            }
            _ => Err(Error::PointNotOnGraph(format!("{p:?}"))),
        }
    }

    /// `(endpoint, distance)` pairs from `p` to the ends of its carrier.
    fn exits(&self, p: &GraphPoint) -> Vec<(usize, Q)> {
        match p {
            GraphPoint::Vertex(v) => vec![(*v, Q::zero())],
            GraphPoint::Interior(e, t) => {
                let ed = &self.edges[*e];
                vec![(ed.u, t.clone()), (ed.v, self.edge_len(*e) - t)]
            }
        }
    }

    /// Path metric between two points.
    pub fn path_distance(&self, p: &GraphPoint, q: &GraphPoint) -> Result<Q> {
        self.check_point(p)?;
        self.check_point(q)?;
        if let (GraphPoint::Interior(e, t), GraphPoint::Interior(f, s)) = (p, q) {
            if e == f {
                return Ok((t - s).abs());
            }
        }
        let mut best: Option<Q> = None;
        for (a, da) in self.exits(p) {
            for (b, db) in self.exits(q) {
                let d = &da + &db + self.vertex_distance(a, b);
                if best.as_ref().is_none_or(|x| d < *x) {
                    best = Some(d);
                }
            }
        }
        Ok(best.expect("points have exits"))
    }

    /// The endpoint of edge `i` on the tree path towards edge `j` (`i != j`).
    pub fn near_endpoint(&self, i: usize, j: usize) -> usize {
        let (ei, ej) = (&self.edges[i], &self.edges[j]);
        let score = |x: usize| self.hops[x][ej.u].min(self.hops[x][ej.v]);
        if score(ei.u) <= score(ei.v) {
            ei.u
        } else {
            ei.v
        }
    }
}

/// Rewrites a spec so loops and parallel edges become simple paths.
/// A loop turns into three edges, a repeated parallel edge into two.
pub fn subdivide_spec(spec: &GraphSpec) -> Result<GraphSpec> {
    let mut out = GraphSpec { vertices: spec.vertices.clone(), edges: Vec::new(), l: spec.l.clone() };
    let mut seen = std::collections::BTreeSet::new();
    let mut fresh = 0usize;
    let mut new_vertex = |out: &mut GraphSpec| {
        loop {
            fresh += 1;
            let name = format!("s{fresh}");
            if !out.vertices.contains(&name) {
                out.vertices.push(name.clone());
                return name;
            }
        }
    };
    for e in &spec.edges {
        let len = Affine::parse(&e.len)?;
        let key = if e.u <= e.v { (e.u.clone(), e.v.clone()) } else { (e.v.clone(), e.u.clone()) };
        if e.u == e.v {
            let part = len.scale(&crate::rational::q(1, 3)).to_string();
            let a = new_vertex(&mut out);
            let b = new_vertex(&mut out);
            for (k, (x, y)) in [(e.u.clone(), a.clone()), (a, b.clone()), (b, e.u.clone())].into_iter().enumerate() {
                out.edges.push(EdgeSpec { id: format!("{}.{}", e.id, k + 1), u: x, v: y, len: part.clone() });
            }
        } else if !seen.insert(key) {
            let part = len.scale(&crate::rational::q(1, 2)).to_string();
            let m = new_vertex(&mut out);
            out.edges.push(EdgeSpec { id: format!("{}.1", e.id), u: e.u.clone(), v: m.clone(), len: part.clone() });
            out.edges.push(EdgeSpec { id: format!("{}.2", e.id), u: m, v: e.v.clone(), len: part });
        } else {
            out.edges.push(e.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn builders() {
        let s = MetricGraph::star(5, q(7, 2)).unwrap();
        assert_eq!((s.num_vertices(), s.num_edges()), (6, 5));
        assert_eq!(s.edge_len(0), q(7, 2));
        assert!(MetricGraph::star(2, qi(1)).is_err());
        let h = MetricGraph::generalized_h(4, 3, qi(1)).unwrap();
        assert_eq!((h.num_vertices(), h.num_edges()), (8, 7));
        assert!(MetricGraph::generalized_h(2, 3, qi(1)).is_err());
    }

    #[test]
    fn distances() {
        let y = MetricGraph::star(3, qi(1)).unwrap();
        let (l2, l3) = (GraphPoint::Vertex(2), GraphPoint::Vertex(3));
        assert_eq!(y.path_distance(&l2, &l3).unwrap(), qi(2));
        assert_eq!(y.path_distance(&l2, &l2).unwrap(), qi(0));
        let h = MetricGraph::generalized_h(3, 3, qi(2)).unwrap();
        let e2 = h.edge_index("e2").unwrap();
        let e4 = h.edge_index("e4").unwrap();
        let p = GraphPoint::Vertex(h.edge(e2).v);
        let r = GraphPoint::Vertex(h.edge(e4).v);
        assert_eq!(h.path_distance(&p, &r).unwrap(), qi(4));
    }

    #[test]
    fn canonical_points() {
        let y = MetricGraph::star(3, qi(2)).unwrap();
        assert_eq!(y.point(0, qi(0)).unwrap(), GraphPoint::Vertex(0));
        assert_eq!(y.point(0, qi(2)).unwrap(), GraphPoint::Vertex(1));
        assert_eq!(y.point(0, qi(1)).unwrap(), GraphPoint::Interior(0, qi(1)));
        assert!(y.point(0, qi(3)).is_err());
        let a = y.point(0, q(1, 2)).unwrap();
        let b = y.point(1, q(1, 4)).unwrap();
        assert_eq!(y.path_distance(&a, &b).unwrap(), q(3, 4));
    }

    #[test]
    fn rejects_bad_graphs() {
        let cyc = r#"{"vertices":["a","b","c"],"edges":[
            {"id":"x","u":"a","v":"b","len":"1"},{"id":"y","u":"b","v":"c","len":"1"},
            {"id":"z","u":"c","v":"a","len":"1"}]}"#;
        assert!(matches!(MetricGraph::from_json(cyc), Err(Error::NotATree(_))));
        let neg = r#"{"vertices":["a","b"],"edges":[{"id":"x","u":"a","v":"b","len":"0"}]}"#;
        assert!(matches!(MetricGraph::from_json(neg), Err(Error::NonPositiveLength(_))));
        let lp = r#"{"vertices":["a","b"],"edges":[{"id":"x","u":"a","v":"a","len":"1"}]}"#;
        assert!(matches!(MetricGraph::from_json(lp), Err(Error::NotATree(_))));
        assert!(matches!(MetricGraph::from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn spec_round_trip() {
        let h = MetricGraph::generalized_h(3, 4, q(3, 2)).unwrap();
        let back = MetricGraph::from_spec(&h.to_spec()).unwrap();
        assert_eq!(back.edges(), h.edges());
        assert_eq!(back.l(), h.l());
    }

    #[test]
    fn subdivide_loops() {
        let spec: GraphSpec = serde_json::from_str(
            r#"{"vertices":["a","b"],"edges":[{"id":"x","u":"a","v":"b","len":"1"},{"id":"o","u":"b","v":"b","len":"3"}]}"#,
        )
        .unwrap();
        let s = subdivide_spec(&spec).unwrap();
        assert_eq!(s.vertices.len(), 4);
        assert_eq!(s.edges.len(), 4);
        assert!(s.edges.iter().skip(1).all(|e| e.len == "1"));
    }
}
