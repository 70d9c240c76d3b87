//! Shared test helpers: random trees and a cubical-grid homology oracle.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;
use treeconf::metric_graph::MetricGraph;
use treeconf::rational::{q, Affine, Q};

const P: u64 = 32003;

/// Tree on `parents.len() + 1` vertices; vertex `i + 1` hangs off `parents[i] % (i + 1)`.
/// Lengths are in quarter units; `symbolic` makes the first edge have length `L`.
pub fn tree(parents: &[usize], quarters: &[i64], symbolic: bool, l: Q) -> MetricGraph {
    let n = parents.len() + 1;
    let vertices: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let edges = parents
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let len = if symbolic && i == 0 { Affine::l() } else { Affine::constant(q(quarters[i], 4)) };
            (format!("e{}", i + 1), format!("w{}", p % (i + 1)), format!("w{}", i + 1), len)
        })
        .collect();
    MetricGraph::build(vertices, edges, l).expect("random tree is valid")
}

/// `(parents, quarter lengths)` for trees with 1 to `max_edges` edges.
pub fn tree_shape(max_edges: usize) -> impl Strategy<Value = (Vec<usize>, Vec<i64>)> {
    (1..=max_edges).prop_flat_map(|m| (prop::collection::vec(0..8usize, m), prop::collection::vec(1..=8i64, m)))
}

fn union_find_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps
}

fn inv(a: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a % P, P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

/// Rank over `F_P` of sparse columns with entries in `{-1, 1}`.
fn rank(cols: Vec<Vec<(usize, i64)>>) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for col in cols {
        let mut v: BTreeMap<usize, u64> = col.into_iter().map(|(i, c)| (i, c.rem_euclid(P as i64) as u64)).collect();
        v.retain(|_, c| *c != 0);
        while let Some((&top, &c)) = v.iter().next_back() {
            match pivots.get(&top) {
                Some(pv) => {
                    let f = c * inv(pv.last().unwrap().1) % P;
                    for &(i, x) in pv {
                        let e = v.entry(i).or_insert(0);
                        *e = (*e + P - f * x % P) % P;
                        if *e == 0 {
                            v.remove(&i);
                        }
                    }
                }
                None => {
                    pivots.insert(top, v.into_iter().collect());
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Betti numbers of the union of grid cells of mesh `h` lying in `{d >= r}`.
/// Every edge length must be a multiple of `h`.
pub fn cubical_betti(g: &MetricGraph, r: &Q, h: &Q) -> [usize; 3] {
    let nv = g.num_vertices();
    // Grid points: graph vertices, then interior points edge by edge.
    let mut units = Vec::new();
    let mut edge_points: Vec<Vec<usize>> = Vec::new();
    let mut npts = nv;
    for e in 0..g.num_edges() {
        let u = g.edge_len(e) / h;
        assert!(u.is_integer() && u.is_positive(), "edge length not on the grid");
        let u = u.to_integer().to_usize().unwrap();
        let ed = g.edge(e);
        let mut pts = vec![ed.u];
        pts.extend(npts..npts + u - 1);
        pts.push(ed.v);
        npts += u - 1;
        units.push(u);
        edge_points.push(pts);
    }
    // All-pairs distances in grid units on the subdivided tree.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); npts];
    let mut segs = Vec::new();
    for pts in &edge_points {
        for w in pts.windows(2) {
            adj[w[0]].push(w[1]);
            adj[w[1]].push(w[0]);
            segs.push((w[0], w[1]));
        }
    }
    let mut dist = vec![vec![usize::MAX; npts]; npts];
    for s in 0..npts {
        let mut stack = vec![s];
        dist[s][s] = 0;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if dist[s][y] == usize::MAX {
                    dist[s][y] = dist[s][x] + 1;
                    stack.push(y);
                }
            }
        }
    }
    let ru = r / h;
    let ok = |a: usize, b: usize| Q::from_integer(dist[a][b].into()) >= ru;
    let mut vid = HashMap::new();
    for a in 0..npts {
        for b in 0..npts {
            if ok(a, b) {
                let k = vid.len();
                vid.insert((a, b), k);
            }
        }
    }
    let mut eid = HashMap::new();
    let mut d1 = Vec::new();
    for &(s0, s1) in &segs {
        for c in 0..npts {
            for (key, from, to) in [((0, s0, s1, c), (s0, c), (s1, c)), ((1, s0, s1, c), (c, s0), (c, s1))] {
                if let (Some(&x), Some(&y)) = (vid.get(&from), vid.get(&to)) {
                    eid.insert(key, d1.len());
                    d1.push(vec![(x, -1), (y, 1)]);
                }
            }
        }
    }
    let mut d2 = Vec::new();
    for &(a0, a1) in &segs {
        for &(b0, b1) in &segs {
            let get = |k| eid.get(&k).copied();
            let faces = [get((0, a0, a1, b0)), get((0, a0, a1, b1)), get((1, b0, b1, a0)), get((1, b0, b1, a1))];
            if let [Some(bot), Some(top), Some(left), Some(right)] = faces {
                // d(s x t) = (ds) x t - s x (dt)
                d2.push(vec![(right, 1), (left, -1), (top, -1), (bot, 1)]);
            }
        }
    }
    let edges: Vec<(usize, usize)> = d1.iter().map(|c| (c[0].0, c[1].0)).collect();
    let b0 = union_find_components(vid.len(), &edges);
    let r1 = vid.len() - b0;
    let r2 = rank(d2.clone());
    [b0, d1.len() - r1 - r2, d2.len() - r2]
}
