//! Natural endomorphisms of a module, as the null space of the naturality
//! equations `f_t A = A f_s`.
//!
//! Nodes joined by invertible maps are merged first: bases are changed along a
//! spanning tree so those maps become identities, and the merged nodes share
//! one unknown block.

use std::collections::{BTreeMap, VecDeque};

use crate::fp::{self, sparse_axpy, Mat, SparseCol};
use crate::persistence_module::PersistenceModule;

/// Null space of sparse rows over `F_p`, one dense vector per basis element.
pub fn sparse_nullspace(rows: Vec<SparseCol>, ncols: usize, p: u32) -> Vec<Vec<u32>> {
    // Echelon rows keyed by leading column, leading coefficient 1.
    let mut piv: BTreeMap<usize, SparseCol> = BTreeMap::new();
    for mut row in rows {
        loop {
            let Some(&(c, v)) = row.first() else { break };
            match piv.get(&c) {
                Some(pr) => row = sparse_axpy(&row, v, pr, p),
                None => {
                    let iv = fp::inv(v, p);
                    for e in row.iter_mut() {
                        e.1 = fp::mul(e.1, iv, p);
                    }
                    piv.insert(c, row);
                    break;
                }
            }
        }
    }
    // Back substitution from the right.
    let keys: Vec<usize> = piv.keys().rev().copied().collect();
    for c in keys {
        let mut row = piv.remove(&c).unwrap();
        loop {
            let hit = row.iter().skip(1).find(|(j, _)| piv.contains_key(j)).copied();
            match hit {
                Some((j, v)) => row = sparse_axpy(&row, v, &piv[&j], p),
                None => break,
            }
        }
        piv.insert(c, row);
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains_key(c)).collect();
    let mut slot = vec![usize::MAX; ncols];
    for (k, &f) in free.iter().enumerate() {
        slot[f] = k;
    }
    let mut basis = vec![vec![0u32; ncols]; free.len()];
    for (k, &f) in free.iter().enumerate() {
        basis[k][f] = 1;
    }
    for (&c, row) in &piv {
        for &(j, v) in row.iter().skip(1) {
            basis[slot[j]][c] = fp::neg(v, p);
        }
    }
    basis
}

struct Clusters {
    /// Cluster of each node.
    of: Vec<usize>,
    /// Per node, `T_v` with `f_v = T_v^{-1} F_c T_v`, and its inverse.
    t: Vec<Mat>,
    tinv: Vec<Mat>,
    /// Arrows inside a spanning tree of some cluster.
    tree: Vec<bool>,
    dims: Vec<usize>,
}

fn clusters(m: &PersistenceModule) -> Clusters {
    let p = m.prime;
    let n = m.nodes.len();
    let inverses: Vec<Option<Mat>> = m
        .arrows
        .iter()
        .zip(&m.maps)
        .map(|(&(s, t), a)| if m.dims[s] == m.dims[t] && m.dims[s] > 0 { a.inverse(p) } else { None })
        .collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, &(s, t)) in m.arrows.iter().enumerate() {
        if inverses[k].is_some() {
            adj[s].push(k);
            adj[t].push(k);
        }
    }
    let mut of = vec![usize::MAX; n];
    let mut t: Vec<Mat> = m.dims.iter().map(|&d| Mat::identity(d)).collect();
    let mut tinv = t.clone();
    let mut tree = vec![false; m.arrows.len()];
    let mut dims = Vec::new();
    for root in 0..n {
        if of[root] != usize::MAX {
            continue;
        }
        let c = dims.len();
        dims.push(m.dims[root]);
        of[root] = c;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &k in &adj[v] {
                let (s, tt) = m.arrows[k];
                let (w, new_t) = if s == v && of[tt] == usize::MAX {
                    (tt, t[s].mul(inverses[k].as_ref().unwrap(), p))
                } else if tt == v && of[s] == usize::MAX {
                    (s, t[tt].mul(&m.maps[k], p))
                } else {
                    continue;
                };
                of[w] = c;
                tinv[w] = new_t.inverse(p).expect("composite of invertible maps");
                t[w] = new_t;
                tree[k] = true;
                queue.push_back(w);
            }
        }
    }
    Clusters { of, t, tinv, tree, dims }
}

/// Basis of `End(M)`; each element is one square matrix per node.
pub fn endomorphism_basis(m: &PersistenceModule) -> Vec<Vec<Mat>> {
    let p = m.prime;
    let cl = clusters(m);
    let mut offset = Vec::with_capacity(cl.dims.len());
    let mut total = 0;
    for &d in &cl.dims {
        offset.push(total);
        total += d * d;
    }
    let var = |c: usize, i: usize, j: usize| offset[c] + i * cl.dims[c] + j;
    let mut rows: Vec<SparseCol> = Vec::new();
    for (k, (&(s, t), a)) in m.arrows.iter().zip(&m.maps).enumerate() {
        if cl.tree[k] || m.dims[s] == 0 || m.dims[t] == 0 {
            continue;
        }
        // F_ct B = B F_cs with B = T_t A T_s^{-1}.
        let b = cl.t[t].mul(a, p).mul(&cl.tinv[s], p);
        let (cs, ct) = (cl.of[s], cl.of[t]);
        let (ds, dt) = (m.dims[s], m.dims[t]);
        for i in 0..dt {
            for j in 0..ds {
                let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
                for kk in 0..dt {
                    let v = b.get(kk, j);
                    if v != 0 {
                        let e = acc.entry(var(ct, i, kk)).or_insert(0);
                        *e = fp::add(*e, v, p);
                    }
                }
                for kk in 0..ds {
                    let v = b.get(i, kk);
                    if v != 0 {
                        let e = acc.entry(var(cs, kk, j)).or_insert(0);
                        *e = fp::sub(*e, v, p);
                    }
                }
                let row: SparseCol = acc.into_iter().filter(|&(_, v)| v != 0).collect();
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    sparse_nullspace(rows, total, p)
        .into_iter()
        .map(|x| {
            (0..m.nodes.len())
                .map(|v| {
                    let c = cl.of[v];
                    let d = cl.dims[c];
                    let f = Mat { rows: d, cols: d, data: x[offset[c]..offset[c] + d * d].to_vec() };
                    cl.tinv[v].mul(&f, p).mul(&cl.t[v], p)
                })
                .collect()
        })
        .collect()
}

/// Whether per-node matrices `f` commute with every structure map.
pub fn is_natural(m: &PersistenceModule, f: &[Mat]) -> bool {
    m.arrows.iter().zip(&m.maps).all(|(&(s, t), a)| f[t].mul(a, m.prime) == a.mul(&f[s], m.prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence_module::Poset;

    const P: u32 = 32003;

    fn module(dims: Vec<usize>, arrows: Vec<(usize, usize)>, maps: Vec<Mat>) -> PersistenceModule {
        let n = dims.len();
        PersistenceModule {
            prime: P,
            degree: 0,
            poset: Poset::from_arrows(n, &arrows, vec![String::new(); n]),
            nodes: (0..n).collect(),
            dims,
            arrows,
            maps,
        }
    }

    #[test]
    fn nullspace_of_small_system() {
        // x0 + x1 = 0, x2 = 0 in 4 unknowns -> dimension 2
        let rows = vec![vec![(0, 1), (1, 1)], vec![(2, 1)]];
        let b = sparse_nullspace(rows, 4, P);
        assert_eq!(b.len(), 2);
        for v in &b {
            assert_eq!(fp::add(v[0], v[1], P), 0);
            assert_eq!(v[2], 0);
        }
    }

    #[test]
    fn interval_has_scalar_endomorphisms() {
        let m = module(vec![1, 1, 1], vec![(0, 1), (1, 2)], vec![Mat::identity(1), Mat::from_rows(&[vec![5]], 1)]);
        let e = endomorphism_basis(&m);
        assert_eq!(e.len(), 1);
        assert!(is_natural(&m, &e[0]));
    }

    #[test]
    fn two_disjoint_intervals() {
        // F -> F^2 <- F with independent images: intervals on {0, 1} and {1, 2}.
        let a = Mat::from_rows(&[vec![1], vec![0]], 1);
        let b = Mat::from_rows(&[vec![0], vec![1]], 1);
        let m = module(vec![1, 2, 1], vec![(0, 1), (2, 1)], vec![a, b]);
        let e = endomorphism_basis(&m);
        assert_eq!(e.len(), 2);
        assert!(e.iter().all(|f| is_natural(&m, f)));
    }
}
