//! Decomposition of chamber modules into indecomposable summands.
//!
//! A piece is split by a random natural endomorphism `f`: its generalized
//! eigenspaces for the roots of the characteristic polynomial in `F_p`, plus
//! the image of the product of the primary parts, are subrepresentations whose
//! sum is direct (Fitting). A piece whose endomorphism space is one-dimensional
//! is indecomposable.

pub mod endo;
pub mod poly;

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp::{self, Mat};
use crate::persistence_module::PersistenceModule;

pub use endo::{endomorphism_basis, is_natural, sparse_nullspace};

/// Attempts per piece before giving up.
pub const RETRY_BUDGET: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Classification {
    /// Support as ambient chamber ids, sorted.
    Interval { support: Vec<usize> },
    NonInterval,
}

/// A subrepresentation given by per-node inclusions `B_v` (`d_v x k_v`) and
/// projections `P_v` (`k_v x d_v`, `P_v B_v = I`) killing the other summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub inclusion: Vec<Mat>,
    pub projection: Vec<Mat>,
    pub dims: Vec<usize>,
    pub classification: Option<Classification>,
}

impl Summand {
    fn new(inclusion: Vec<Mat>, projection: Vec<Mat>) -> Summand {
        let dims = inclusion.iter().map(|b| b.cols).collect();
        Summand { inclusion, projection, dims, classification: None }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_thin(&self) -> bool {
        self.dims.iter().all(|&d| d <= 1)
    }

    /// Ambient ids of the nodes where the summand is nonzero.
    pub fn support(&self, m: &PersistenceModule) -> Vec<usize> {
        let mut s: Vec<usize> = (0..m.nodes.len()).filter(|&v| self.dims[v] > 0).map(|v| m.nodes[v]).collect();
        s.sort_unstable();
        s
    }

    /// `(ambient id, dimension)` over the support, sorted.
    pub fn dim_vector(&self, m: &PersistenceModule) -> Vec<(usize, usize)> {
        let mut s: Vec<(usize, usize)> =
            (0..m.nodes.len()).filter(|&v| self.dims[v] > 0).map(|v| (m.nodes[v], self.dims[v])).collect();
        s.sort_unstable();
        s
    }
}

/// The summand as a module in its own coordinates: maps `P_t A B_s`.
pub fn summand_module(m: &PersistenceModule, s: &Summand) -> PersistenceModule {
    let p = m.prime;
    let maps = m
        .arrows
        .iter()
        .zip(&m.maps)
        .map(|(&(a, b), f)| s.projection[b].mul(&f.mul(&s.inclusion[a], p), p))
        .collect();
    PersistenceModule {
        prime: p,
        degree: m.degree,
        poset: m.poset.clone(),
        nodes: m.nodes.clone(),
        dims: s.dims.clone(),
        arrows: m.arrows.clone(),
        maps,
    }
}

/// Splits the module along a basis change `[C^1 | C^2 | ...]` at every node.
fn split_by_columns(parts: Vec<Vec<Mat>>, p: u32) -> Vec<Summand> {
    let n = parts.first().map_or(0, |x| x.len());
    let mut projections: Vec<Vec<Mat>> = vec![Vec::with_capacity(n); parts.len()];
    for v in 0..n {
        let mut s = Mat::zeros(parts[0][v].rows, 0);
        for part in &parts {
            s = s.hstack(&part[v]);
        }
        let q = s.inverse(p).expect("complementary subspaces");
        let mut row = 0;
        for (i, part) in parts.iter().enumerate() {
            let k = part[v].cols;
            let rows: Vec<Vec<u32>> = (row..row + k).map(|r| q.row(r).to_vec()).collect();
            projections[i].push(Mat::from_rows(&rows, q.cols));
            row += k;
        }
    }
    parts.into_iter().zip(projections).map(|(b, pr)| Summand::new(b, pr)).collect()
}

/// `(ker f^n, im f^n)` with `n` the fiber dimension at each node.
pub fn fitting_split(m: &PersistenceModule, f: &[Mat]) -> (Summand, Summand) {
    let p = m.prime;
    let mut ker = Vec::with_capacity(f.len());
    let mut im = Vec::with_capacity(f.len());
    for (v, fv) in f.iter().enumerate() {
        let pw = fv.pow(m.dims[v], p);
        ker.push(pw.nullspace(p));
        im.push(pw.colspace(p));
    }
    let mut out = split_by_columns(vec![ker, im], p);
    let b = out.pop().unwrap();
    let a = out.pop().unwrap();
    (a, b)
}

/// Generalized eigenspaces of `f` for its eigenvalues in `F_p` and the
/// complementary invariant part; only nonzero parts are returned.
fn eigen_split<R: Rng>(m: &PersistenceModule, f: &[Mat], rng: &mut R) -> Vec<Vec<Mat>> {
    let p = m.prime;
    let mut eig: Vec<u32> = Vec::new();
    for fv in f {
        if fv.rows > 0 {
            eig.extend(poly::roots(&poly::charpoly(fv, p), p, rng));
        }
    }
    eig.sort_unstable();
    eig.dedup();
    let mut parts: Vec<Vec<Mat>> = Vec::new();
    let mut rest: Vec<Mat> = m.dims.iter().map(|&d| Mat::identity(d)).collect();
    for &lam in &eig {
        let mut part = Vec::with_capacity(f.len());
        for (v, fv) in f.iter().enumerate() {
            let pw = fv.shift(lam, p).pow(m.dims[v], p);
            part.push(pw.nullspace(p));
            rest[v] = rest[v].mul(&pw, p);
        }
        parts.push(part);
    }
    parts.push(rest.iter().map(|r| r.colspace(p)).collect());
    parts.retain(|part| part.iter().any(|b| b.cols > 0));
    parts
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random stream of the piece reached by the child indices `path`.
fn piece_rng(seed: u64, path: &[u32]) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for &c in path {
        h = splitmix(h ^ (c as u64 + 1));
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn random_combination<R: Rng>(basis: &[Vec<Mat>], p: u32, rng: &mut R) -> Vec<Mat> {
    let mut f: Vec<Mat> = basis[0].iter().map(|b| Mat::zeros(b.rows, b.cols)).collect();
    for e in basis {
        let c = rng.gen_range(0..p);
        for (fv, ev) in f.iter_mut().zip(e) {
            *fv = fv.add(&ev.scale(c, p), p);
        }
    }
    f
}

fn compose(outer: &Summand, inner: &Summand, p: u32) -> Summand {
    let inclusion = outer.inclusion.iter().zip(&inner.inclusion).map(|(a, b)| a.mul(b, p)).collect();
    let projection = inner.projection.iter().zip(&outer.projection).map(|(a, b)| a.mul(b, p)).collect();
    Summand::new(inclusion, projection)
}

/// Complete decomposition into indecomposables, each classified. The result
/// depends only on `m` and `seed`.
pub fn decompose(m: &PersistenceModule, seed: u64) -> Result<Vec<Summand>> {
    m.validate()?;
    let p = m.prime;
    let root = Summand::new(
        m.dims.iter().map(|&d| Mat::identity(d)).collect(),
        m.dims.iter().map(|&d| Mat::identity(d)).collect(),
    );
    let mut done: Vec<(Vec<u32>, Summand)> = Vec::new();
    let mut queue: VecDeque<(Vec<u32>, Summand)> = VecDeque::from([(Vec::new(), root)]);
    while let Some((path, piece)) = queue.pop_front() {
        if piece.total_dim() == 0 {
            continue;
        }
        let sub = summand_module(m, &piece);
        let end = endomorphism_basis(&sub);
        if end.len() == 1 {
            done.push((path, piece));
            continue;
        }
        let mut rng = piece_rng(seed, &path);
        let mut split = None;
        for _ in 0..RETRY_BUDGET {
            let f = random_combination(&end, p, &mut rng);
            let parts = eigen_split(&sub, &f, &mut rng);
            if parts.len() >= 2 {
                split = Some(split_by_columns(parts, p));
                break;
            }
        }
        let Some(children) = split else {
            return Err(Error::IndecomposabilityUndecided(piece.total_dim(), RETRY_BUDGET));
        };
        for (i, child) in children.into_iter().enumerate() {
            let mut cp = path.clone();
            cp.push(i as u32);
            queue.push_back((cp, compose(&piece, &child, p)));
        }
    }
    done.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = Vec::with_capacity(done.len());
    for (_, mut s) in done {
        s.classification = Some(classify_summand(m, &s)?);
        out.push(s);
    }
    Ok(out)
}

fn convex(m: &PersistenceModule, support: &[usize]) -> bool {
    let inside: std::collections::BTreeSet<usize> = support.iter().copied().collect();
    let po = &m.poset;
    for &a in support {
        for &b in support {
            if a != b && po.leq(a, b) {
                for c in 0..po.n {
                    if po.leq(a, c) && po.leq(c, b) && !inside.contains(&c) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn zigzag_connected(m: &PersistenceModule, support: &[usize]) -> bool {
    let Some(&first) = support.first() else { return false };
    let mut seen = vec![false; support.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([first]);
    while let Some(a) = queue.pop_front() {
        for (i, &b) in support.iter().enumerate() {
            if !seen[i] && (m.poset.leq(a, b) || m.poset.leq(b, a)) {
                seen[i] = true;
                queue.push_back(b);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Scalars `w_v` on the support with `w_t = a * w_s` for every arrow whose map
/// in the summand is the scalar `a`; rescaling the basis by them turns every
/// internal map into the identity. `None` unless the summand is thin and such
/// a rescaling exists with all internal maps nonzero.
pub fn interval_witness(m: &PersistenceModule, s: &Summand) -> Option<Vec<u32>> {
    if !s.is_thin() {
        return None;
    }
    let p = m.prime;
    let sub = summand_module(m, s);
    let n = m.nodes.len();
    let inside: Vec<bool> = s.dims.iter().map(|&d| d == 1).collect();
    let start = inside.iter().position(|&x| x)?;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, &(a, b)) in sub.arrows.iter().enumerate() {
        if inside[a] && inside[b] {
            if sub.maps[k].get(0, 0) == 0 {
                return None;
            }
            adj[a].push(k);
            adj[b].push(k);
        }
    }
    let mut w = vec![0u32; n];
    w[start] = 1;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &k in &adj[v] {
            let (a, b) = sub.arrows[k];
            let c = sub.maps[k].get(0, 0);
            let (u, val) = if a == v { (b, fp::mul(w[a], c, p)) } else { (a, fp::mul(w[b], fp::inv(c, p), p)) };
            if w[u] == 0 {
                w[u] = val;
                queue.push_back(u);
            }
        }
    }
    if (0..n).any(|v| inside[v] && w[v] == 0) {
        return None;
    }
    let consistent = sub.arrows.iter().zip(&sub.maps).all(|(&(a, b), f)| {
        !(inside[a] && inside[b]) || w[b] == fp::mul(w[a], f.get(0, 0), p)
    });
    consistent.then_some(w)
}

/// Interval if thin with convex, zigzag-connected support and an explicit
/// isomorphism to the interval module; otherwise non-interval.
pub fn classify_summand(m: &PersistenceModule, s: &Summand) -> Result<Classification> {
    if s.total_dim() == 0 {
        return Err(Error::InvalidArgument("zero summand".into()));
    }
    let support = s.support(m);
    if s.is_thin() && convex(m, &support) && zigzag_connected(m, &support) && interval_witness(m, s).is_some() {
        Ok(Classification::Interval { support })
    } else {
        Ok(Classification::NonInterval)
    }
}

/// Basis of natural maps `U -> V` between modules on the same arrows.
pub fn hom_basis(u: &PersistenceModule, v: &PersistenceModule) -> Vec<Vec<Mat>> {
    let p = u.prime;
    let n = u.nodes.len();
    let mut offset = Vec::with_capacity(n);
    let mut total = 0;
    for x in 0..n {
        offset.push(total);
        total += v.dims[x] * u.dims[x];
    }
    // h_x is dims_v[x] x dims_u[x], row-major.
    let var = |x: usize, i: usize, j: usize| offset[x] + i * u.dims[x] + j;
    let mut rows: Vec<fp::SparseCol> = Vec::new();
    for (k, &(s, t)) in u.arrows.iter().enumerate() {
        let (au, av) = (&u.maps[k], &v.maps[k]);
        // h_t A^U - A^V h_s = 0, entry (i, j): i < dv[t], j < du[s].
        for i in 0..v.dims[t] {
            for j in 0..u.dims[s] {
                let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
                for kk in 0..u.dims[t] {
                    let c = au.get(kk, j);
                    if c != 0 {
                        let e = acc.entry(var(t, i, kk)).or_insert(0);
                        *e = fp::add(*e, c, p);
                    }
                }
                for kk in 0..v.dims[s] {
                    let c = av.get(i, kk);
                    if c != 0 {
                        let e = acc.entry(var(s, kk, j)).or_insert(0);
                        *e = fp::sub(*e, c, p);
                    }
                }
                let row: fp::SparseCol = acc.into_iter().filter(|&(_, c)| c != 0).collect();
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    sparse_nullspace(rows, total, p)
        .into_iter()
        .map(|x| {
            (0..n)
                .map(|y| Mat { rows: v.dims[y], cols: u.dims[y], data: x[offset[y]..offset[y] + v.dims[y] * u.dims[y]].to_vec() })
                .collect()
        })
        .collect()
}

/// An invertible natural map `U -> V`, searched among random elements of
/// `Hom(U, V)`. For modules with local endomorphism rings a miss after the
/// given number of draws means non-isomorphic with probability at least
/// `1 - (dim/p)^draws`.
pub fn find_isomorphism(u: &PersistenceModule, v: &PersistenceModule, draws: usize, seed: u64) -> Option<Vec<Mat>> {
    if u.dims != v.dims {
        return None;
    }
    let hom = hom_basis(u, v);
    if hom.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..draws {
        let h = random_combination(&hom, u.prime, &mut rng);
        if h.iter().all(|x| x.inverse(u.prime).is_some()) {
            return Some(h);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ClassKind {
    Interval { support: Vec<usize> },
    NonInterval { dims: Vec<(usize, usize)> },
}

impl ClassKind {
    pub fn is_interval(&self) -> bool {
        matches!(self, ClassKind::Interval { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub kind: ClassKind,
    pub multiplicity: usize,
    /// Indices into the summand list.
    pub members: Vec<usize>,
}

/// Groups summands into isomorphism classes, sorted by descriptor.
pub fn multiplicity_table(m: &PersistenceModule, summands: &[Summand]) -> Vec<ClassEntry> {
    let mut entries: Vec<ClassEntry> = Vec::new();
    let mut reps: Vec<Option<PersistenceModule>> = Vec::new();
    for (i, s) in summands.iter().enumerate() {
        let class = match &s.classification {
            Some(c) => c.clone(),
            None => classify_summand(m, s).unwrap_or(Classification::NonInterval),
        };
        match class {
            Classification::Interval { support } => {
                let kind = ClassKind::Interval { support };
                match entries.iter_mut().find(|e| e.kind == kind) {
                    Some(e) => {
                        e.multiplicity += 1;
                        e.members.push(i);
                    }
                    None => {
                        entries.push(ClassEntry { kind, multiplicity: 1, members: vec![i] });
                        reps.push(None);
                    }
                }
            }
            Classification::NonInterval => {
                let kind = ClassKind::NonInterval { dims: s.dim_vector(m) };
                let sm = summand_module(m, s);
                let hit = entries.iter().zip(&reps).position(|(e, r)| {
                    e.kind == kind && r.as_ref().is_some_and(|r| find_isomorphism(&sm, r, 16, 0).is_some())
                });
                match hit {
                    Some(k) => {
                        entries[k].multiplicity += 1;
                        entries[k].members.push(i);
                    }
                    None => {
                        entries.push(ClassEntry { kind, multiplicity: 1, members: vec![i] });
                        reps.push(Some(sm));
                    }
                }
            }
        }
    }
    entries.sort_by(|a, b| a.kind.cmp(&b.kind).then(a.members.cmp(&b.members)));
    entries
}

/// Checks of a decomposition, each failure described.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DecompositionReport {
    pub summands: usize,
    pub violations: Vec<String>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies that the summands are natural, that `P B = I`, that their
/// inclusions fill every fiber, and that each has a one-dimensional
/// endomorphism space.
pub fn verify_decomposition(m: &PersistenceModule, summands: &[Summand]) -> DecompositionReport {
    let p = m.prime;
    let mut rep = DecompositionReport { summands: summands.len(), violations: Vec::new() };
    for v in 0..m.nodes.len() {
        let mut s = Mat::zeros(m.dims[v], 0);
        for x in summands {
            s = s.hstack(&x.inclusion[v]);
        }
        if s.cols != m.dims[v] || s.inverse(p).is_none() {
            rep.violations.push(format!("chamber {}: inclusions do not form a basis", m.nodes[v]));
        }
    }
    for (i, x) in summands.iter().enumerate() {
        for v in 0..m.nodes.len() {
            if !x.projection[v].mul(&x.inclusion[v], p).is_identity() {
                rep.violations.push(format!("summand {i}: projection is not a left inverse at chamber {}", m.nodes[v]));
            }
        }
        for (k, (&(a, b), f)) in m.arrows.iter().zip(&m.maps).enumerate() {
            let img = f.mul(&x.inclusion[a], p);
            if img != x.inclusion[b].mul(&x.projection[b].mul(&img, p), p) {
                rep.violations.push(format!("summand {i}: not closed under arrow {k}"));
            }
        }
        let e = endomorphism_basis(&summand_module(m, x)).len();
        if e != 1 {
            rep.violations.push(format!("summand {i}: endomorphism space has dimension {e}"));
        }
    }
    rep
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

    /// `F -> F^2 <- F` with independent images.
    fn two_intervals() -> PersistenceModule {
        let a = Mat::from_rows(&[vec![1], vec![0]], 1);
        let b = Mat::from_rows(&[vec![0], vec![1]], 1);
        module(vec![1, 2, 1], vec![(0, 1), (2, 1)], vec![a, b])
    }

    #[test]
    fn fitting_trivial_cases() {
        let m = two_intervals();
        let id: Vec<Mat> = m.dims.iter().map(|&d| Mat::identity(d)).collect();
        let (k, i) = fitting_split(&m, &id);
        assert_eq!((k.total_dim(), i.total_dim()), (0, 4));
        let zero: Vec<Mat> = m.dims.iter().map(|&d| Mat::zeros(d, d)).collect();
        let (k, i) = fitting_split(&m, &zero);
        assert_eq!((k.total_dim(), i.total_dim()), (4, 0));
    }

    #[test]
    fn fitting_separates_eigenvalues() {
        let m = two_intervals();
        // 0 on the first interval, 1 on the second.
        let f = vec![Mat::zeros(1, 1), Mat::from_rows(&[vec![0, 0], vec![0, 1]], 2), Mat::identity(1)];
        assert!(is_natural(&m, &f));
        let (k, i) = fitting_split(&m, &f);
        assert_eq!(k.dims, vec![1, 1, 0]);
        assert_eq!(i.dims, vec![0, 1, 1]);
    }

    #[test]
    fn decomposes_two_intervals() {
        let m = two_intervals();
        let s = decompose(&m, 3).unwrap();
        assert_eq!(s.len(), 2);
        assert!(verify_decomposition(&m, &s).passed());
        let t = multiplicity_table(&m, &s);
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|e| e.kind.is_interval() && e.multiplicity == 1));
    }

    #[test]
    fn repeated_interval_has_multiplicity() {
        // F^3 -> F^3 identity: three copies of one interval.
        let m = module(vec![3, 3], vec![(0, 1)], vec![Mat::identity(3)]);
        let s = decompose(&m, 11).unwrap();
        let t = multiplicity_table(&m, &s);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].multiplicity, 3);
        assert_eq!(t[0].kind, ClassKind::Interval { support: vec![0, 1] });
    }

    #[test]
    fn four_subspace_type_module_is_not_interval() {
        // Three lines in F^2 in general position: indecomposable, not thin.
        let maps = vec![
            Mat::from_rows(&[vec![1], vec![0]], 1),
            Mat::from_rows(&[vec![0], vec![1]], 1),
            Mat::from_rows(&[vec![1], vec![1]], 1),
        ];
        let m = module(vec![1, 1, 1, 2], vec![(0, 3), (1, 3), (2, 3)], maps);
        let s = decompose(&m, 5).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].classification, Some(Classification::NonInterval));
        assert!(verify_decomposition(&m, &s).passed());
    }

    #[test]
    fn non_convex_support_is_not_interval() {
        // 0 -> 1 -> 2 with the middle fiber zero is not a valid thin interval.
        let m = module(vec![1, 0, 1], vec![(0, 1), (1, 2)], vec![Mat::zeros(0, 1), Mat::zeros(1, 0)]);
        let s = decompose(&m, 1).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|x| matches!(x.classification, Some(Classification::Interval { .. }))));
        let whole = Summand::new(
            m.dims.iter().map(|&d| Mat::identity(d)).collect(),
            m.dims.iter().map(|&d| Mat::identity(d)).collect(),
        );
        assert_eq!(classify_summand(&m, &whole).unwrap(), Classification::NonInterval);
    }

    #[test]
    fn seeds_agree() {
        let m = module(vec![2, 3], vec![(0, 1)], vec![Mat::from_rows(&[vec![1, 0], vec![0, 1], vec![0, 0]], 2)]);
        let a = multiplicity_table(&m, &decompose(&m, 1).unwrap());
        let b = multiplicity_table(&m, &decompose(&m, 99).unwrap());
        let strip = |t: &[ClassEntry]| t.iter().map(|e| (e.kind.clone(), e.multiplicity)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(strip(&a).len(), 2);
    }
}
