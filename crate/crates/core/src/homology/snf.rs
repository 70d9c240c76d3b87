//! Smith normal form over the integers.
//!
//! The elimination runs on `i64` with checked arithmetic and restarts on
//! `BigInt` when an intermediate value overflows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub trait SnfInt: Clone + Eq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn abs_cmp_lt(&self, o: &Self) -> bool;
    fn c_add(&self, o: &Self) -> Option<Self>;
    fn c_mul(&self, o: &Self) -> Option<Self>;
    fn c_neg(&self) -> Option<Self>;
    fn div_floor(&self, o: &Self) -> Self;
    fn divides(&self, o: &Self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl SnfInt for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_cmp_lt(&self, o: &Self) -> bool {
        self.unsigned_abs() < o.unsigned_abs()
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn c_neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn divides(&self, o: &Self) -> bool {
        *self != 0 && o % self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl SnfInt for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_cmp_lt(&self, o: &Self) -> bool {
        self.abs() < o.abs()
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn c_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn divides(&self, o: &Self) -> bool {
        !Zero::is_zero(self) && Zero::is_zero(&(o % self))
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// `U * M * V = S` with `S` diagonal, `d_1 | d_2 | ...`, `d_i >= 0`, and `U`, `V` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub s: Vec<Vec<BigInt>>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

impl SnfResult {
    /// Nonzero diagonal entries.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.len().min(self.s.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.s[i][i].clone()).filter(|d| !Zero::is_zero(d)).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

struct Work<T> {
    s: Vec<Vec<T>>,
    u: Option<Vec<Vec<T>>>,
    v: Option<Vec<Vec<T>>>,
    m: usize,
    n: usize,
}

fn identity<T: SnfInt>(k: usize) -> Vec<Vec<T>> {
    (0..k).map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

impl<T: SnfInt> Work<T> {
    // row_i += c * row_k
    fn row_add(&mut self, i: usize, k: usize, c: &T) -> Option<()> {
        for j in 0..self.n {
            let x = self.s[k][j].c_mul(c)?;
            self.s[i][j] = self.s[i][j].c_add(&x)?;
        }
        if let Some(u) = &mut self.u {
            for j in 0..u[0].len() {
                let x = u[k][j].c_mul(c)?;
                u[i][j] = u[i][j].c_add(&x)?;
            }
        }
        Some(())
    }

    // col_j += c * col_k
    fn col_add(&mut self, j: usize, k: usize, c: &T) -> Option<()> {
        for i in 0..self.m {
            let x = self.s[i][k].c_mul(c)?;
            self.s[i][j] = self.s[i][j].c_add(&x)?;
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                let x = row[k].c_mul(c)?;
                row[j] = row[j].c_add(&x)?;
            }
        }
        Some(())
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        self.s.swap(a, b);
        if let Some(u) = &mut self.u {
            u.swap(a, b);
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        for r in &mut self.s {
            r.swap(a, b);
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                r.swap(a, b);
            }
        }
    }

    fn row_neg(&mut self, i: usize) -> Option<()> {
        for j in 0..self.n {
            self.s[i][j] = self.s[i][j].c_neg()?;
        }
        if let Some(u) = &mut self.u {
            for x in u[i].iter_mut() {
                *x = x.c_neg()?;
            }
        }
        Some(())
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m {
            for j in t..self.n {
                if self.s[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| self.s[i][j].abs_cmp_lt(&self.s[bi][bj])) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(&mut self) -> Option<()> {
        let k = self.m.min(self.n);
        for t in 0..k {
            let Some((pi, pj)) = self.min_entry(t) else { break };
            self.row_swap(t, pi);
            self.col_swap(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..self.m {
                    if !self.s[i][t].is_zero() {
                        let q = self.s[i][t].div_floor(&self.s[t][t]).c_neg()?;
                        self.row_add(i, t, &q)?;
                        if !self.s[i][t].is_zero() {
                            clean = false;
                        }
                    }
                }
                for j in t + 1..self.n {
                    if !self.s[t][j].is_zero() {
                        let q = self.s[t][j].div_floor(&self.s[t][t]).c_neg()?;
                        self.col_add(j, t, &q)?;
                        if !self.s[t][j].is_zero() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    // bring the smallest remaining entry of row/column t to the pivot
                    let mut best = (t, t);
                    for i in t + 1..self.m {
                        if !self.s[i][t].is_zero() && self.s[i][t].abs_cmp_lt(&self.s[best.0][best.1]) {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..self.n {
                        if !self.s[t][j].is_zero() && self.s[t][j].abs_cmp_lt(&self.s[best.0][best.1]) {
                            best = (t, j);
                        }
                    }
                    self.row_swap(t, best.0);
                    self.col_swap(t, best.1);
                    continue;
                }
                let bad = (t + 1..self.m)
                    .find(|&i| (t + 1..self.n).any(|j| !self.s[t][t].divides(&self.s[i][j])));
                match bad {
                    Some(i) => self.row_add(t, i, &T::one())?,
                    None => break,
                }
            }
            if self.s[t][t].is_negative() {
                self.row_neg(t)?;
            }
        }
        Some(())
    }
}

fn big(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn to_big<T: SnfInt>(m: Vec<Vec<T>>) -> Vec<Vec<BigInt>> {
    m.into_iter().map(|r| r.into_iter().map(|x| x.to_big()).collect()).collect()
}

fn snf_generic<T: SnfInt>(m: Vec<Vec<T>>, rows: usize, cols: usize, transforms: bool) -> Option<SnfResult> {
    let mut w = Work {
        s: m,
        u: transforms.then(|| identity::<T>(rows)),
        v: transforms.then(|| identity::<T>(cols)),
        m: rows,
        n: cols,
    };
    w.run()?;
    Some(SnfResult {
        s: to_big(w.s),
        u: to_big(w.u.unwrap_or_default()),
        v: to_big(w.v.unwrap_or_default()),
    })
}

/// Smith normal form of an integer matrix given by rows.
pub fn smith_normal_form(m: &[Vec<i64>]) -> SnfResult {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    snf_generic(m.to_vec(), rows, cols, true)
        .or_else(|| snf_generic(big(m), rows, cols, true))
        .expect("BigInt elimination cannot overflow")
}

/// Checks `U * M * V = S`, unimodularity of `U` and `V`, and the divisibility chain.
pub fn verify_snf(m: &[Vec<i64>], r: &SnfResult) -> bool {
    let mm = big(m);
    let prod = |a: &Vec<Vec<BigInt>>, b: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
        let (n, k, p) = (a.len(), b.len(), b.first().map_or(0, |x| x.len()));
        (0..n)
            .map(|i| (0..p).map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum()).collect())
            .collect()
    };
    let rows = m.len();
    let cols = m.first().map_or(0, |x| x.len());
    if rows == 0 || cols == 0 {
        return true;
    }
    if prod(&prod(&r.u, &mm), &r.v) != r.s {
        return false;
    }
    for i in 0..rows {
        for j in 0..cols {
            if i != j && !Zero::is_zero(&r.s[i][j]) {
                return false;
            }
        }
    }
    let d = r.diagonal();
    if d.iter().any(Signed::is_negative) || d.windows(2).any(|w| !Zero::is_zero(&(&w[1] % &w[0]))) {
        return false;
    }
    det(&r.u).abs().is_one() && det(&r.v).abs().is_one()
}

/// Determinant by fraction-free elimination (Bareiss).
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return <BigInt as One>::one();
    }
    let mut a = m.to_vec();
    let mut sign = <BigInt as One>::one();
    let mut prev = <BigInt as One>::one();
    for k in 0..n - 1 {
        if Zero::is_zero(&a[k][k]) {
            let Some(s) = (k + 1..n).find(|&i| !Zero::is_zero(&a[i][k])) else { return <BigInt as Zero>::zero() };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Nonzero invariant factors of a sparse integer matrix given by columns.
///
/// Unit pivots are eliminated sparsely first; whatever is left goes through the
/// dense algorithm.
pub fn invariant_factors(cols: &[Vec<(usize, i64)>], nrows: usize) -> Vec<BigInt> {
    match sparse_units(cols, nrows) {
        Some((units, rest)) => {
            let mut out = vec![<BigInt as One>::one(); units];
            if !rest.is_empty() && !rest[0].is_empty() {
                let (r, c) = (rest.len(), rest[0].len());
                let res = snf_generic(rest.clone(), r, c, false).or_else(|| snf_generic(big(&rest), r, c, false)).unwrap();
                out.extend(res.diagonal());
            }
            out.sort();
            out
        }
        None => {
            let mut dense = vec![vec![0i64; cols.len()]; nrows];
            for (j, c) in cols.iter().enumerate() {
                for &(i, v) in c {
                    dense[i][j] += v;
                }
            }
            let (r, c) = (nrows, cols.len());
            let res = snf_generic(big(&dense), r, c, false).unwrap();
            let mut d = res.diagonal();
            d.sort();
            d
        }
    }
}

type SparseI = BTreeMap<usize, i64>;

fn sparse_units(cols: &[Vec<(usize, i64)>], nrows: usize) -> Option<(usize, Vec<Vec<i64>>)> {
    let mut cs: Vec<SparseI> = cols
        .iter()
        .map(|c| {
            let mut m = SparseI::new();
            for &(i, v) in c {
                *m.entry(i).or_default() += v;
            }
            m.retain(|_, v| *v != 0);
            m
        })
        .collect();
    let mut rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nrows];
    for (j, c) in cs.iter().enumerate() {
        for &i in c.keys() {
            rows[i].insert(j);
        }
    }
    let mut alive = vec![true; cs.len()];
    let mut units = 0;
    loop {
        let mut pick: Option<(usize, usize, usize)> = None;
        for (j, c) in cs.iter().enumerate() {
            if !alive[j] {
                continue;
            }
            for (&i, &v) in c {
                if v.abs() == 1 {
                    let w = rows[i].len();
                    if pick.is_none_or(|(_, _, bw)| w < bw) {
                        pick = Some((j, i, w));
                    }
                }
            }
        }
        let Some((j, i, _)) = pick else { break };
        let u = cs[j][&i];
        let pivot_col = cs[j].clone();
        let others: Vec<usize> = rows[i].iter().copied().filter(|&k| k != j).collect();
        for k in others {
            let a = cs[k][&i];
            let f = a.checked_mul(u)?;
            for (&r, &pv) in &pivot_col {
                let cur = cs[k].get(&r).copied().unwrap_or(0);
                let nv = cur.checked_sub(f.checked_mul(pv)?)?;
                if nv == 0 {
                    cs[k].remove(&r);
                    rows[r].remove(&k);
                } else {
                    cs[k].insert(r, nv);
                    rows[r].insert(k);
                }
            }
        }
        for &r in pivot_col.keys() {
            rows[r].remove(&j);
        }
        alive[j] = false;
        cs[j].clear();
        units += 1;
    }
    let live_cols: Vec<usize> = (0..cs.len()).filter(|&j| alive[j] && !cs[j].is_empty()).collect();
    let live_rows: Vec<usize> = (0..nrows).filter(|&i| !rows[i].is_empty()).collect();
    let rest: Vec<Vec<i64>> = live_rows
        .iter()
        .map(|&i| live_cols.iter().map(|&j| cs[j].get(&i).copied().unwrap_or(0)).collect())
        .collect();
    Some((units, rest))
}
