//! Linear algebra over a prime field `F_p` (dense matrices and sparse column reduction).

use std::collections::HashMap;

pub const DEFAULT_PRIME: u32 = 32003;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub fn add(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

#[inline]
pub fn sub(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + p as u64 - b as u64) % p as u64) as u32
}

#[inline]
pub fn mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub fn neg(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn pow(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1u32 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv(a: u32, p: u32) -> u32 {
    assert!(a % p != 0, "inverse of zero");
    pow(a, p as u64 - 2, p)
}

/// Reduces a signed integer into `[0, p)`.
pub fn from_i64(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// Dense row-major matrix with entries in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize) -> Mat {
        let mut m = Mat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], p: u32) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        let conv: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|&x| from_i64(x, p)).collect()).collect();
        Mat::from_rows(&conv, cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn from_cols(cols: &[Vec<u32>], rows: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Mat::identity(self.rows)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, o: &Mat, p: u32) -> Mat {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = vec![0u64; self.rows * o.cols];
        let pp = p as u64;
        for i in 0..self.rows {
            let acc = &mut out[i * o.cols..(i + 1) * o.cols];
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                let orow = o.row(k);
                for (j, &b) in orow.iter().enumerate() {
                    if b != 0 {
                        acc[j] = (acc[j] + a * b as u64) % pp;
                    }
                }
            }
        }
        Mat { rows: self.rows, cols: o.cols, data: out.into_iter().map(|x| x as u32).collect() }
    }

    pub fn add(&self, o: &Mat, p: u32) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(&a, &b)| add(a, b, p)).collect() }
    }

    pub fn sub(&self, o: &Mat, p: u32) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(&a, &b)| sub(a, b, p)).collect() }
    }

    pub fn scale(&self, c: u32, p: u32) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| mul(a, c, p)).collect() }
    }

    /// `self - lambda * I`.
    pub fn shift(&self, lambda: u32, p: u32) -> Mat {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = sub(m.get(i, i), lambda, p);
            m.set(i, i, v);
        }
        m
    }

    pub fn hstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        let mut m = Mat::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            m.data[i * m.cols..i * m.cols + self.cols].copy_from_slice(self.row(i));
            m.data[i * m.cols + self.cols..(i + 1) * m.cols].copy_from_slice(o.row(i));
        }
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                m.set(i, k, self.get(i, j));
            }
        }
        m
    }

    pub fn pow(&self, e: usize, p: u32) -> Mat {
        let mut r = Mat::identity(self.rows);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, p);
            }
            b = b.mul(&b, p);
            e >>= 1;
        }
        r
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, p: u32) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if piv != r {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, r * m.cols + j);
                }
            }
            let iv = inv(m.get(r, c), p);
            for j in c..m.cols {
                let v = mul(m.get(r, j), iv, p);
                m.set(r, j, v);
            }
            let prow: Vec<(usize, u32)> = (c..m.cols).map(|j| (j, m.get(r, j))).filter(|&(_, v)| v != 0).collect();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                for &(j, v) in &prow {
                    let x = sub(m.get(i, j), mul(f, v, p), p);
                    m.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, p: u32) -> usize {
        self.rref(p).1.len()
    }

    /// Basis of the null space as columns of the returned matrix (`cols x k`).
    pub fn nullspace(&self, p: u32) -> Mat {
        let (r, piv) = self.rref(p);
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut out = Mat::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, 1);
            for (i, &pc) in piv.iter().enumerate() {
                out.set(pc, k, neg(r.get(i, f), p));
            }
        }
        out
    }

    /// Basis of the column space: the pivot columns of `self`.
    pub fn colspace(&self, p: u32) -> Mat {
        let (_, piv) = self.rref(p);
        self.select_cols(&piv)
    }

    pub fn inverse(&self, p: u32) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Mat::zeros(0, 0));
        }
        let aug = self.hstack(&Mat::identity(n));
        let (r, piv) = aug.rref(p);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Some(r.select_cols(&idx))
    }

    /// Solves `self * X = b` for one particular `X`, if solvable.
    pub fn solve(&self, b: &Mat, p: u32) -> Option<Mat> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hstack(b);
        let (r, piv) = aug.rref(p);
        if piv.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(self.cols, b.cols);
        for (i, &c) in piv.iter().enumerate() {
            for j in 0..b.cols {
                x.set(c, j, r.get(i, self.cols + j));
            }
        }
        Some(x)
    }
}

/// Sparse column: sorted `(row, value)` pairs with nonzero values.
pub type SparseCol = Vec<(usize, u32)>;

pub fn sparse_axpy(y: &SparseCol, a: u32, x: &SparseCol, p: u32) -> SparseCol {
    // y - a*x
    let mut out = Vec::with_capacity(y.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < y.len() || j < x.len() {
        let take_y = j == x.len() || (i < y.len() && y[i].0 < x[j].0);
        let take_x = i == y.len() || (j < x.len() && x[j].0 < y[i].0);
        if take_y {
            out.push(y[i]);
            i += 1;
        } else if take_x {
            let v = neg(mul(a, x[j].1, p), p);
            if v != 0 {
                out.push((x[j].0, v));
            }
            j += 1;
        } else {
            let v = sub(y[i].1, mul(a, x[j].1, p), p);
            if v != 0 {
                out.push((y[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sparse_from_i64(col: &[(usize, i64)], p: u32) -> SparseCol {
    let mut v: Vec<(usize, u32)> = col.iter().map(|&(r, x)| (r, from_i64(x, p))).filter(|&(_, x)| x != 0).collect();
    v.sort_by_key(|x| x.0);
    let mut out: SparseCol = Vec::with_capacity(v.len());
    for (r, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 = add(last.1, x, p),
            _ => out.push((r, x)),
        }
    }
    out.retain(|&(_, x)| x != 0);
    out
}

/// Incremental column reduction with tags.
///
/// Columns are reduced by pivot = largest row index. Each stored column carries a
/// dense tag vector that records its expression in the tagged input columns, so a
/// later vector can be written as a combination of tagged columns modulo the
/// untagged ones.
pub struct Reducer {
    p: u32,
    ntags: usize,
    pivots: HashMap<usize, (SparseCol, Vec<u32>)>,
}

impl Reducer {
    pub fn new(p: u32, ntags: usize) -> Self {
        Reducer { p, ntags, pivots: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce_inner(&self, mut col: SparseCol, mut tag: Vec<u32>) -> (SparseCol, Vec<u32>) {
        let p = self.p;
        while let Some(&(r, v)) = col.last() {
            let Some((pc, ptag)) = self.pivots.get(&r) else { break };
            let a = mul(v, inv(pc.last().unwrap().1, p), p);
            col = sparse_axpy(&col, a, pc, p);
            for (t, &pt) in tag.iter_mut().zip(ptag) {
                if pt != 0 {
                    *t = sub(*t, mul(a, pt, p), p);
                }
            }
        }
        (col, tag)
    }

    /// Adds a column; `tag` is `Some(k)` for the k-th tagged column. Returns true if independent.
    pub fn add(&mut self, col: SparseCol, tag: Option<usize>) -> bool {
        let mut t = vec![0u32; self.ntags];
        if let Some(k) = tag {
            t[k] = 1;
        }
        let (c, t) = self.reduce_inner(col, t);
        match c.last() {
            Some(&(r, _)) => {
                self.pivots.insert(r, (c, t));
                true
            }
            None => false,
        }
    }

    /// True if `col` lies in the span of the stored columns.
    pub fn contains(&self, col: &SparseCol) -> bool {
        self.reduce_inner(col.clone(), vec![0; self.ntags]).0.is_empty()
    }

    /// Coefficients of `col` on the tagged columns, modulo untagged ones; `None` if not in the span.
    pub fn coordinates(&self, col: &SparseCol) -> Option<Vec<u32>> {
        let (c, t) = self.reduce_inner(col.clone(), vec![0; self.ntags]);
        if !c.is_empty() {
            return None;
        }
        // col - sum a_k stored_k = 0 and the tag recorded -sum a_k tag_k.
        Some(t.into_iter().map(|x| neg(x, self.p)).collect())
    }
}

/// Rank of a sparse matrix given by columns.
pub fn sparse_rank(cols: &[SparseCol], p: u32) -> usize {
    let mut r = Reducer::new(p, 0);
    for c in cols {
        r.add(c.clone(), None);
    }
    r.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 32003;

    #[test]
    fn inverse_and_rank() {
        let m = Mat::from_i64_rows(&[vec![2, 1], vec![1, 1]], P);
        let i = m.inverse(P).unwrap();
        assert!(m.mul(&i, P).is_identity());
        let s = Mat::from_i64_rows(&[vec![1, 2], vec![2, 4]], P);
        assert_eq!(s.rank(P), 1);
        assert!(s.inverse(P).is_none());
        let n = s.nullspace(P);
        assert_eq!(n.cols, 1);
        assert!(s.mul(&n, P).is_zero());
    }

    #[test]
    fn reducer_coordinates() {
        // boundary column e0 + e1 (untagged); tagged columns e0 and e2.
        let mut r = Reducer::new(P, 2);
        assert!(r.add(vec![(0, 1), (1, 1)], None));
        assert!(r.add(vec![(0, 1)], Some(0)));
        assert!(r.add(vec![(2, 1)], Some(1)));
        // e1 = (e0 + e1) - e0 -> coordinates (-1, 0)
        assert_eq!(r.coordinates(&vec![(1, 1)]).unwrap(), vec![P - 1, 0]);
        assert_eq!(r.coordinates(&vec![(1, 2), (2, 3)]).unwrap(), vec![P - 2, 3]);
        assert!(r.coordinates(&vec![(5, 1)]).is_none());
    }

    #[test]
    fn solve_particular() {
        let a = Mat::from_i64_rows(&[vec![1, 1], vec![0, 1]], P);
        let b = Mat::from_i64_rows(&[vec![3], vec![1]], P);
        let x = a.solve(&b, P).unwrap();
        assert_eq!(a.mul(&x, P), b);
    }
}
