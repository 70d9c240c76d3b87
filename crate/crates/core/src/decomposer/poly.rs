//! Polynomials over `F_p` (coefficients low to high), characteristic
//! polynomials, and roots in `F_p`.

use rand::Rng;

use crate::fp::{self, Mat};

pub type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &Poly) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn mul(a: &Poly, b: &Poly, p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = fp::add(out[i + j], fp::mul(x, y, p), p);
        }
    }
    trim(out)
}

/// Remainder of `a` modulo `b` (`b` nonzero).
pub fn rem(a: &Poly, b: &Poly, p: u32) -> Poly {
    let db = degree(b).expect("nonzero divisor");
    let inv_lead = fp::inv(b[db], p);
    let mut r = trim(a.clone());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = fp::mul(r[dr], inv_lead, p);
        let shift = dr - db;
        for (k, &bk) in b.iter().enumerate().take(db + 1) {
            r[shift + k] = fp::sub(r[shift + k], fp::mul(c, bk, p), p);
        }
        r = trim(r);
    }
    r
}

fn monic(a: Poly, p: u32) -> Poly {
    match degree(&a) {
        None => a,
        Some(d) => {
            let iv = fp::inv(a[d], p);
            a.into_iter().map(|c| fp::mul(c, iv, p)).collect()
        }
    }
}

pub fn gcd(a: &Poly, b: &Poly, p: u32) -> Poly {
    let (mut x, mut y) = (trim(a.clone()), trim(b.clone()));
    while degree(&y).is_some() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(x, p)
}

/// `base^e mod m`.
pub fn powmod(base: &Poly, mut e: u64, m: &Poly, p: u32) -> Poly {
    let mut result: Poly = vec![1];
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = rem(&mul(&result, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

pub fn eval(a: &Poly, x: u32, p: u32) -> u32 {
    a.iter().rev().fold(0, |acc, &c| fp::add(fp::mul(acc, x, p), c, p))
}

/// Characteristic polynomial `det(xI - A)` via Hessenberg reduction.
pub fn charpoly(a: &Mat, p: u32) -> Poly {
    let n = a.rows;
    let mut h = a.clone();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h.get(i, j) != 0) else { continue };
        if piv != j + 1 {
            for c in 0..n {
                let (x, y) = (h.get(piv, c), h.get(j + 1, c));
                h.set(piv, c, y);
                h.set(j + 1, c, x);
            }
            for r in 0..n {
                let (x, y) = (h.get(r, piv), h.get(r, j + 1));
                h.set(r, piv, y);
                h.set(r, j + 1, x);
            }
        }
        let iv = fp::inv(h.get(j + 1, j), p);
        for i in j + 2..n {
            let f = fp::mul(h.get(i, j), iv, p);
            if f == 0 {
                continue;
            }
            for c in 0..n {
                let v = fp::sub(h.get(i, c), fp::mul(f, h.get(j + 1, c), p), p);
                h.set(i, c, v);
            }
            for r in 0..n {
                let v = fp::add(h.get(r, j + 1), fp::mul(f, h.get(r, i), p), p);
                h.set(r, j + 1, v);
            }
        }
    }
    // Recurrence on leading principal minors of the Hessenberg form.
    let mut polys: Vec<Poly> = vec![vec![1]];
    for m in 0..n {
        let mut next = mul(&vec![fp::neg(h.get(m, m), p), 1], &polys[m], p);
        let mut t = 1u32;
        for i in (0..m).rev() {
            t = fp::mul(t, h.get(i + 1, i), p);
            if t == 0 {
                break;
            }
            let c = fp::mul(t, h.get(i, m), p);
            let term: Poly = polys[i].iter().map(|&x| fp::mul(x, c, p)).collect();
            let len = next.len().max(term.len());
            next.resize(len, 0);
            for (k, x) in term.into_iter().enumerate() {
                next[k] = fp::sub(next[k], x, p);
            }
            next = trim(next);
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Distinct roots in `F_p`, sorted.
pub fn roots<R: Rng>(a: &Poly, p: u32, rng: &mut R) -> Vec<u32> {
    let a = trim(a.clone());
    if degree(&a).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let m = monic(a, p);
    // Product of the distinct linear factors.
    let xp = powmod(&vec![0, 1], p as u64, &m, p);
    let mut xp_minus_x = xp;
    xp_minus_x.resize(xp_minus_x.len().max(2), 0);
    xp_minus_x[1] = fp::sub(xp_minus_x[1], 1, p);
    let g = gcd(&m, &trim(xp_minus_x), p);
    let mut out = Vec::new();
    if degree(&g).is_some_and(|d| d > 0) {
        split_linear(&g, p, rng, &mut out);
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn split_linear<R: Rng>(g: &Poly, p: u32, rng: &mut R, out: &mut Vec<u32>) {
    let Some(d) = degree(g) else { return };
    if d == 0 {
        return;
    }
    if d == 1 {
        out.push(fp::neg(fp::mul(g[0], fp::inv(g[1], p), p), p));
        return;
    }
    if p == 2 {
        for x in 0..2 {
            if eval(g, x, p) == 0 {
                out.push(x);
            }
        }
        return;
    }
    loop {
        let a = rng.gen_range(0..p);
        let h = powmod(&vec![a, 1], ((p - 1) / 2) as u64, g, p);
        let mut h1 = h;
        if h1.is_empty() {
            h1.push(0);
        }
        h1[0] = fp::sub(h1[0], 1, p);
        let f = gcd(g, &trim(h1), p);
        let df = degree(&f).unwrap_or(0);
        if df > 0 && df < d {
            split_linear(&f, p, rng, out);
            let q = divide_exact(g, &f, p);
            split_linear(&q, p, rng, out);
            return;
        }
    }
}

fn divide_exact(a: &Poly, b: &Poly, p: u32) -> Poly {
    let db = degree(b).unwrap();
    let da = degree(a).unwrap();
    let inv_lead = fp::inv(b[db], p);
    let mut r = trim(a.clone());
    let mut q = vec![0u32; da - db + 1];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = fp::mul(r[dr], inv_lead, p);
        q[dr - db] = c;
        for (k, &bk) in b.iter().enumerate().take(db + 1) {
            r[dr - db + k] = fp::sub(r[dr - db + k], fp::mul(c, bk, p), p);
        }
        r = trim(r);
    }
    trim(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 32003;

    #[test]
    fn charpoly_small() {
        // [[2,1],[0,3]] -> (x-2)(x-3) = x^2 - 5x + 6
        let a = Mat::from_rows(&[vec![2, 1], vec![0, 3]], 2);
        assert_eq!(charpoly(&a, P), vec![6, P - 5, 1]);
        let z = Mat::zeros(3, 3);
        assert_eq!(charpoly(&z, P), vec![0, 0, 0, 1]);
        assert_eq!(charpoly(&Mat::zeros(0, 0), P), vec![1]);
    }

    #[test]
    fn charpoly_matches_determinant_at_points() {
        let a = Mat::from_rows(&[vec![0, 1, 5], vec![7, 0, 2], vec![3, 4, 0]], 3);
        let cp = charpoly(&a, P);
        for x in [0u32, 1, 9, 1234] {
            // det(xI - A) via elimination
            let m = a.scale(P - 1, P).shift(P - x, P);
            let (r, piv) = m.rref(P);
            let nonsingular = piv.len() == 3 && r.is_identity();
            assert_eq!(nonsingular, eval(&cp, x, P) != 0);
        }
    }

    #[test]
    fn roots_of_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // (x-3)^2 (x-10) (x^2+1)  ; x^2+1 is irreducible since 32003 = 3 mod 4
        let f = mul(&mul(&mul(&vec![P - 3, 1], &vec![P - 3, 1], P), &vec![P - 10, 1], P), &vec![1, 0, 1], P);
        assert_eq!(roots(&f, P, &mut rng), vec![3, 10]);
        assert_eq!(roots(&vec![0, 0, 1], P, &mut rng), vec![0]);
        assert!(roots(&vec![1, 0, 1], P, &mut rng).is_empty());
    }
}
