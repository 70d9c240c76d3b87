//! Exact rationals and affine lengths `c + b*L`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or an integer string.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// An affine function of the symbolic length: `c + b*L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub c: Q,
    pub b: Q,
}

impl Affine {
    pub fn new(c: Q, b: Q) -> Self {
        Affine { c, b }
    }

    pub fn constant(c: Q) -> Self {
        Affine { c, b: Q::zero() }
    }

    pub fn zero() -> Self {
        Affine::constant(Q::zero())
    }

    pub fn l() -> Self {
        Affine { c: Q::zero(), b: Q::one() }
    }

    pub fn eval(&self, l: &Q) -> Q {
        &self.c + &self.b * l
    }

    pub fn is_constant(&self) -> bool {
        self.b.is_zero()
    }

    pub fn scale(&self, k: &Q) -> Affine {
        Affine { c: &self.c * k, b: &self.b * k }
    }

    /// Parses sums of terms such as `3/2`, `L`, `L/2`, `1/2*L`, `1+L/2`.
    pub fn parse(s: &str) -> Result<Affine> {
        let mut acc = Affine::zero();
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty length".into()));
        }
        for term in compact.split('+') {
            acc = acc + parse_term(term)?;
        }
        Ok(acc)
    }
}

fn parse_term(t: &str) -> Result<Affine> {
    let bad = || Error::Parse(format!("bad length term {t:?}"));
    if !t.contains('L') {
        return Ok(Affine::constant(parse_q(t)?));
    }
    let (coef, rest) = match t.split_once('*') {
        Some((c, r)) => (parse_q(c)?, r),
        None => (Q::one(), t),
    };
    let rest = rest.strip_prefix('L').ok_or_else(bad)?;
    let coef = if rest.is_empty() {
        coef
    } else {
        let d = rest.strip_prefix('/').ok_or_else(bad)?;
        let d = parse_q(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        coef / d
    };
    Ok(Affine { c: Q::zero(), b: coef })
}

impl std::ops::Add for Affine {
    type Output = Affine;
    fn add(self, o: Affine) -> Affine {
        Affine { c: self.c + o.c, b: self.b + o.b }
    }
}

impl std::ops::Sub for Affine {
    type Output = Affine;
    fn sub(self, o: Affine) -> Affine {
        Affine { c: self.c - o.c, b: self.b - o.b }
    }
}

impl std::ops::Neg for Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        Affine { c: -self.c, b: -self.b }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lpart = |b: &Q| {
            if b.is_one() {
                "L".to_string()
            } else if b.numer().is_one() {
                format!("L/{}", b.denom())
            } else {
                format!("{}*L", fmt_q(b))
            }
        };
        match (self.c.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.c)),
            (true, false) => write!(f, "{}", lpart(&self.b)),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{}-{}", fmt_q(&self.c), lpart(&-self.b.clone()))
                } else {
                    write!(f, "{}+{}", fmt_q(&self.c), lpart(&self.b))
                }
            }
        }
    }
}
