//! Exact coefficient rings: the rationals and truncated polynomial rings
//! `Q[eps]/(eps^N)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest `N` accepted by [`BaseRing::nilpotent`].
pub const MAX_NILPOTENCY: usize = 8;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Coefficient ring. `Nilpotent(n)` is `Q[eps]/(eps^n)` with `n >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseRing {
    Rationals,
    Nilpotent(usize),
}

impl BaseRing {
    pub fn nilpotent(order: usize) -> Result<Self> {
        if !(2..=MAX_NILPOTENCY).contains(&order) {
            return Err(Error::InvalidBase(format!(
                "nilpotency order must lie in 2..={MAX_NILPOTENCY}, got {order}"
            )));
        }
        Ok(BaseRing::Nilpotent(order))
    }

    /// Number of stored coefficients `c_0 .. c_{N-1}`.
    pub fn width(self) -> usize {
        match self {
            BaseRing::Rationals => 1,
            BaseRing::Nilpotent(n) => n,
        }
    }

    pub fn is_reduced(self) -> bool {
        matches!(self, BaseRing::Rationals)
    }

    pub fn zero(self) -> RingElem {
        RingElem { base: self, c: vec![Rational::zero(); self.width()] }
    }

    pub fn one(self) -> RingElem {
        self.constant(Rational::one())
    }

    pub fn constant(self, q: Rational) -> RingElem {
        let mut e = self.zero();
        e.c[0] = q;
        e
    }

    /// The nilpotent generator `eps` (fails over the rationals).
    pub fn eps(self) -> Result<RingElem> {
        match self {
            BaseRing::Rationals => Err(Error::InvalidBase("eps is not available over Q".into())),
            BaseRing::Nilpotent(_) => {
                let mut e = self.zero();
                e.c[1] = Rational::one();
                Ok(e)
            }
        }
    }

    pub fn check_same(self, other: BaseRing) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BaseMismatch(self, other))
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Rationals => write!(f, "Q"),
            BaseRing::Nilpotent(n) => write!(f, "Q[eps]/(eps^{n})"),
        }
    }
}

/// Element `c_0 + c_1 eps + ... + c_{N-1} eps^{N-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    base: BaseRing,
    c: Vec<Rational>,
}

impl RingElem {
    pub fn from_coeffs(base: BaseRing, mut coeffs: Vec<Rational>) -> Self {
        coeffs.resize(base.width(), Rational::zero());
        coeffs.truncate(base.width());
        RingElem { base, c: coeffs }
    }

    pub fn from_rational(base: BaseRing, q: Rational) -> Self {
        base.constant(q)
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.c.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(Zero::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.c[0].is_zero()
    }

    /// Image under `eps -> 0`, as a rational.
    pub fn reduction(&self) -> Rational {
        self.c[0].clone()
    }

    /// Image under `eps -> 0`, as an element of `Q`.
    pub fn reduce(&self) -> RingElem {
        BaseRing::Rationals.constant(self.c[0].clone())
    }

    /// Re-embed into a (possibly larger) base, truncating if it is smaller.
    pub fn change_base(&self, base: BaseRing) -> RingElem {
        RingElem::from_coeffs(base, self.c.clone())
    }

    /// Least `k` with `c_k != 0`; `None` for zero.
    pub fn eps_order(&self) -> Option<usize> {
        self.c.iter().position(|q| !q.is_zero())
    }

    pub fn scale(&self, q: &Rational) -> RingElem {
        RingElem { base: self.base, c: self.c.iter().map(|x| x * q).collect() }
    }

    pub fn inverse(&self) -> Result<RingElem> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(format!("{self}")));
        }
        let n = self.c.len();
        let mut inv = vec![Rational::zero(); n];
        inv[0] = self.c[0].recip();
        for k in 1..n {
            let mut s = Rational::zero();
            for j in 1..=k {
                s += &self.c[j] * &inv[k - j];
            }
            inv[k] = -(s * &inv[0]);
        }
        Ok(RingElem { base: self.base, c: inv })
    }

    pub fn pow(&self, e: i64) -> Result<RingElem> {
        let b = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = self.base.one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &b;
        }
        Ok(acc)
    }

    pub fn neg_one_pow(base: BaseRing, e: i64) -> RingElem {
        if e.rem_euclid(2) == 0 {
            base.one()
        } else {
            -base.one()
        }
    }

    fn check(&self, other: &RingElem) {
        assert_eq!(self.base, other.base, "ring elements over different bases");
    }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, rhs: &RingElem) -> RingElem {
        self.check(rhs);
        RingElem { base: self.base, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &RingElem) -> RingElem {
        self.check(rhs);
        RingElem { base: self.base, c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &RingElem) -> RingElem {
        self.check(rhs);
        let n = self.c.len();
        let mut out = vec![Rational::zero(); n];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RingElem { base: self.base, c: out }
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem { base: self.base, c: self.c.iter().map(|a| -a).collect() }
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RingElem {
            type Output = RingElem;
            fn $m(self, rhs: RingElem) -> RingElem {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Prints in the input grammar: `1 - 2*eps + 3/2*eps^2`.
impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mag = q.abs();
            let sign_neg = q.is_negative();
            if first {
                if sign_neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if sign_neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "eps".to_string(),
                _ => format!("eps^{k}"),
            };
            if mono.is_empty() {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rational(&mag))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Determinant over a local coefficient ring. Unit pivots are used when
/// available; a column without a unit entry falls back to cofactor
/// expansion along that column.
pub fn ring_det(m: &[Vec<RingElem>]) -> RingElem {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "ring_det needs a square matrix");
    if n == 0 {
        return BaseRing::Rationals.one();
    }
    let base = m[0][0].base();
    det_rec(m.to_vec(), base)
}

fn det_rec(mut a: Vec<Vec<RingElem>>, base: BaseRing) -> RingElem {
    let n = a.len();
    if n == 0 {
        return base.one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut det = base.one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col].is_unit());
        let Some(p) = pivot else {
            // no unit left in this column: expand the remaining minor
            let rest: Vec<Vec<RingElem>> = a[col..].iter().map(|r| r[col..].to_vec()).collect();
            return &det * &cofactor_det(&rest, base);
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let inv = a[col][col].inverse().expect("unit pivot");
        det = &det * &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    det
}

fn cofactor_det(a: &[Vec<RingElem>], base: BaseRing) -> RingElem {
    let n = a.len();
    if n == 0 {
        return base.one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut acc = base.zero();
    for r in 0..n {
        if a[r][0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<RingElem>> = a
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, row)| row[1..].to_vec())
            .collect();
        let term = &a[r][0] * &det_rec(minor, base);
        acc = if r % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}
