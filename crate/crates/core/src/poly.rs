//! Dense polynomials and rational functions in `t`, and their Laurent
//! expansions at rational points and at infinity.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::ring::{fmt_rational, int, BaseRing, Rational, RingElem};
use crate::series::LaurentSeries;

/// A point of the projective line over `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Finite(Rational),
    Infinity,
}

impl Point {
    pub fn finite(q: Rational) -> Self {
        Point::Finite(q)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "oo" || s == "inf" || s == "infinity" {
            return Ok(Point::Infinity);
        }
        let r = crate::parse::parse_ratfunc(s, BaseRing::Rationals)?;
        let (n, d) = (r.num(), r.den());
        if n.degree().unwrap_or(0) > 0 || d.degree().unwrap_or(0) > 0 {
            return Err(Error::NonRationalPoint(s.to_string()));
        }
        let num = n.coeff(0).reduction();
        Ok(Point::Finite(num / d.coeff(0).reduction()))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(q) => write!(f, "{}", fmt_rational(q)),
            Point::Infinity => write!(f, "oo"),
        }
    }
}

/// `c_0 + c_1 t + ...`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    base: BaseRing,
    c: Vec<RingElem>,
}

impl Poly {
    pub fn new(base: BaseRing, mut c: Vec<RingElem>) -> Self {
        while c.last().is_some_and(RingElem::is_zero) {
            c.pop();
        }
        Poly { base, c }
    }

    pub fn zero(base: BaseRing) -> Self {
        Poly { base, c: Vec::new() }
    }

    pub fn constant(c: RingElem) -> Self {
        Poly::new(c.base(), vec![c])
    }

    pub fn one(base: BaseRing) -> Self {
        Poly::constant(base.one())
    }

    /// `t`.
    pub fn x(base: BaseRing) -> Self {
        Poly::new(base, vec![base.zero(), base.one()])
    }

    /// `t - a`.
    pub fn linear(base: BaseRing, a: &Rational) -> Self {
        Poly::new(base, vec![base.constant(-a.clone()), base.one()])
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Formal degree (highest nonzero coefficient, nilpotent or not).
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> RingElem {
        self.c.get(k).cloned().unwrap_or_else(|| self.base.zero())
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.c
    }

    pub fn reduce(&self) -> Poly {
        Poly::new(BaseRing::Rationals, self.c.iter().map(RingElem::reduce).collect())
    }

    pub fn change_base(&self, base: BaseRing) -> Poly {
        Poly::new(base, self.c.iter().map(|c| c.change_base(base)).collect())
    }

    pub fn scale(&self, k: &RingElem) -> Poly {
        Poly::new(self.base, self.c.iter().map(|c| c * k).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.base,
            self.c.iter().enumerate().skip(1).map(|(i, c)| c.scale(&int(i as i64))).collect(),
        )
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one(self.base);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &Rational) -> RingElem {
        let mut acc = self.base.zero();
        for c in self.c.iter().rev() {
            acc = &acc.scale(x) + c;
        }
        acc
    }

    /// `p(a + z)` as a polynomial in `z`.
    pub fn taylor_shift(&self, a: &Rational) -> Poly {
        let shift = Poly::new(self.base, vec![self.base.constant(a.clone()), self.base.one()]);
        let mut acc = Poly::zero(self.base);
        for c in self.c.iter().rev() {
            acc = &(&acc * &shift) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Coefficients reversed: `t^deg p(1/t)`.
    pub fn reversed(&self) -> Poly {
        Poly::new(self.base, self.c.iter().rev().cloned().collect())
    }

    pub fn to_series(&self) -> LaurentSeries {
        LaurentSeries::from_terms(
            self.base,
            self.c.iter().enumerate().map(|(i, c)| (i as i64, c.clone())).collect(),
            None,
        )
    }

    /// Order of vanishing of the reduction at `a` (`None` if the reduction is zero).
    pub fn order_at(&self, a: &Rational) -> Option<usize> {
        let r = self.reduce().taylor_shift(a);
        r.c.iter().position(|c| !c.is_zero())
    }

    /// Division with remainder over `Q` (requires the divisor to be nonzero).
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZeroPolynomial)?;
        let lead_inv = d.c[dd].inverse()?;
        let mut rem = self.c.clone();
        let mut quo = vec![self.base.zero(); self.c.len().saturating_sub(dd)];
        for k in (dd..rem.len()).rev() {
            let coef = &rem[k] * &lead_inv;
            if coef.is_zero() {
                continue;
            }
            for (j, dc) in d.c.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] = &rem[idx] - &(&coef * dc);
            }
            quo[k - dd] = coef;
        }
        rem.truncate(dd);
        Ok((Poly::new(self.base, quo), Poly::new(self.base, rem)))
    }

    /// Monic gcd over `Q`.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        let (mut a, mut b) = (self.reduce(), other.reduce());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        match a.degree() {
            None => Ok(Poly::zero(BaseRing::Rationals)),
            Some(d) => {
                let inv = a.c[d].inverse()?;
                Ok(a.scale(&inv))
            }
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.c.len().max(rhs.c.len());
        Poly::new(self.base, (0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.base, self.c.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.base);
        }
        let mut out = vec![self.base.zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(self.base, out)
    }
}

/// `num / den` with `den` having a nonzero reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.reduce().is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        Ok(RatFunc { num, den }.simplified())
    }

    pub fn from_poly(p: Poly) -> Self {
        let base = p.base();
        RatFunc { num: p, den: Poly::one(base) }
    }

    pub fn constant(c: RingElem) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn base(&self) -> BaseRing {
        self.num.base()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancels common factors when everything is rational, and makes the
    /// denominator's leading coefficient 1 when it is a unit.
    fn simplified(self) -> Self {
        let base = self.num.base();
        let (mut num, mut den) = (self.num, self.den);
        if base.is_reduced() && !num.is_zero() {
            if let Ok(g) = num.gcd(&den) {
                if g.degree().unwrap_or(0) > 0 {
                    num = num.div_rem(&g).expect("gcd divides").0;
                    den = den.div_rem(&g).expect("gcd divides").0;
                }
            }
        }
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(base) };
        }
        let lead = den.coeff(den.degree().unwrap());
        if let Ok(inv) = lead.inverse() {
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFunc { num, den }
    }

    pub fn reduce(&self) -> RatFunc {
        RatFunc::new(self.num.reduce(), self.den.reduce()).expect("denominator reduction is nonzero")
    }

    pub fn change_base(&self, base: BaseRing) -> RatFunc {
        RatFunc { num: self.num.change_base(base), den: self.den.change_base(base) }.simplified()
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFunc { num, den: &self.den * &o.den }.simplified()
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc { num: &self.num * &o.num, den: &self.den * &o.den }.simplified()
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc> {
        RatFunc::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        let (n, d) = if e >= 0 {
            (self.num.pow(e as usize), self.den.pow(e as usize))
        } else {
            (self.den.pow((-e) as usize), self.num.pow((-e) as usize))
        };
        RatFunc::new(n, d)
    }

    pub fn derivative(&self) -> RatFunc {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc { num, den: &self.den * &self.den }.simplified()
    }

    /// Order of the reduction at a point (`None` if the reduction is zero).
    pub fn order_at(&self, p: &Point) -> Option<i64> {
        let (n, d) = (self.num.reduce(), self.den.reduce());
        match p {
            Point::Finite(a) => Some(n.order_at(a)? as i64 - d.order_at(a)? as i64),
            Point::Infinity => Some(d.degree()? as i64 - n.degree()? as i64),
        }
    }

    /// Laurent expansion in the local coordinate (`t - a`, or `1/t` at
    /// infinity), known exactly below `prec`.
    pub fn expand_at(&self, p: &Point, prec: i64) -> Result<LaurentSeries> {
        let (num, den, shift) = match p {
            Point::Finite(a) => (self.num.taylor_shift(a), self.den.taylor_shift(a), 0),
            Point::Infinity => {
                let dn = self.num.degree().map_or(0, |d| d as i64);
                let dd = self.den.degree().map_or(0, |d| d as i64);
                (self.num.reversed(), self.den.reversed(), dd - dn)
            }
        };
        if num.is_zero() {
            return Ok(LaurentSeries::zero(self.base()));
        }
        let (ns, ds) = (num.to_series().shift(shift), den.to_series());
        let mut work = (prec + 4).max(4);
        for _ in 0..8 {
            let f = &ns * &ds.invert(work)?;
            if f.is_exact() {
                return Ok(f);
            }
            if f.precision().is_none_or(|q| q >= prec) {
                return Ok(f.truncate(prec));
            }
            work *= 2;
        }
        Err(Error::InsufficientPrecision(format!("expansion at {p} to O(t^{prec})")))
    }
}

/// Free-standing form of [`RatFunc::expand_at`].
pub fn expand_rational(f: &RatFunc, at: &Point, prec: i64) -> Result<LaurentSeries> {
    f.expand_at(at, prec)
}

fn fmt_poly(p: &Poly) -> String {
    p.to_series().to_string()
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeff(0).is_one() {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ratfunc;

    fn q() -> BaseRing {
        BaseRing::Rationals
    }

    #[test]
    fn partial_fraction_expansion_at_zero() {
        let f = parse_ratfunc("1/(t*(t-1))", q()).unwrap();
        let s = f.expand_at(&Point::Finite(int(0)), 4).unwrap();
        assert_eq!(s.to_string(), "-t^-1 - 1 - t - t^2 - t^3 + O(t^4)");
        // oracle: multiply back by t(t - 1) and compare with 1
        let den = parse_ratfunc("t*(t-1)", q()).unwrap().expand_at(&Point::Finite(int(0)), 10).unwrap();
        let back = &s * &den;
        assert_eq!(back, LaurentSeries::one(q()).truncate(back.precision().unwrap()));
        assert!(back.precision().unwrap() >= 4);
    }

    #[test]
    fn t_at_infinity() {
        let f = parse_ratfunc("t", q()).unwrap();
        assert_eq!(f.expand_at(&Point::Infinity, 5).unwrap(), LaurentSeries::t_pow(q(), -1));
    }

    #[test]
    fn inverse_t_at_one() {
        let f = parse_ratfunc("1/t", q()).unwrap();
        let s = f.expand_at(&Point::Finite(int(1)), 5).unwrap();
        assert_eq!(s.to_string(), "1 - t + t^2 - t^3 + t^4 + O(t^5)");
        // re-substitution oracle: (1 + z) * s = 1
        let back = &s * &LaurentSeries::from_rationals(q(), 0, &[int(1), int(1)], None);
        assert_eq!(back, LaurentSeries::one(q()).truncate(5));
    }

    #[test]
    fn zero_denominator_rejected() {
        let z = Poly::zero(q());
        assert_eq!(RatFunc::new(Poly::one(q()), z).unwrap_err(), Error::DivisionByZeroPolynomial);
        assert!(parse_ratfunc("1/(t-t)", q()).is_err());
    }

    #[test]
    fn orders() {
        let f = parse_ratfunc("(t-1)^2/t^3", q()).unwrap();
        assert_eq!(f.order_at(&Point::Finite(int(1))), Some(2));
        assert_eq!(f.order_at(&Point::Finite(int(0))), Some(-3));
        assert_eq!(f.order_at(&Point::Infinity), Some(1));
    }

    #[test]
    fn gcd_cancels() {
        let f = parse_ratfunc("(t^2-1)/(t-1)", q()).unwrap();
        assert_eq!(f.den().degree(), Some(0));
        assert_eq!(f.num(), &parse_ratfunc("t+1", q()).unwrap().num().clone());
    }
}
