//! Truncated Laurent series over a [`BaseRing`] with explicit, pessimistic
//! precision tracking.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::{fmt_rational, int, BaseRing, Rational, RingElem};

/// `sum_{e} c_e t^e + O(t^prec)`.
///
/// Stored coefficients run from `start` upwards, with the first and last
/// entries nonzero. `prec == None` means the series is exact (a Laurent
/// polynomial); otherwise every coefficient at an exponent `>= prec` is
/// unknown and all stored exponents are `< prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentSeries {
    base: BaseRing,
    start: i64,
    coeffs: Vec<RingElem>,
    prec: Option<i64>,
}

impl LaurentSeries {
    pub fn zero(base: BaseRing) -> Self {
        LaurentSeries { base, start: 0, coeffs: Vec::new(), prec: None }
    }

    pub fn one(base: BaseRing) -> Self {
        Self::monomial(base.one(), 0)
    }

    /// `c * t^e`, exact.
    pub fn monomial(c: RingElem, e: i64) -> Self {
        let base = c.base();
        Self::from_terms(base, vec![(e, c)], None)
    }

    pub fn constant(c: RingElem) -> Self {
        Self::monomial(c, 0)
    }

    /// `t^e` over `base`.
    pub fn t_pow(base: BaseRing, e: i64) -> Self {
        Self::monomial(base.one(), e)
    }

    pub fn from_terms(base: BaseRing, terms: Vec<(i64, RingElem)>, prec: Option<i64>) -> Self {
        let terms: Vec<_> = terms
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && prec.is_none_or(|p| *e < p))
            .collect();
        if terms.is_empty() {
            return LaurentSeries { base, start: 0, coeffs: Vec::new(), prec };
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![base.zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            assert_eq!(c.base(), base, "term over a different base");
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = &*slot + &c;
        }
        LaurentSeries { base, start: lo, coeffs, prec }.normalized()
    }

    /// Rational coefficients `coeffs[i]` at exponent `start + i`.
    pub fn from_rationals(base: BaseRing, start: i64, coeffs: &[Rational], prec: Option<i64>) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, q)| (start + i as i64, base.constant(q.clone())))
            .collect();
        Self::from_terms(base, terms, prec)
    }

    fn normalized(mut self) -> Self {
        if let Some(p) = self.prec {
            let keep = (p - self.start).max(0) as usize;
            if self.coeffs.len() > keep {
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.last().is_some_and(RingElem::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.start = 0;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
        self
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Zero as far as is known (exact zero, or `O(t^P)`).
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// Nonzero stored terms, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &RingElem)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.start + i as i64, c))
    }

    /// Least exponent with a nonzero (possibly nilpotent) stored coefficient.
    pub fn low_exponent(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    /// Largest exponent with a nonzero stored coefficient.
    pub fn high_exponent(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start + self.coeffs.len() as i64 - 1)
        }
    }

    pub fn coeff_known(&self, e: i64) -> Option<RingElem> {
        if self.prec.is_some_and(|p| e >= p) {
            return None;
        }
        let i = e - self.start;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Some(self.base.zero())
        } else {
            Some(self.coeffs[i as usize].clone())
        }
    }

    pub fn coeff(&self, e: i64) -> Result<RingElem> {
        self.coeff_known(e).ok_or_else(|| {
            Error::InsufficientPrecision(format!("coefficient of t^{e} in a series known to O(t^{})", self.prec.unwrap()))
        })
    }

    /// Valuation of the reduction mod nilpotents.
    pub fn valuation(&self) -> Result<i64> {
        self.terms().find(|(_, c)| c.is_unit()).map(|(e, _)| e).ok_or(Error::Indeterminate)
    }

    /// Drop all information at exponents `>= p` (never raises precision).
    pub fn truncate(&self, p: i64) -> Self {
        let p = self.prec.map_or(p, |q| q.min(p));
        LaurentSeries { prec: Some(p), ..self.clone() }.normalized()
    }

    pub fn reduce(&self) -> Self {
        self.change_base(BaseRing::Rationals)
    }

    pub fn change_base(&self, base: BaseRing) -> Self {
        let terms = self.terms().map(|(e, c)| (e, c.change_base(base))).collect();
        Self::from_terms(base, terms, self.prec)
    }

    pub fn scale(&self, c: &RingElem) -> Self {
        let terms = self.terms().map(|(e, x)| (e, x * c)).collect();
        Self::from_terms(self.base, terms, self.prec)
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            base: self.base,
            start: self.start + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec.map(|p| p + k),
        }
    }

    /// Terms with exponent `< e` (exact part only, keeps precision if below).
    pub fn part_below(&self, e: i64) -> Self {
        let terms = self.terms().filter(|(x, _)| *x < e).map(|(x, c)| (x, c.clone())).collect();
        let prec = self.prec.filter(|p| *p < e);
        Self::from_terms(self.base, terms, prec)
    }

    /// Terms with exponent `>= e`.
    pub fn part_from(&self, e: i64) -> Self {
        let terms = self.terms().filter(|(x, _)| *x >= e).map(|(x, c)| (x, c.clone())).collect();
        Self::from_terms(self.base, terms, self.prec)
    }

    /// `t d/dt`-free derivative `d/dt`; precision drops by one.
    pub fn derivative(&self) -> Self {
        let terms = self.terms().map(|(e, c)| (e - 1, c.scale(&int(e)))).collect();
        Self::from_terms(self.base, terms, self.prec.map(|p| p - 1))
    }

    /// `t d/dt`; precision is unchanged.
    pub fn euler_derivative(&self) -> Self {
        let terms = self.terms().map(|(e, c)| (e, c.scale(&int(e)))).collect();
        Self::from_terms(self.base, terms, self.prec)
    }

    /// Coefficient of `t^{-1}`.
    pub fn residue(&self) -> Result<RingElem> {
        self.coeff(-1)
    }

    /// Multiplicative inverse, with the unit part expanded to `work` terms
    /// beyond the valuation when the input is exact.
    pub fn invert(&self, work: i64) -> Result<Self> {
        let v = self.valuation().map_err(|_| Error::NotAUnit(format!("{self}")))?;
        let h = self.shift(-v);
        let pos = h.part_from(0);
        let neg = h.part_below(0);
        let pos_inv = invert_power_series(&pos, work)?;
        let mut inv = pos_inv.clone();
        if !neg.is_known_zero() {
            // (pos + neg)^{-1} = pos^{-1} * sum_k (-neg pos^{-1})^k; neg is nilpotent
            let x = -(&neg * &pos_inv);
            let mut term = LaurentSeries::one(self.base);
            let mut sum = LaurentSeries::one(self.base);
            for _ in 1..self.base.width() {
                term = &term * &x;
                sum = &sum + &term;
            }
            inv = &pos_inv * &sum;
        }
        Ok(inv.shift(-v))
    }

    /// `f(t) -> f(-t)`-style substitution is not needed; this evaluates the
    /// polynomial part at a rational point (exact series only).
    pub fn eval_exact(&self, x: &Rational) -> Result<RingElem> {
        if !self.is_exact() {
            return Err(Error::InsufficientPrecision("evaluation of an inexact series".into()));
        }
        let mut acc = self.base.zero();
        for (e, c) in self.terms() {
            let p = if e >= 0 {
                num_traits::pow(x.clone(), e as usize)
            } else {
                num_traits::pow(x.recip(), (-e) as usize)
            };
            acc = &acc + &c.scale(&p);
        }
        Ok(acc)
    }
}

fn invert_power_series(h: &LaurentSeries, work: i64) -> Result<LaurentSeries> {
    let base = h.base;
    let h0 = h.coeff(0)?;
    let h0_inv = h0.inverse()?;
    if h.is_exact() && h.high_exponent() == Some(0) {
        return Ok(LaurentSeries::constant(h0_inv));
    }
    let p = h.prec.map_or(work, |q| q.min(work.max(1)));
    let mut g: Vec<RingElem> = Vec::with_capacity(p.max(0) as usize);
    for k in 0..p {
        if k == 0 {
            g.push(h0_inv.clone());
            continue;
        }
        let mut s = base.zero();
        for j in 1..=k {
            let hj = h.coeff(j)?;
            if !hj.is_zero() {
                s = &s + &(&hj * &g[(k - j) as usize]);
            }
        }
        g.push(-(&s * &h0_inv));
    }
    let terms = g.into_iter().enumerate().map(|(i, c)| (i as i64, c)).collect();
    Ok(LaurentSeries::from_terms(base, terms, Some(p)))
}

fn sum_prec(a: &LaurentSeries, b: &LaurentSeries) -> Option<i64> {
    match (a.prec, b.prec) {
        (None, None) => None,
        (Some(p), None) | (None, Some(p)) => Some(p),
        (Some(p), Some(q)) => Some(p.min(q)),
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        assert_eq!(self.base, rhs.base, "series over different bases");
        let terms = self.terms().chain(rhs.terms()).map(|(e, c)| (e, c.clone())).collect();
        LaurentSeries::from_terms(self.base, terms, sum_prec(self, rhs))
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            base: self.base,
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            prec: self.prec,
        }
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        -&self
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        assert_eq!(self.base, rhs.base, "series over different bases");
        // lowest exponent that could carry a nonzero value
        let low = |s: &LaurentSeries| s.low_exponent().or(s.prec);
        let prec = match (self.prec, rhs.prec) {
            (None, None) => None,
            (Some(p), None) => {
                if rhs.is_exact_zero() {
                    return LaurentSeries::zero(self.base);
                }
                Some(p + rhs.start)
            }
            (None, Some(q)) => {
                if self.is_exact_zero() {
                    return LaurentSeries::zero(self.base);
                }
                Some(q + self.start)
            }
            (Some(p), Some(q)) => Some((p + low(rhs).unwrap()).min(q + low(self).unwrap())),
        };
        let mut terms = Vec::new();
        for (i, a) in self.terms() {
            for (j, b) in rhs.terms() {
                if prec.is_none_or(|p| i + j < p) {
                    let c = a * b;
                    if !c.is_zero() {
                        terms.push((i + j, c));
                    }
                }
            }
        }
        LaurentSeries::from_terms(self.base, terms, prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn t_power(e: i64) -> String {
    match e {
        1 => "t".to_string(),
        _ => format!("t^{e}"),
    }
}

/// Canonical form in the input grammar, e.g. `3/2*t^-2 + eps*t + O(t^4)`.
impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (e, c) in self.terms() {
            let nz: Vec<usize> = (0..c.coeffs().len()).filter(|&k| !c.coeff(k).is_zero()).collect();
            if nz.len() > 1 {
                let s = if e == 0 { format!("({c})") } else { format!("({c})*{}", t_power(e)) };
                parts.push((false, s));
                continue;
            }
            let k = nz[0];
            let q = c.coeff(k);
            let neg = q.is_negative();
            let mag = q.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || (k == 0 && e == 0) {
                factors.push(fmt_rational(&mag));
            }
            match k {
                0 => {}
                1 => factors.push("eps".into()),
                _ => factors.push(format!("eps^{k}")),
            }
            if e != 0 {
                factors.push(t_power(e));
            }
            parts.push((neg, factors.join("*")));
        }
        if let Some(p) = self.prec {
            parts.push((false, format!("O({})", t_power(p))));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, s)) in parts.iter().enumerate() {
            if i == 0 {
                write!(f, "{}{s}", if *neg { "-" } else { "" })?;
            } else {
                write!(f, " {} {s}", if *neg { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn q() -> BaseRing {
        BaseRing::Rationals
    }

    fn dual() -> BaseRing {
        BaseRing::nilpotent(2).unwrap()
    }

    fn eps_t(base: BaseRing, e: i64) -> LaurentSeries {
        LaurentSeries::monomial(base.eps().unwrap(), e)
    }

    #[test]
    fn geometric_series() {
        let f = LaurentSeries::from_rationals(q(), 0, &[int(1), int(-1)], None);
        let g = f.invert(6).unwrap();
        assert_eq!(g, LaurentSeries::from_rationals(q(), 0, &vec![int(1); 6], Some(6)));
        assert_eq!(g.to_string(), "1 + t + t^2 + t^3 + t^4 + t^5 + O(t^6)");
    }

    #[test]
    fn monomial_inverse_is_exact() {
        let g = LaurentSeries::t_pow(q(), 2).invert(10).unwrap();
        assert_eq!(g, LaurentSeries::t_pow(q(), -2));
    }

    #[test]
    fn nilpotent_perturbation_inverse() {
        let b = dual();
        let f = &LaurentSeries::one(b) + &eps_t(b, -1);
        let g = f.invert(10).unwrap();
        assert_eq!(g, &LaurentSeries::one(b) - &eps_t(b, -1));
        assert!(g.is_exact());
    }

    #[test]
    fn valuations() {
        let f = &LaurentSeries::t_pow(q(), -3) + &LaurentSeries::t_pow(q(), 1);
        assert_eq!(f.valuation().unwrap(), -3);
        let b = dual();
        let g = &eps_t(b, -5) + &LaurentSeries::t_pow(b, 2);
        assert_eq!(g.valuation().unwrap(), 2);
        assert_eq!(LaurentSeries::zero(q()).valuation(), Err(Error::Indeterminate));
        assert_eq!(eps_t(b, 0).invert(4).unwrap_err(), Error::NotAUnit("eps".into()));
    }

    #[test]
    fn derivative_and_residue() {
        let t2 = LaurentSeries::t_pow(q(), 2);
        assert_eq!(t2.derivative(), LaurentSeries::monomial(q().constant(int(2)), 1));
        assert!(t2.residue().unwrap().is_zero());
        assert!(LaurentSeries::t_pow(q(), -1).residue().unwrap().is_one());
        assert_eq!(
            LaurentSeries::t_pow(q(), -1).derivative(),
            LaurentSeries::monomial(q().constant(int(-1)), -2)
        );
        let inexact = LaurentSeries::from_rationals(q(), 0, &[int(1)], Some(3));
        assert_eq!(inexact.derivative().precision(), Some(2));
    }

    #[test]
    fn product_precision_is_pessimistic() {
        let f = LaurentSeries::from_rationals(q(), -1, &[int(1), int(2)], Some(3));
        let g = LaurentSeries::from_rationals(q(), -2, &[int(1)], Some(1));
        let h = &f * &g;
        // f = t^-1 + 2 + O(t^3), g = t^-2 + O(t): error terms at t^{3-2} and t^{1-1}
        assert_eq!(h.precision(), Some(0));
        assert_eq!(h.coeff(-3).unwrap(), q().one());
        assert!(h.coeff(0).is_err());
    }

    #[test]
    fn display_forms() {
        let b = dual();
        let s = &LaurentSeries::monomial(b.constant(rat(3, 2)), -2) + &eps_t(b, 1);
        assert_eq!(s.to_string(), "3/2*t^-2 + eps*t");
        let c = RingElem::from_coeffs(b, vec![int(1), int(-2)]);
        assert_eq!(LaurentSeries::monomial(c.clone(), 2).to_string(), "(1 - 2*eps)*t^2");
        assert_eq!(LaurentSeries::constant(c).to_string(), "(1 - 2*eps)");
        assert_eq!(LaurentSeries::zero(q()).truncate(4).to_string(), "O(t^4)");
        assert_eq!(LaurentSeries::monomial(q().constant(int(-1)), 0).to_string(), "-1");
    }
}
