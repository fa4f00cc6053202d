//! Lattices in `A((t))^r` given by a basis matrix, and their relative
//! determinants.
//!
//! A lattice carries the basis it was built with, together with an exact
//! scalar denominator so that dividing by an exact unit loses no
//! precision. The grade of
//! [`relative_det`] depends only on the two modules; the unit is the
//! normalized constant part of `det(B1^-1 B2)` (see
//! [`normalized_constant_part`]) and so is sensitive to the bases over
//! nilpotent coefficients.

use std::fmt;

use crate::error::{Error, Result};
use crate::graded_line::TrivializedGradedLine;
use crate::matrix::{self, SeriesMatrix};
use crate::ring::{int, BaseRing, RingElem};
use crate::series::LaurentSeries;

/// Full-rank `A[[t]]`-submodule of `A((t))^r`, spanned by the columns of
/// `basis / denom`.
#[derive(Clone, Debug)]
pub struct Lattice {
    base: BaseRing,
    basis: SeriesMatrix,
    denom: LaurentSeries,
}

impl Lattice {
    pub fn standard(base: BaseRing, rank: usize) -> Self {
        Lattice { base, basis: matrix::identity(base, rank), denom: LaurentSeries::one(base) }
    }

    pub fn from_basis(basis: SeriesMatrix) -> Result<Self> {
        let r = basis.len();
        if r == 0 || basis.iter().any(|row| row.len() != r) {
            return Err(Error::Dimension(format!("basis must be a nonempty square matrix, got {r} rows")));
        }
        let base = basis[0][0].base();
        for x in basis.iter().flatten() {
            base.check_same(x.base())?;
        }
        let d = matrix::det(&basis, crate::DEFAULT_PRECISION)?;
        d.valuation().map_err(|_| Error::NotAUnit(format!("basis determinant {d}")))?;
        Ok(Lattice { base, basis, denom: LaurentSeries::one(base) })
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Basis matrix before division by [`Lattice::denominator`].
    pub fn basis(&self) -> &SeriesMatrix {
        &self.basis
    }

    /// The exact unit `d` with `L = d^-1 * basis * A[[t]]^r`.
    pub fn denominator(&self) -> &LaurentSeries {
        &self.denom
    }

    /// `basis / denom`, with the inverse expanded to `work` terms.
    pub fn frame(&self, work: i64) -> Result<SeriesMatrix> {
        if self.denom.is_exact() && self.denom.terms().eq([(0, &self.base.one())]) {
            return Ok(self.basis.clone());
        }
        Ok(matrix::scale(&self.basis, &self.denom.invert(work)?))
    }

    /// `f * L`.
    pub fn scale(&self, f: &LaurentSeries) -> Result<Self> {
        self.base.check_same(f.base())?;
        f.valuation().map_err(|_| Error::NotAUnit(f.to_string()))?;
        Ok(Lattice { basis: matrix::scale(&self.basis, f), ..self.clone() })
    }

    /// `f^-1 * L`, kept exact when `f` is.
    pub fn divide(&self, f: &LaurentSeries) -> Result<Self> {
        self.base.check_same(f.base())?;
        f.valuation().map_err(|_| Error::NotAUnit(f.to_string()))?;
        Ok(Lattice { denom: &self.denom * f, ..self.clone() })
    }

    /// `t^-m * L`.
    pub fn shift(&self, m: i64) -> Self {
        Lattice { basis: matrix::scale(&self.basis, &LaurentSeries::t_pow(self.base, -m)), ..self.clone() }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.base.check_same(other.base)?;
        if self.denom == other.denom {
            return Ok(Lattice { basis: matrix::block_sum(&self.basis, &other.basis), ..self.clone() });
        }
        let a = matrix::scale(&self.basis, &other.denom);
        let b = matrix::scale(&other.basis, &self.denom);
        Ok(Lattice { base: self.base, basis: matrix::block_sum(&a, &b), denom: &self.denom * &other.denom })
    }

    pub fn change_base(&self, base: BaseRing) -> Self {
        Lattice { base, basis: matrix::change_base(&self.basis, base), denom: self.denom.change_base(base) }
    }

    pub fn reduce(&self) -> Self {
        self.change_base(BaseRing::Rationals)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.base.check_same(other.base)?;
        if self.rank() != other.rank() {
            return Err(Error::Dimension(format!("ranks {} and {}", self.rank(), other.rank())));
        }
        Ok(())
    }

    /// `B_self^-1 * B_other`.
    pub fn transition(&self, other: &Self, work: i64) -> Result<SeriesMatrix> {
        self.check_compatible(other)?;
        let p = matrix::mul(&matrix::inverse(&self.basis, work)?, &other.basis);
        if self.denom == other.denom {
            return Ok(p);
        }
        Ok(matrix::scale(&p, &(&self.denom * &other.denom.invert(work)?)))
    }

    /// Whether both lattices are the same submodule.
    pub fn same_module(&self, other: &Self, work: i64) -> Result<bool> {
        Ok(lattice_contains(self, other, work)? && lattice_contains(other, self, work)?)
    }
}

/// Basis rows, e.g. `[[t^-1, 0], [0, 1]]`.
impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))?;
        if !self.denom.terms().eq([(0, &self.base.one())]) {
            write!(f, " / ({})", self.denom)?;
        }
        Ok(())
    }
}

pub fn standard_lattice(base: BaseRing, rank: usize) -> Lattice {
    Lattice::standard(base, rank)
}

pub fn scale_lattice(l: &Lattice, f: &LaurentSeries) -> Result<Lattice> {
    l.scale(f)
}

pub fn shift_lattice(l: &Lattice, m: i64) -> Lattice {
    l.shift(m)
}

/// Whether every entry lies in `A[[t]]`. Any known nonzero coefficient at
/// a negative exponent decides `false`.
fn is_integral(m: &SeriesMatrix) -> Result<bool> {
    let mut undecided = false;
    for x in m.iter().flatten() {
        if x.terms().any(|(e, _)| e < 0) {
            return Ok(false);
        }
        if x.precision().is_some_and(|p| p <= 0) {
            undecided = true;
        }
    }
    if undecided {
        return Err(Error::InsufficientPrecision("integrality test needs coefficients below t^0".into()));
    }
    Ok(true)
}

/// Whether `l2` is contained in `l1`.
pub fn lattice_contains(l1: &Lattice, l2: &Lattice, work: i64) -> Result<bool> {
    is_integral(&l1.transition(l2, work)?)
}

/// Least `n >= 0` with `t^n * l1` contained in `l2`.
pub fn common_sublattice_depth(l1: &Lattice, l2: &Lattice, work: i64) -> Result<i64> {
    let g = l2.transition(l1, work)?;
    let mut n = 0i64;
    for x in g.iter().flatten() {
        let lo = match (x.low_exponent(), x.precision()) {
            (Some(lo), Some(p)) => lo.min(p),
            (Some(lo), None) => lo,
            (None, Some(p)) => p,
            (None, None) => continue,
        };
        n = n.max(-lo);
    }
    Ok(n)
}

/// `t^n * l1` for the least `n >= 0` making it a sublattice of `l2`.
pub fn common_sublattice(l1: &Lattice, l2: &Lattice, work: i64) -> Result<Lattice> {
    let n = common_sublattice_depth(l1, l2, work)?;
    let s = l1.shift(-n);
    if !lattice_contains(l2, &s, work)? {
        return Err(Error::InsufficientPrecision("common sublattice".into()));
    }
    Ok(s)
}

/// Elementary divisor exponents of `l2` relative to `l1`, computed on the
/// reduction modulo nilpotents, sorted ascending.
pub fn smith_exponents(l1: &Lattice, l2: &Lattice, work: i64) -> Result<Vec<i64>> {
    l1.check_compatible(l2)?;
    let b1 = matrix::change_base(&l1.basis, BaseRing::Rationals);
    if let Some(adj) = matrix::exact_adjugate(&b1) {
        let b2 = matrix::change_base(&l2.basis, BaseRing::Rationals);
        if b2.iter().flatten().all(LaurentSeries::is_exact) {
            // B1^-1 B2 = adj(B1) B2 / det B1
            let v = matrix::det(&b1, work)?.valuation()? + l2.denom.valuation()? - l1.denom.valuation()?;
            let d = matrix::determinantal_valuations(&matrix::mul(&adj, &b2))?;
            return Ok((0..d.len()).map(|k| d[k] - if k == 0 { 0 } else { d[k - 1] } - v).collect());
        }
    }
    let g = l1.transition(l2, work)?;
    let mut a: SeriesMatrix = g.iter().map(|r| r.iter().map(LaurentSeries::reduce).collect()).collect();
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in k..n {
            for j in k..n {
                if let Ok(v) = a[i][j].valuation() {
                    if best.is_none_or(|(_, _, b)| v < b) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let (i, j, v) = best.ok_or_else(|| Error::InsufficientPrecision("no pivot in elementary divisor form".into()))?;
        a.swap(k, i);
        for row in a.iter_mut() {
            row.swap(k, j);
        }
        let pinv = a[k][k].invert(work)?;
        for r in k + 1..n {
            let f = &a[r][k] * &pinv;
            for c in k..n {
                let t = &f * &a[k][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
        for c in k + 1..n {
            let f = &a[k][c] * &pinv;
            for r in k..n {
                let t = &f * &a[r][k];
                a[r][c] = &a[r][c] - &t;
            }
        }
        out.push(v);
    }
    out.sort_unstable();
    Ok(out)
}

/// For a unit `u = t^v * a * U+ * U-` of `A((t))` (with `U+` in
/// `1 + t A[[t]]` and `U-` in `1 + t^-1 m[t^-1]`, `m` the nilradical),
/// returns `a / red(a)`. This is a character of `A((t))^x` with values
/// in `1 + m`, trivial over `Q`.
pub fn normalized_constant_part(u: &LaurentSeries, work: i64) -> Result<RingElem> {
    let base = u.base();
    if base.is_reduced() {
        return Ok(base.one());
    }
    let v = u.valuation()?;
    let w = u.shift(-v);
    let wbar = w.reduce().change_base(base);
    let span = w.low_exponent().map_or(0, |lo| -lo.min(0));
    let n = base.width() as i64;
    let inv = wbar.invert(work + n * span + 1)?;
    let m = &(&w * &inv) - &LaurentSeries::one(base);
    // log(1 + m) at t^0, then exp; both sums stop at the nilpotency order.
    let mut x = base.zero();
    let mut pw = LaurentSeries::one(base);
    for k in 1..n {
        pw = &pw * &m;
        let c = pw.coeff(0)?.scale(&(int(if k % 2 == 1 { 1 } else { -1 }) / int(k)));
        x = &x + &c;
    }
    let mut out = base.one();
    let mut term = base.one();
    for k in 1..n {
        term = (&term * &x).scale(&(int(1) / int(k)));
        out = &out + &term;
    }
    Ok(out)
}

fn pow(x: &LaurentSeries, k: i64) -> LaurentSeries {
    (0..k).fold(LaurentSeries::one(x.base()), |acc, _| &acc * x)
}

/// `det(B1^-1 B2)` computed as `det(B2) / det(B1)`.
pub fn transition_det(l1: &Lattice, l2: &Lattice, work: i64) -> Result<LaurentSeries> {
    l1.check_compatible(l2)?;
    let r = l1.rank() as i64;
    let d1 = &matrix::det(&l1.basis, work)? * &pow(&l2.denom, r);
    let d2 = &matrix::det(&l2.basis, work)? * &pow(&l1.denom, r);
    Ok(&d2 * &d1.invert(work)?)
}

/// `grdet(L1 : L2)`: grade `dim L1/L - dim L2/L` for a common sublattice
/// `L`, equal to the valuation of `det(B1^-1 B2)`.
pub fn relative_det(l1: &Lattice, l2: &Lattice, work: i64) -> Result<TrivializedGradedLine> {
    escalate(work, |w| {
        let d = transition_det(l1, l2, w)?;
        TrivializedGradedLine::new(d.valuation()?, normalized_constant_part(&d, w)?)
    })
}

/// Runs `f` at `work`, doubling it on precision failures up to `8 * work`.
fn escalate<T>(work: i64, f: impl Fn(i64) -> Result<T>) -> Result<T> {
    let mut w = work;
    loop {
        match f(w) {
            Err(e) if e.is_precision() && w < 8 * work => w *= 2,
            other => return other,
        }
    }
}

/// `dim_A(outer / inner)` for `inner` contained in `outer`, by counting a
/// free basis of the image of `inner` in `outer / t^k outer`.
pub fn quotient_rank(outer: &Lattice, inner: &Lattice, work: i64) -> Result<i64> {
    escalate(work, |w| quotient_rank_at(outer, inner, w))
}

fn quotient_rank_at(outer: &Lattice, inner: &Lattice, work: i64) -> Result<i64> {
    let p = outer.transition(inner, work)?;
    if !is_integral(&p)? {
        return Err(Error::InvalidLatticePair("sublattice is not contained in the lattice".into()));
    }
    let k = common_sublattice_depth(outer, inner, work)?.max(1);
    let r = outer.rank();
    let kk = k as usize;
    let mut rows = Vec::new();
    for j in 0..kk {
        for col in 0..r {
            let mut v = vec![outer.base.zero(); r * kk];
            for (row, pr) in p.iter().enumerate() {
                for e in 0..(kk - j) {
                    v[(e + j) * r + row] = pr[col].coeff(e as i64)?;
                }
            }
            rows.push(v);
        }
    }
    Ok((r * kk) as i64 - matrix::free_rank(rows)? as i64)
}

/// Relative determinant with the grade read off literal quotient ranks
/// against the given common sublattice.
pub fn relative_det_with_sublattice(
    l1: &Lattice,
    l2: &Lattice,
    sub: &Lattice,
    work: i64,
) -> Result<TrivializedGradedLine> {
    let grade = quotient_rank(l1, sub, work)? - quotient_rank(l2, sub, work)?;
    let d = transition_det(l1, l2, work)?;
    TrivializedGradedLine::new(grade, normalized_constant_part(&d, work)?)
}

/// `grdet(L1:L2) ⊗ grdet(L2:L3) = grdet(L1:L3)`.
pub fn transitivity_check(l1: &Lattice, l2: &Lattice, l3: &Lattice, work: i64) -> Result<bool> {
    let a = relative_det(l1, l2, work)?;
    let b = relative_det(l2, l3, work)?;
    Ok(a.tensor(&b)? == relative_det(l1, l3, work)?)
}
