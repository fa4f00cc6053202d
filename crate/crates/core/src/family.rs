//! Epsilon lines over `A = Q[eps]/(eps^N)`: `grdet(f)`, the twist identity,
//! and the comparison isomorphisms between forms with equal reduction.

use crate::connection::{self, FormalConnection};
use crate::curve::{self, GlobalRank1Connection};
use crate::error::{Error, Result};
use crate::graded_line::TrivializedGradedLine;
use crate::lattice::{self, Lattice};
use crate::poly::RatFunc;
use crate::ring::RingElem;
use crate::series::LaurentSeries;

/// `ν = u dt` with `u` a unit of `A((t))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyForm {
    u: LaurentSeries,
}

impl FamilyForm {
    pub fn new(u: LaurentSeries) -> Result<Self> {
        u.valuation().map_err(|_| Error::NotAUnit(u.to_string()))?;
        Ok(FamilyForm { u })
    }

    pub fn u(&self) -> &LaurentSeries {
        &self.u
    }

    /// `f ν`.
    pub fn twist(&self, f: &TwistUnit) -> Result<Self> {
        self.u.base().check_same(f.f.base())?;
        FamilyForm::new(&self.u * &f.f)
    }
}

/// A unit `f` of `A((t))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistUnit {
    f: LaurentSeries,
}

impl TwistUnit {
    pub fn new(f: LaurentSeries) -> Result<Self> {
        f.valuation().map_err(|_| Error::NotAUnit(f.to_string()))?;
        Ok(TwistUnit { f })
    }

    pub fn f(&self) -> &LaurentSeries {
        &self.f
    }

    /// `f` with `ν₂ = f ν₁`.
    pub fn between(nu1: &FamilyForm, nu2: &FamilyForm, work: i64) -> Result<Self> {
        TwistUnit::new(&nu2.u * &nu1.u.invert(work)?)
    }

    pub fn is_one_mod_nilpotents(&self) -> bool {
        let d = &self.f.reduce() - &LaurentSeries::one(crate::ring::BaseRing::Rationals);
        d.is_known_zero()
    }
}

/// `grdet(f^-1 L : L)`; grade `r * val(f)`.
pub fn grdet_f(f: &TwistUnit, l: &Lattice, work: i64) -> Result<TrivializedGradedLine> {
    let l = l.change_base(f.f.base());
    lattice::relative_det(&l.divide(&f.f)?, &l, work)
}

/// `ν^-1(N ⊗ Ω¹)` for the canonical good pair of `conn`.
pub fn twisted_lattice(conn: &FormalConnection, nu: &FamilyForm, work: i64) -> Result<Lattice> {
    connection::nu_inverse_lattice(&connection::good_pair(conn).n, &nu.u, work)
}

pub fn epsilon_tilde(conn: &FormalConnection, nu: &FamilyForm, work: i64) -> Result<TrivializedGradedLine> {
    connection::epsilon_tilde(conn, &nu.u, work)
}

/// Both sides of `ε̃_{fν} = ε̃_ν ⊗ grdet(f^-1 Λ : Λ)^-1`, `Λ = ν^-1(N ⊗ Ω¹)`.
pub fn twist_identity_sides(
    conn: &FormalConnection,
    nu: &FamilyForm,
    f: &TwistUnit,
    work: i64,
) -> Result<(TrivializedGradedLine, TrivializedGradedLine)> {
    let lhs = epsilon_tilde(conn, &nu.twist(f)?, work)?;
    let correction = grdet_f(f, &twisted_lattice(conn, nu, work)?, work)?;
    let rhs = epsilon_tilde(conn, nu, work)?.tensor(&correction.inverse())?;
    Ok((lhs, rhs))
}

pub fn twist_identity_check(conn: &FormalConnection, nu: &FamilyForm, f: &TwistUnit, work: i64) -> Result<bool> {
    let (l, r) = twist_identity_sides(conn, nu, f, work)?;
    Ok(l == r)
}

fn check_same_reduction(nu1: &FamilyForm, nu2: &FamilyForm) -> Result<()> {
    nu1.u.base().check_same(nu2.u.base())?;
    if !(&nu1.u.reduce() - &nu2.u.reduce()).is_known_zero() {
        return Err(Error::ReductionMismatch);
    }
    Ok(())
}

/// `c₂₁`: the unit of `grdet(f₂₁^-1 Λ₁ : Λ₁)^-1`, `ν₂ = f₂₁ ν₁`, which
/// carries the basis of `ε̃_{ν₁}` to that of `ε̃_{ν₂}`.
pub fn crystal_iso(conn: &FormalConnection, nu1: &FamilyForm, nu2: &FamilyForm, work: i64) -> Result<RingElem> {
    check_same_reduction(nu1, nu2)?;
    // grdet(f^-1 Λ₁ : Λ₁) with f^-1 = u₁ / u₂ kept as an exact quotient
    let l = twisted_lattice(conn, nu1, work)?;
    let g = lattice::relative_det(&l.scale(&nu1.u)?.divide(&nu2.u)?, &l, work)?;
    debug_assert_eq!(g.grade(), 0);
    Ok(g.inverse().unit().clone())
}

/// `c₂₁` read off directly as the unit of `ε̃_{ν₁}^-1 ⊗ ε̃_{ν₂}`.
pub fn crystal_iso_direct(conn: &FormalConnection, nu1: &FamilyForm, nu2: &FamilyForm, work: i64) -> Result<RingElem> {
    check_same_reduction(nu1, nu2)?;
    let e1 = epsilon_tilde(conn, nu1, work)?;
    let e2 = epsilon_tilde(conn, nu2, work)?;
    Ok(e1.inverse().tensor(&e2)?.unit().clone())
}

/// `c₃₂ c₂₁ = c₃₁`, and each iso agrees with the direct ratio.
pub fn cocycle_check(
    conn: &FormalConnection,
    nu1: &FamilyForm,
    nu2: &FamilyForm,
    nu3: &FamilyForm,
    work: i64,
) -> Result<bool> {
    let c21 = crystal_iso(conn, nu1, nu2, work)?;
    let c32 = crystal_iso(conn, nu2, nu3, work)?;
    let c31 = crystal_iso(conn, nu1, nu3, work)?;
    let direct = [(nu1, nu2, &c21), (nu2, nu3, &c32), (nu1, nu3, &c31)]
        .into_iter()
        .map(|(a, b, c)| Ok(crystal_iso_direct(conn, a, b, work)? == *c))
        .collect::<Result<Vec<bool>>>()?;
    Ok(&c32 * &c21 == c31 && direct.into_iter().all(|x| x))
}

/// Product of the isos `ν₁ -> ν₂ -> ... -> ν_k -> ν₁`.
pub fn loop_composite(conn: &FormalConnection, forms: &[FamilyForm], work: i64) -> Result<RingElem> {
    let base = forms.first().ok_or_else(|| Error::Dimension("empty loop".into()))?.u.base();
    let mut acc = base.one();
    for (i, a) in forms.iter().enumerate() {
        let b = &forms[(i + 1) % forms.len()];
        acc = &acc * &crystal_iso(conn, a, b, work)?;
    }
    Ok(acc)
}

/// Units of `grdet_f(f, L)` for each lattice, for recording how they
/// depend on `L`.
pub fn grdet_f_lattice_dependence(f: &TwistUnit, lattices: &[Lattice], work: i64) -> Result<Vec<RingElem>> {
    lattices.iter().map(|l| Ok(grdet_f(f, l, work)?.unit().clone())).collect()
}

/// Global comparison on `P^1`: product over the points of `D` of the
/// local comparison units between `u₁ dt` and `u₂ dt`.
pub fn global_crystal_iso(conn: &GlobalRank1Connection, u1: &RatFunc, u2: &RatFunc, work: i64) -> Result<RingElem> {
    if u1.reduce() != u2.reduce() {
        return Err(Error::ReductionMismatch);
    }
    let e1 = curve::local_epsilon_factors(conn, u1, work)?;
    let e2 = curve::local_epsilon_factors(conn, u2, work)?;
    let mut acc = u1.base().one();
    for ((_, a), (_, b)) in e1.iter().zip(&e2) {
        acc = &acc * a.inverse().tensor(b)?.unit();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::LTCell;
    use crate::parse::parse_series;
    use crate::ring::{int, BaseRing};

    const W: i64 = 16;

    fn dual() -> BaseRing {
        BaseRing::nilpotent(2).unwrap()
    }

    fn s(base: BaseRing, x: &str) -> LaurentSeries {
        parse_series(x, base).unwrap()
    }

    fn form(base: BaseRing, x: &str) -> FamilyForm {
        FamilyForm::new(s(base, x)).unwrap()
    }

    fn unit(base: BaseRing, x: &str) -> TwistUnit {
        TwistUnit::new(s(base, x)).unwrap()
    }

    #[test]
    fn grdet_f_examples() {
        let q = BaseRing::Rationals;
        let o = Lattice::standard(q, 1);
        assert_eq!(grdet_f(&unit(q, "1"), &o, W).unwrap(), TrivializedGradedLine::trivial(q));
        assert_eq!(grdet_f(&unit(q, "t"), &o, W).unwrap().grade(), 1);
        let g = grdet_f(&unit(dual(), "1 + eps*t^-1"), &Lattice::standard(dual(), 1), W).unwrap();
        assert_eq!(g.grade(), 0);
        assert!(g.unit().is_unit());
        assert!(g.unit().reduce().is_one());
    }

    #[test]
    fn twist_examples() {
        let triv = FormalConnection::trivial(1);
        let q = BaseRing::Rationals;
        assert!(twist_identity_check(&triv, &form(q, "1"), &unit(q, "1"), W).unwrap());
        let (l, r) = twist_identity_sides(&triv, &form(q, "1"), &unit(q, "t"), W).unwrap();
        assert_eq!(l.grade(), -2);
        assert_eq!(l, r);
        let d = dual();
        assert!(twist_identity_check(&triv, &form(d, "1"), &unit(d, "1 + eps*t^-1"), W).unwrap());
    }

    #[test]
    fn crystal_examples() {
        let d = dual();
        let triv = FormalConnection::trivial(1);
        let nu = form(d, "1");
        assert!(crystal_iso(&triv, &nu, &nu, W).unwrap().is_one());
        let c = crystal_iso(&triv, &nu, &form(d, "1 + eps"), W).unwrap();
        assert_eq!(c, s(d, "1 - eps").coeff(0).unwrap());
        let c = crystal_iso(&triv, &nu, &form(d, "1 + eps*t^-1"), W).unwrap();
        assert_eq!(c.reduction(), int(1));
        assert!(matches!(crystal_iso(&triv, &nu, &form(d, "2"), W), Err(Error::ReductionMismatch)));
    }

    #[test]
    fn cocycle_examples() {
        let d = dual();
        let c = FormalConnection::from_cells(vec![LTCell::new(s(BaseRing::Rationals, "t^-1"), int(0), 1, 1).unwrap()])
            .unwrap();
        let n1 = form(d, "1");
        let n2 = form(d, "1 + eps*t^-1");
        let n3 = form(d, "1 + eps*t^-1 + eps*t^-2");
        assert!(cocycle_check(&c, &n1, &n1, &n1, W).unwrap());
        assert!(cocycle_check(&c, &n1, &n2, &n3, W).unwrap());
        assert!(loop_composite(&c, &[n1, n2, n3], W).unwrap().is_one());
    }
}
