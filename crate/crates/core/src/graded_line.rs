//! Graded lines with a chosen basis, stored as `(grade, unit)`.
//!
//! Every line produced by this crate comes with a basis fixed by the
//! operation that produced it, so isomorphisms between lines are unit
//! scalars and comparisons are equalities of pairs. Koszul signs appear
//! only through [`TrivializedGradedLine::braid_sign`]; the tensor product
//! never reorders factors.

use std::fmt;

use crate::error::Result;
use crate::ring::{BaseRing, RingElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrivializedGradedLine {
    grade: i64,
    unit: RingElem,
}

impl TrivializedGradedLine {
    pub fn new(grade: i64, unit: RingElem) -> Result<Self> {
        if !unit.is_unit() {
            return Err(crate::Error::NotAUnit(unit.to_string()));
        }
        Ok(TrivializedGradedLine { grade, unit })
    }

    /// `(0, 1)`.
    pub fn trivial(base: BaseRing) -> Self {
        TrivializedGradedLine { grade: 0, unit: base.one() }
    }

    /// `(grade, 1)`.
    pub fn of_grade(base: BaseRing, grade: i64) -> Self {
        TrivializedGradedLine { grade, unit: base.one() }
    }

    pub fn grade(&self) -> i64 {
        self.grade
    }

    pub fn unit(&self) -> &RingElem {
        &self.unit
    }

    pub fn base(&self) -> BaseRing {
        self.unit.base()
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.base().check_same(other.base())?;
        Ok(TrivializedGradedLine { grade: self.grade + other.grade, unit: &self.unit * &other.unit })
    }

    pub fn inverse(&self) -> Self {
        TrivializedGradedLine {
            grade: -self.grade,
            unit: self.unit.inverse().expect("graded line units are invertible"),
        }
    }

    /// Sign `(-1)^{n_1 n_2}` of the symmetry `a ⊗ b -> b ⊗ a`.
    pub fn braid_sign(&self, other: &Self) -> Result<RingElem> {
        self.base().check_same(other.base())?;
        Ok(RingElem::neg_one_pow(self.base(), self.grade * other.grade))
    }

    /// Tensor product of a list, left to right; the empty product is trivial.
    pub fn tensor_all<'a>(base: BaseRing, lines: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        lines.into_iter().try_fold(Self::trivial(base), |acc, l| acc.tensor(l))
    }

    pub fn reduce(&self) -> Self {
        TrivializedGradedLine { grade: self.grade, unit: self.unit.reduce() }
    }

    /// Same line viewed over another base (used to base-change `Q` lines).
    pub fn change_base(&self, base: BaseRing) -> Self {
        TrivializedGradedLine { grade: self.grade, unit: self.unit.change_base(base) }
    }
}

/// `(grade, unit)`, e.g. `(-1, 1)` or `(0, 1 - 2*eps)`.
impl fmt::Display for TrivializedGradedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.grade, self.unit)
    }
}

/// Graded determinant of a finite graded vector space, with `dims[i] =
/// (degree, dimension)`: grade `sum (-1)^i h^i`, unit `prod u_i^{(-1)^i}`.
pub fn grdet_of_graded_vector_spaces(
    base: BaseRing,
    dims: &[(i64, u64)],
    units: Option<&[RingElem]>,
) -> Result<TrivializedGradedLine> {
    let mut grade = 0i64;
    let mut unit = base.one();
    for (k, &(deg, h)) in dims.iter().enumerate() {
        let sign = if deg.rem_euclid(2) == 0 { 1 } else { -1 };
        grade += sign * h as i64;
        if let Some(us) = units {
            let u = &us[k];
            unit = &unit * &u.pow(sign)?;
        }
    }
    TrivializedGradedLine::new(grade, unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, rat};
    use proptest::prelude::*;

    fn line(base: BaseRing, g: i64, c: &[(i64, i64)]) -> TrivializedGradedLine {
        let coeffs = c.iter().map(|&(n, d)| rat(n, d)).collect();
        TrivializedGradedLine::new(g, RingElem::from_coeffs(base, coeffs)).unwrap()
    }

    #[test]
    fn tensor_examples() {
        let q = BaseRing::Rationals;
        let a = line(q, 2, &[(3, 1)]);
        let b = line(q, -2, &[(1, 3)]);
        assert_eq!(a.tensor(&b).unwrap(), TrivializedGradedLine::trivial(q));
        let u = line(q, 5, &[(7, 2)]);
        assert_eq!(TrivializedGradedLine::trivial(q).tensor(&u).unwrap(), u);
        let d = BaseRing::nilpotent(2).unwrap();
        let x = line(d, 1, &[(1, 1), (1, 1)]);
        let y = line(d, 1, &[(1, 1), (-1, 1)]);
        assert_eq!(x.tensor(&y).unwrap(), TrivializedGradedLine::of_grade(d, 2));
    }

    #[test]
    fn base_mismatch() {
        let a = TrivializedGradedLine::trivial(BaseRing::Rationals);
        let b = TrivializedGradedLine::trivial(BaseRing::nilpotent(2).unwrap());
        assert!(a.tensor(&b).is_err());
        assert!(a.braid_sign(&b).is_err());
    }

    #[test]
    fn braid_and_inverse() {
        let q = BaseRing::Rationals;
        let (u, v) = (line(q, 1, &[(2, 1)]), line(q, 1, &[(5, 1)]));
        assert_eq!(u.braid_sign(&v).unwrap(), q.constant(int(-1)));
        let (u, v) = (line(q, 2, &[(2, 1)]), line(q, 3, &[(5, 1)]));
        assert!(u.braid_sign(&v).unwrap().is_one());
        assert_eq!(line(q, 3, &[(2, 1)]).inverse(), line(q, -3, &[(1, 2)]));
    }

    #[test]
    fn grdet_examples() {
        let q = BaseRing::Rationals;
        let g = |d: &[(i64, u64)]| grdet_of_graded_vector_spaces(q, d, None).unwrap().grade();
        assert_eq!(g(&[(0, 1), (1, 1)]), 0);
        assert_eq!(g(&[(0, 1), (1, 0)]), 1);
        assert_eq!(g(&[(0, 0), (1, 2)]), -2);
        let units = [q.constant(int(3)), q.constant(int(2))];
        let l = grdet_of_graded_vector_spaces(q, &[(0, 1), (1, 1)], Some(&units)).unwrap();
        assert_eq!(l.unit(), &q.constant(rat(3, 2)));
    }

    fn arb_line() -> impl Strategy<Value = TrivializedGradedLine> {
        let b = BaseRing::nilpotent(3).unwrap();
        (-6i64..7, 1i64..9, -4i64..5, -4i64..5)
            .prop_map(move |(g, c0, c1, c2)| line(b, g, &[(c0, 1), (c1, 2), (c2, 3)]))
    }

    proptest! {
        #[test]
        fn monoid_laws(a in arb_line(), b in arb_line(), c in arb_line()) {
            let base = a.base();
            let ab_c = a.tensor(&b).unwrap().tensor(&c).unwrap();
            let a_bc = a.tensor(&b.tensor(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert_eq!(a.tensor(&TrivializedGradedLine::trivial(base)).unwrap(), a.clone());
            prop_assert_eq!(a.tensor(&a.inverse()).unwrap(), TrivializedGradedLine::trivial(base));
            prop_assert_eq!(a.inverse().tensor(&a).unwrap(), TrivializedGradedLine::trivial(base));
        }

        #[test]
        fn braid_symmetric(a in arb_line(), b in arb_line()) {
            let s = a.braid_sign(&b).unwrap();
            prop_assert_eq!(&s, &b.braid_sign(&a).unwrap());
            let odd = a.grade().rem_euclid(2) == 1 && b.grade().rem_euclid(2) == 1;
            prop_assert_eq!(s.is_one(), !odd);
        }
    }
}
