mod common;

use common::*;
use epsfac_core::family::{
    self, crystal_iso, crystal_iso_direct, cocycle_check, grdet_f, loop_composite, twist_identity_sides,
};
use epsfac_core::parse::{parse_ratfunc, parse_series};
use epsfac_core::{BaseRing, Error, FamilyForm, GlobalRank1Connection, LaurentSeries, Point, RingElem, TwistUnit};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn nilpotent_base(b: usize) -> BaseRing {
    [BaseRing::Nilpotent(2), BaseRing::Nilpotent(3)][b]
}

/// `1 + n` with `n` a random nilpotent Laurent polynomial.
fn one_plus_nilpotent(rng: &mut ChaCha8Rng, base: BaseRing) -> LaurentSeries {
    let mut terms: Vec<(i64, RingElem)> = Vec::new();
    for e in -3..=3 {
        if rng.gen_bool(0.5) {
            terms.push((e, nilpotent_elem(rng, base)));
        }
    }
    &LaurentSeries::one(base) + &LaurentSeries::from_terms(base, terms, None)
}

fn twist_family(rng: &mut ChaCha8Rng, base: BaseRing) -> Vec<LaurentSeries> {
    let eps = base.eps().unwrap();
    let mut out = vec![
        LaurentSeries::t_pow(base, 1),
        LaurentSeries::t_pow(base, -1),
        LaurentSeries::constant(base.constant(rat_q(2))),
        LaurentSeries::constant(&base.one() + &eps),
        unit(rng, base),
    ];
    for k in 1..=3 {
        out.push(&LaurentSeries::one(base) + &LaurentSeries::monomial(eps.clone(), -k));
    }
    out
}

fn rat_q(n: i64) -> epsfac_core::Rational {
    q(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn twist_identity(seed in any::<u64>(), n in 1usize..=2, b in 0usize..2) {
        let s = specs(seed, n);
        let c = connection(&s);
        let base = nilpotent_base(b);
        let mut r = rng(seed);
        let nu = FamilyForm::new(unit(&mut r, base)).unwrap();
        for f in twist_family(&mut r, base) {
            let tw = TwistUnit::new(f.clone()).unwrap();
            let (lhs, rhs) = twist_identity_sides(&c, &nu, &tw, W).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            // independent bookkeeping: grade drops by r val(f), unit by kappa(f)^-r
            let plain = family::epsilon_tilde(&c, &nu, W).unwrap();
            let rank = rank_of(&s);
            prop_assert_eq!(lhs.grade(), plain.grade() - rank * f.valuation().unwrap());
            let want = plain.unit() * &kappa_oracle(&f, W).pow(-rank).unwrap();
            prop_assert_eq!(lhs.unit(), &want);
        }
    }

    #[test]
    fn crystal_cocycle(seed in any::<u64>(), n in 1usize..=2, b in 0usize..2) {
        let s = specs(seed, n);
        let c = connection(&s);
        let base = nilpotent_base(b);
        let mut r = rng(seed);
        let u = unit(&mut r, base);
        let f2 = one_plus_nilpotent(&mut r, base);
        let f3 = one_plus_nilpotent(&mut r, base);
        let n1 = FamilyForm::new(u.clone()).unwrap();
        let n2 = FamilyForm::new(&u * &f2).unwrap();
        let n3 = FamilyForm::new(&u * &f3).unwrap();
        prop_assert!(cocycle_check(&c, &n1, &n2, &n3, W).unwrap());
        let rank = rank_of(&s);
        let c21 = crystal_iso(&c, &n1, &n2, W).unwrap();
        let c31 = crystal_iso(&c, &n1, &n3, W).unwrap();
        prop_assert_eq!(&c21, &kappa_oracle(&f2, W).pow(-rank).unwrap());
        prop_assert_eq!(&c31, &kappa_oracle(&f3, W).pow(-rank).unwrap());
        prop_assert_eq!(&c21, &crystal_iso_direct(&c, &n1, &n2, W).unwrap());
        prop_assert!(c21.reduce().is_one());
        prop_assert!(loop_composite(&c, &[n1.clone(), n2.clone(), n3.clone()], W).unwrap().is_one());
        prop_assert!(loop_composite(&c, &[n1, n3, n2], W).unwrap().is_one());
    }

    #[test]
    fn grdet_f_grade(seed in any::<u64>(), rank in 1usize..=2, b in 0usize..2) {
        let base = nilpotent_base(b);
        let mut r = rng(seed);
        let l = lattice(&mut r, base, rank);
        let f = unit(&mut r, base);
        let g = grdet_f(&TwistUnit::new(f.clone()).unwrap(), &l, W).unwrap();
        prop_assert_eq!(g.grade(), rank as i64 * f.valuation().unwrap());
        prop_assert_eq!(g.unit(), &kappa_oracle(&f, W).pow(rank as i64).unwrap());
    }
}

#[test]
fn reduction_mismatch_is_rejected() {
    let base = BaseRing::Nilpotent(2);
    let c = connection(&specs(7, 1));
    let a = FamilyForm::new(LaurentSeries::one(base)).unwrap();
    let b = FamilyForm::new(parse_series("1 + t", base).unwrap()).unwrap();
    assert!(matches!(crystal_iso(&c, &a, &b, W), Err(Error::ReductionMismatch)));
}

#[test]
fn global_comparison_on_p1() {
    let base = BaseRing::Nilpotent(2);
    let conn = GlobalRank1Connection::new(
        parse_ratfunc("1/(2*t)", BaseRing::Rationals).unwrap(),
        vec![Point::parse("0").unwrap(), Point::Infinity],
    )
    .unwrap();
    let u1 = parse_ratfunc("1", base).unwrap();
    for (g, want) in [("1 + eps/t", "1"), ("1 + eps", "1 - 2*eps"), ("1 + eps*t", "1")] {
        let u2 = parse_ratfunc(g, base).unwrap();
        let c = family::global_crystal_iso(&conn, &u1, &u2, W).unwrap();
        assert_eq!(c, parse_series(want, base).unwrap().coeff(0).unwrap(), "{g}");
    }
}
