mod common;

use common::*;
use epsfac_core::lattice::{self, relative_det, relative_det_with_sublattice, transitivity_check};
use epsfac_core::{BaseRing, Lattice, LaurentSeries, TrivializedGradedLine};
use proptest::prelude::*;

fn arb_case() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 1usize..=2, 0usize..3)
}

#[test]
fn unit_matches_splitting_oracle() {
    for seed in 0..60u64 {
        let mut r = rng(seed);
        let base = bases()[(seed % 3) as usize];
        let rank = 1 + (seed as usize / 3) % 2;
        let l1 = lattice(&mut r, base, rank);
        let l2 = lattice(&mut r, base, rank);
        let d = &leibniz_det(l2.basis()) * &leibniz_det(l1.basis()).invert(W).unwrap();
        let g = relative_det(&l1, &l2, W).unwrap();
        assert_eq!(g.grade(), d.valuation().unwrap(), "seed {seed}");
        assert_eq!(*g.unit(), kappa_oracle(&d, W), "seed {seed}");
    }
}

#[test]
fn constant_scaling_units() {
    for base in [BaseRing::Nilpotent(2), BaseRing::Nilpotent(3)] {
        let f = LaurentSeries::constant(&base.one() + &base.eps().unwrap());
        for rank in 1..=3 {
            let o = Lattice::standard(base, rank);
            let g = relative_det(&o, &o.scale(&f).unwrap(), W).unwrap();
            assert_eq!(g.grade(), 0);
            assert_eq!(*g.unit(), one_plus_eps_pow(base, rank as i64));
        }
    }
}

#[test]
fn polar_nilpotent_scaling_is_trivial() {
    let base = BaseRing::Nilpotent(3);
    let eps = base.eps().unwrap();
    let f = &LaurentSeries::one(base) + &LaurentSeries::monomial(eps, -2);
    let o = Lattice::standard(base, 2);
    let g = relative_det(&o, &o.scale(&f).unwrap(), W).unwrap();
    assert_eq!(g, TrivializedGradedLine::trivial(base));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grade_matches_dimension_count((seed, rank, b) in arb_case()) {
        let mut r = rng(seed);
        let base = bases()[b];
        let l1 = lattice(&mut r, base, rank);
        let l2 = lattice(&mut r, base, rank);
        prop_assert_eq!(relative_det(&l1, &l2, W).unwrap().grade(), grade_oracle(&l1, &l2));
    }

    #[test]
    fn transitivity((seed, rank, b) in arb_case()) {
        let mut r = rng(seed);
        let base = bases()[b];
        let ls: Vec<Lattice> = (0..3).map(|_| lattice(&mut r, base, rank)).collect();
        prop_assert!(transitivity_check(&ls[0], &ls[1], &ls[2], W).unwrap());
        let d12 = relative_det(&ls[0], &ls[1], W).unwrap();
        let d23 = relative_det(&ls[1], &ls[2], W).unwrap();
        prop_assert_eq!(d12.tensor(&d23).unwrap(), relative_det(&ls[0], &ls[2], W).unwrap());
    }

    #[test]
    fn antisymmetry_and_identity((seed, rank, b) in arb_case()) {
        let mut r = rng(seed);
        let base = bases()[b];
        let l1 = lattice(&mut r, base, rank);
        let l2 = lattice(&mut r, base, rank);
        prop_assert_eq!(relative_det(&l2, &l1, W).unwrap(), relative_det(&l1, &l2, W).unwrap().inverse());
        prop_assert_eq!(relative_det(&l1, &l1, W).unwrap(), TrivializedGradedLine::trivial(base));
    }

    #[test]
    fn reduction_commutes((seed, rank, b) in arb_case()) {
        let mut r = rng(seed);
        let base = bases()[b];
        let l1 = lattice(&mut r, base, rank);
        let l2 = lattice(&mut r, base, rank);
        let full = relative_det(&l1, &l2, W).unwrap().reduce();
        prop_assert_eq!(full, relative_det(&l1.reduce(), &l2.reduce(), W).unwrap());
    }

    #[test]
    fn common_sublattice_choice_is_irrelevant((seed, rank, b) in arb_case(), extra in 0i64..3) {
        let mut r = rng(seed);
        let base = bases()[b];
        let l1 = lattice(&mut r, base, rank);
        let l2 = lattice(&mut r, base, rank);
        let sub = lattice::common_sublattice(&l1, &l2, W).unwrap();
        let deeper = sub.shift(-extra);
        let a = relative_det_with_sublattice(&l1, &l2, &sub, W).unwrap();
        let b2 = relative_det_with_sublattice(&l1, &l2, &deeper, W).unwrap();
        prop_assert_eq!(&a, &b2);
        prop_assert_eq!(a, relative_det(&l1, &l2, W).unwrap());
    }

    #[test]
    fn shift_grade((seed, rank, b) in arb_case(), m in -3i64..=3) {
        let mut r = rng(seed);
        let base = bases()[b];
        let l = lattice(&mut r, base, rank);
        let g = relative_det(&l.shift(m), &l, W).unwrap();
        prop_assert_eq!(g.grade(), rank as i64 * m);
        prop_assert!(g.unit().is_one());
    }

    #[test]
    fn smith_exponents_sum_to_grade((seed, rank, b) in arb_case()) {
        let mut r = rng(seed);
        let base = bases()[b];
        let l1 = lattice(&mut r, base, rank);
        let l2 = lattice(&mut r, base, rank);
        let s: i64 = lattice::smith_exponents(&l1, &l2, W).unwrap().iter().sum();
        prop_assert_eq!(s, relative_det(&l1, &l2, W).unwrap().grade());
    }
}
