#![allow(dead_code)]

use epsfac_core::matrix::SeriesMatrix;
use epsfac_core::ring::int;
use epsfac_core::ring::rat;
use epsfac_core::{BaseRing, FormalConnection, LTCell, Lattice, LaurentSeries, Rational, RingElem};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod p1;

pub const W: i64 = 24;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bases() -> [BaseRing; 3] {
    [BaseRing::Rationals, BaseRing::Nilpotent(2), BaseRing::Nilpotent(3)]
}

fn small(rng: &mut ChaCha8Rng) -> Rational {
    let n = rng.gen_range(-3i64..=3);
    let d = rng.gen_range(1i64..=2);
    Rational::new(n.into(), d.into())
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let q = small(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

pub fn elem(rng: &mut ChaCha8Rng, base: BaseRing) -> RingElem {
    RingElem::from_coeffs(base, (0..base.width()).map(|_| small(rng)).collect())
}

pub fn nilpotent_elem(rng: &mut ChaCha8Rng, base: BaseRing) -> RingElem {
    let mut c: Vec<Rational> = (0..base.width()).map(|_| small(rng)).collect();
    c[0] = Rational::zero();
    RingElem::from_coeffs(base, c)
}

/// Laurent polynomial with terms in `lo..=hi`.
pub fn poly(rng: &mut ChaCha8Rng, base: BaseRing, lo: i64, hi: i64) -> LaurentSeries {
    let mut terms = Vec::new();
    for e in lo..=hi {
        if rng.gen_bool(0.6) {
            terms.push((e, elem(rng, base)));
        }
    }
    LaurentSeries::from_terms(base, terms, None)
}

/// `t^v * c * (1 + t * poly)` times `1 + nilpotent negative part`.
pub fn unit(rng: &mut ChaCha8Rng, base: BaseRing) -> LaurentSeries {
    let v = rng.gen_range(-2i64..=2);
    let c = LaurentSeries::constant(RingElem::from_coeffs(base, {
        let mut c: Vec<Rational> = (0..base.width()).map(|_| small(rng)).collect();
        c[0] = nonzero(rng);
        c
    }));
    let plus = &LaurentSeries::one(base) + &poly(rng, base, 1, 2);
    let mut u = &(&c * &plus) * &LaurentSeries::t_pow(base, v);
    if !base.is_reduced() {
        let minus: Vec<(i64, RingElem)> = (-2..0).map(|e| (e, nilpotent_elem(rng, base))).collect();
        u = &u * &(&LaurentSeries::one(base) + &LaurentSeries::from_terms(base, minus, None));
    }
    u
}

/// A lattice with exact polynomial frame `diag(u1, u2) * E_upper * E_lower`.
pub fn lattice(rng: &mut ChaCha8Rng, base: BaseRing, rank: usize) -> Lattice {
    let basis: SeriesMatrix = match rank {
        1 => vec![vec![unit(rng, base)]],
        2 => {
            let (u1, u2) = (unit(rng, base), unit(rng, base));
            let (x, y) = (poly(rng, base, -2, 2), poly(rng, base, -2, 2));
            let one = LaurentSeries::one(base);
            let zero = LaurentSeries::zero(base);
            let d = [[u1, zero.clone()], [zero, u2]];
            let e = [[&one + &(&x * &y), x], [y, one]];
            (0..2).map(|i| (0..2).map(|j| &(&d[i][0] * &e[0][j]) + &(&d[i][1] * &e[1][j])).collect()).collect()
        }
        _ => unimplemented!("rank {rank}"),
    };
    Lattice::from_basis(basis).expect("unimodular up to units")
}

/// Determinant by cofactor expansion, rank at most 2.
pub fn leibniz_det(b: &SeriesMatrix) -> LaurentSeries {
    match b.len() {
        1 => b[0][0].clone(),
        2 => &(&b[0][0] * &b[1][1]) - &(&b[0][1] * &b[1][0]),
        n => unimplemented!("rank {n}"),
    }
}

/// `a / red(a)` for `u = t^v a U+ U-`, found by dividing out `U-` one
/// nilpotent order at a time and reading the constant term.
pub fn kappa_oracle(u: &LaurentSeries, work: i64) -> RingElem {
    let base = u.base();
    let one = LaurentSeries::one(base);
    let v = u.valuation().unwrap();
    let w = u.shift(-v);
    let r = w.reduce().change_base(base).invert(work).unwrap();
    let mut w2 = &w * &r;
    for _ in 0..base.width() {
        let nm = (&w2 - &one).part_below(0);
        if nm.is_known_zero() {
            break;
        }
        let neg = -&nm;
        let mut inv = one.clone();
        let mut pw = one.clone();
        for _ in 1..base.width() {
            pw = &pw * &neg;
            inv = &inv + &pw;
        }
        w2 = &w2 * &inv;
    }
    assert!((&w2 - &one).part_below(0).is_known_zero());
    w2.coeff(0).unwrap()
}

/// Rank over `Q` of a list of rational vectors.
pub fn rank_q(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let inv = Rational::one() / &rows[rank][c];
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] * &inv;
                for k in c..cols {
                    let d = &f * &rows[rank][k];
                    rows[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn min_exponent(b: &SeriesMatrix) -> i64 {
    b.iter().flatten().filter_map(|x| x.reduce().low_exponent()).min().unwrap_or(0)
}

/// `dim_Q(L / t^k O)` of the reduction of `l`, spanning `t^j b_i` in the
/// window `t^lo O / t^k O`; requires `t^k O ⊆ L ⊆ t^lo O`.
pub fn window_dim(l: &Lattice, lo: i64, k: i64) -> usize {
    let b: Vec<Vec<LaurentSeries>> = l.basis().iter().map(|r| r.iter().map(|x| x.reduce()).collect()).collect();
    let r = b.len();
    let width = (k - lo) as usize;
    let mut rows = Vec::new();
    for j in 0..(k - lo) {
        for col in 0..r {
            let mut v = vec![Rational::zero(); r * width];
            for (row, br) in b.iter().enumerate() {
                for e in lo..k {
                    let c = br[col].coeff(e - j).unwrap().reduction();
                    v[(e - lo) as usize * r + row] = c;
                }
            }
            rows.push(v);
        }
    }
    rank_q(rows)
}

/// Grade of `grdet(L1 : L2)` by direct dimension counting over `Q`.
pub fn grade_oracle(l1: &Lattice, l2: &Lattice) -> i64 {
    let lo = min_exponent(l1.basis()).min(min_exponent(l2.basis())).min(0);
    let bound = |l: &Lattice| {
        let d = leibniz_det(&l.basis().iter().map(|r| r.iter().map(|x| x.reduce()).collect()).collect());
        d.valuation().unwrap() - (l.rank() as i64 - 1) * min_exponent(l.basis()).min(0)
    };
    let k = bound(l1).max(bound(l2)).max(lo + 1);
    window_dim(l1, lo, k) as i64 - window_dim(l2, lo, k) as i64
}

pub fn rat_series(base: BaseRing, q: Rational) -> LaurentSeries {
    LaurentSeries::constant(base.constant(q))
}

pub fn one_plus_eps_pow(base: BaseRing, k: i64) -> RingElem {
    (&base.one() + &base.eps().unwrap()).pow(k).unwrap()
}

pub fn q(n: i64) -> Rational {
    int(n)
}

/// A cell with the parameters the oracles need.
pub struct Spec {
    pub cell: LTCell,
    pub pole: i64,
    pub integral_lambda: bool,
}

const LAMBDAS: [(i64, i64); 7] = [(0, 1), (1, 2), (1, 3), (2, 3), (-1, 2), (1, 1), (3, 2)];

pub fn cell(rng: &mut ChaCha8Rng) -> Spec {
    let (n, d) = LAMBDAS[rng.gen_range(0..LAMBDAS.len())];
    let jordan = rng.gen_range(1..=2);
    let ram = if rng.gen_bool(0.25) { 2 } else { 1 };
    let pole = if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..=3) };
    let mut terms = Vec::new();
    if pole > 0 {
        // with ram = 2 the leading exponent is odd so no factor is shared
        let lead = if ram == 2 && pole % 2 == 0 { pole - 1 } else { pole };
        for e in 1..lead {
            if rng.gen_bool(0.5) {
                terms.push((-e, BaseRing::Rationals.constant(rat(rng.gen_range(-3..=3), 1))));
            }
        }
        terms.push((-lead, BaseRing::Rationals.constant(rat(rng.gen_range(1..=3), rng.gen_range(1..=2)))));
    }
    let q = LaurentSeries::from_terms(BaseRing::Rationals, terms, None);
    let pole = q.low_exponent().map_or(0, |e| -e);
    let cell = LTCell::new(q, rat(n, d), jordan, ram).unwrap();
    Spec { cell, pole, integral_lambda: d == 1 }
}

pub fn connection(specs: &[Spec]) -> FormalConnection {
    FormalConnection::from_cells(specs.iter().map(|s| s.cell.clone()).collect()).unwrap()
}

pub fn cohomology_oracle(specs: &[Spec]) -> (u64, u64) {
    let h = specs.iter().filter(|s| s.pole == 0 && s.integral_lambda).count() as u64;
    (h, h)
}

pub fn irregularity_oracle(specs: &[Spec]) -> i64 {
    specs.iter().map(|s| s.cell.jordan() as i64 * s.pole).sum()
}

pub fn rank_of(specs: &[Spec]) -> i64 {
    specs.iter().map(|s| (s.cell.jordan() * s.cell.ram()) as i64).sum()
}

pub fn specs(seed: u64, count: usize) -> Vec<Spec> {
    let mut r = rng(seed);
    (0..count).map(|_| cell(&mut r)).collect()
}

