//! Random rank-one connections on `P^1` with their irregularities known by
//! construction.

use epsfac_core::poly::{Poly, RatFunc};
use epsfac_core::ring::rat;
use epsfac_core::{BaseRing, GlobalRank1Connection, Point, Rational};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const Q: BaseRing = BaseRing::Rationals;
const RESIDUES: [(i64, i64); 4] = [(0, 1), (1, 2), (1, 3), (-1, 2)];

/// A random rank-one connection on `P^1` with its removed set, irregularities
/// and a form `u dt` without zeros or poles off `D`.
pub struct Case {
    pub conn: GlobalRank1Connection,
    pub u: RatFunc,
    pub irr: Vec<(Point, i64)>,
    /// `ord_x(u dt)` for each point of `D`.
    pub form_orders: Vec<(Point, i64)>,
}

pub fn c(q: Rational) -> RatFunc {
    RatFunc::constant(Q.constant(q))
}

fn lin_pow(x: &Rational, k: i64) -> RatFunc {
    RatFunc::from_poly(Poly::linear(Q, x)).pow(k).unwrap()
}

fn t_pow(k: usize) -> RatFunc {
    RatFunc::from_poly(Poly::x(Q).pow(k))
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    let n = *[-2i64, -1, 1, 2, 3].choose(rng).unwrap();
    rat(n, rng.gen_range(1..=2))
}

pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let mut xs: Vec<i64> = vec![-2, -1, 0, 1, 2, 3];
    xs.shuffle(rng);
    let s = rng.gen_range(0..=3usize);
    let xs: Vec<Rational> = xs[..s].iter().map(|&x| rat(x, 1)).collect();
    let with_inf = s == 0 || rng.gen_bool(0.75);
    let mut omega = c(Rational::zero());
    let mut irr = Vec::new();
    let mut residue_sum = Rational::zero();
    for (i, x) in xs.iter().enumerate() {
        let (n, d) = RESIDUES[rng.gen_range(0..RESIDUES.len())];
        let mut res = rat(n, d);
        if !with_inf && i + 1 == xs.len() {
            res = -residue_sum.clone();
        }
        residue_sum += &res;
        omega = omega.add(&c(res).mul(&lin_pow(x, -1)));
        let p = rng.gen_range(0..=3i64);
        for k in 2..=p + 1 {
            let coeff = if k == p + 1 { nonzero(rng) } else { rat(rng.gen_range(-2..=2), 1) };
            omega = omega.add(&c(coeff).mul(&lin_pow(x, -k)));
        }
        irr.push((Point::finite(x.clone()), p));
    }
    let mut form_orders: Vec<(Point, i64)> = Vec::new();
    let mut u = c(nonzero(rng));
    if with_inf {
        let p = rng.gen_range(0..=3usize);
        for j in 0..p {
            let coeff = if j + 1 == p { nonzero(rng) } else { rat(rng.gen_range(-2..=2), 1) };
            omega = omega.add(&c(coeff).mul(&t_pow(j)));
        }
        irr.push((Point::Infinity, p as i64));
        let mut deg = 0;
        for x in &xs {
            let k = rng.gen_range(-2..=2i64);
            u = u.mul(&lin_pow(x, k));
            form_orders.push((Point::finite(x.clone()), k));
            deg += k;
        }
        form_orders.push((Point::Infinity, -deg - 2));
    } else {
        for (i, x) in xs.iter().enumerate() {
            let k = if i == 0 { -2 } else { 0 };
            u = u.mul(&lin_pow(x, k));
            form_orders.push((Point::finite(x.clone()), k));
        }
    }
    let mut points: Vec<Point> = xs.iter().cloned().map(Point::finite).collect();
    if with_inf {
        points.push(Point::Infinity);
    }
    let conn = GlobalRank1Connection::new(omega, points).unwrap();
    Case { conn, u, irr, form_orders }
}

pub fn lookup(v: &[(Point, i64)], x: &Point) -> i64 {
    v.iter().find(|(p, _)| p == x).map(|(_, k)| *k).unwrap()
}


/// `2 - |D| - sum irr`: Euler characteristic of `U` minus the irregularity.
pub fn euler_oracle(case: &Case) -> i64 {
    2 - case.conn.points().len() as i64 - case.irr.iter().map(|(_, p)| p).sum::<i64>()
}
