//! Rank-one connections `d + omega dt` on open subsets `U = P^1 - D`, their
//! de Rham cohomology, local epsilon lines and the product formula.

use crate::connection::{self, FormalConnection, LTCell, LatticePair};
use crate::error::{Error, Result};
use crate::graded_line::TrivializedGradedLine;
use crate::lattice::{self, Lattice};
use crate::matrix;
use crate::poly::{Poly, RatFunc};
use crate::ring::{BaseRing, Rational};
use crate::series::LaurentSeries;

pub use crate::poly::Point;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalRank1Connection {
    omega: RatFunc,
    points: Vec<Point>,
}

/// Removes every factor `t - x` for finite `x` in `points`.
fn strip_points(p: &Poly, points: &[Point]) -> Poly {
    let mut p = p.reduce();
    for x in points {
        if let Point::Finite(a) = x {
            let lin = Poly::linear(BaseRing::Rationals, a);
            while p.order_at(a).is_some_and(|k| k > 0) {
                p = p.div_rem(&lin).expect("nonzero divisor").0;
            }
        }
    }
    p
}

impl GlobalRank1Connection {
    /// `points` is the complement `D` of `U`; every pole of `omega dt` must
    /// lie in it.
    pub fn new(omega: RatFunc, points: Vec<Point>) -> Result<Self> {
        if omega.base() != BaseRing::Rationals {
            return Err(Error::AdmissibilityViolation("connection form must be defined over Q".into()));
        }
        let mut points = points;
        points.sort();
        points.dedup();
        if points.is_empty() {
            return Err(Error::AdmissibilityViolation("the removed set D must be nonempty".into()));
        }
        let rest = strip_points(omega.den(), &points);
        if rest.degree().unwrap_or(0) > 0 {
            return Err(Error::AdmissibilityViolation(format!("omega = {omega} has poles outside D")));
        }
        if !points.contains(&Point::Infinity) && !omega.is_zero() && omega.order_at(&Point::Infinity).unwrap_or(2) < 2 {
            return Err(Error::AdmissibilityViolation(format!("omega dt = ({omega}) dt has a pole at oo, which is not in D")));
        }
        Ok(GlobalRank1Connection { omega, points })
    }

    pub fn omega(&self) -> &RatFunc {
        &self.omega
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `chi(U) = 2 - |D|`.
    pub fn euler_characteristic_of_u(&self) -> i64 {
        2 - self.points.len() as i64
    }

    /// `ν = u dt` must have neither zeros nor poles on `U`.
    pub fn check_form(&self, u: &RatFunc) -> Result<()> {
        if u.is_zero() {
            return Err(Error::AdmissibilityViolation("the form must be nonzero".into()));
        }
        for (what, p) in [("zeros", u.num()), ("poles", u.den())] {
            if strip_points(p, &self.points).degree().unwrap_or(0) > 0 {
                return Err(Error::AdmissibilityViolation(format!("({u}) dt has {what} outside D")));
            }
        }
        if !self.points.contains(&Point::Infinity) && u.order_at(&Point::Infinity) != Some(2) {
            return Err(Error::AdmissibilityViolation(format!("({u}) dt has a zero or pole at oo, which is not in D")));
        }
        Ok(())
    }
}

/// Order at `x` of the form `u dt`.
pub fn form_order(u: &RatFunc, x: &Point) -> i64 {
    let o = u.order_at(x).expect("nonzero form");
    match x {
        Point::Finite(_) => o,
        Point::Infinity => o - 2,
    }
}

/// Expansion of `f dt` at `x` as `g(z) dz` in the local coordinate; `g`
/// known below `prec`.
fn local_coefficient(f: &RatFunc, x: &Point, prec: i64) -> Result<LaurentSeries> {
    match x {
        Point::Finite(_) => f.expand_at(x, prec),
        Point::Infinity => {
            let g = f.expand_at(x, prec + 2)?;
            let minus = f.base().constant(Rational::from_integer((-1).into()));
            Ok(g.shift(-2).scale(&minus))
        }
    }
}

/// Local cell at `x`: `z * (local coefficient of omega dt)` has principal
/// part `z dq/dz` and constant term `lambda`.
pub fn local_cell(conn: &GlobalRank1Connection, x: &Point) -> Result<LTCell> {
    let zf = local_coefficient(&conn.omega, x, 1)?.shift(1);
    let q_terms = zf
        .terms()
        .filter(|(e, _)| *e < 0)
        .map(|(e, c)| (e, c.scale(&Rational::new(1.into(), e.into()))))
        .collect();
    let q = LaurentSeries::from_terms(BaseRing::Rationals, q_terms, None);
    let lambda = zf.coeff(0)?.reduction();
    LTCell::new(q, lambda, 1, 1)
}

/// The formal connection at `x`, as an unnormalized cell.
pub fn localize_at(conn: &GlobalRank1Connection, x: &Point) -> Result<FormalConnection> {
    FormalConnection::from_cells(vec![local_cell(conn, x)?])
}

/// The local cell with its exponent moved into `[0, 1)`, and the integer
/// shift that was removed.
pub fn localize_normalized(conn: &GlobalRank1Connection, x: &Point) -> Result<(FormalConnection, i64)> {
    let c = local_cell(conn, x)?;
    let (lam, m) = connection::normalize_exponent(c.lambda());
    let cell = LTCell::new(c.q().clone(), lam, 1, 1)?;
    Ok((FormalConnection::from_cells(vec![cell])?, m))
}

/// Pole orders `a_x` of `L = O(A)` and `b_x` of `N = O(B)` at the points of
/// `D`, in point order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalLatticeData {
    entries: Vec<(Point, i64, i64)>,
}

impl GlobalLatticeData {
    /// `a_x = lambda_x` for integral exponents and `0` otherwise; `b_x =
    /// a_x + irr_x`.
    pub fn good(conn: &GlobalRank1Connection) -> Result<Self> {
        let mut entries = Vec::new();
        for x in &conn.points {
            let c = local_cell(conn, x)?;
            let a = if c.lambda().is_integer() { c.lambda_shift() } else { 0 };
            entries.push((x.clone(), a, a + connection::irregularity(&c)));
        }
        Ok(GlobalLatticeData { entries })
    }

    pub fn new(conn: &GlobalRank1Connection, entries: Vec<(Point, i64, i64)>) -> Result<Self> {
        let mut entries = entries;
        entries.sort();
        if entries.iter().map(|e| &e.0).ne(conn.points.iter()) {
            return Err(Error::InvalidLatticePair("lattice data must list exactly the points of D".into()));
        }
        for (x, a, b) in &entries {
            let irr = connection::irregularity(&local_cell(conn, x)?);
            if b - a != irr {
                return Err(Error::InvalidLatticePair(format!("at {x}: b - a = {} but the irregularity is {irr}", b - a)));
            }
        }
        Ok(GlobalLatticeData { entries })
    }

    pub fn entries(&self) -> &[(Point, i64, i64)] {
        &self.entries
    }

    pub fn degree_a(&self) -> i64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn degree_b(&self) -> i64 {
        self.entries.iter().map(|e| e.2).sum()
    }

    /// `(z^-a O, z^-b O)` at the `i`-th point.
    pub fn local_pair(&self, i: usize) -> LatticePair {
        let (_, a, b) = &self.entries[i];
        let o = Lattice::standard(BaseRing::Rationals, 1);
        LatticePair { l: o.shift(*a), n: o.shift(*b) }
    }
}

/// `(h^0, h^1)` of `O(m)` on `P^1`.
pub fn line_bundle_cohomology(m: i64) -> (u64, u64) {
    ((m + 1).max(0) as u64, (-m - 1).max(0) as u64)
}

/// Global sections `t^j / prod (t - x)^{m_x}` of `O(sum m_x x)`, all
/// `m_x >= 0`: returns the denominator and the number of sections.
fn section_frame(points: &[(Point, i64)]) -> (Poly, usize) {
    let q = BaseRing::Rationals;
    let mut den = Poly::one(q);
    let mut top = 0i64;
    for (x, m) in points {
        match x {
            Point::Finite(a) => {
                den = &den * &Poly::linear(q, a).pow(*m as usize);
                top += m;
            }
            Point::Infinity => top += m,
        }
    }
    (den, (top + 1).max(0) as usize)
}

/// `(h^0, h^1, h^2)` of `[O(A) -> O(B) ⊗ Ω¹(D)]` on `P^1`.
///
/// Both bundles are twisted by `K D` for `K` large: the added quotient is
/// acyclic when the local pairs are good, and then `H^1` of each bundle
/// vanishes, so the answer is the kernel and cokernel of `∇` on global
/// sections.
pub fn global_dr_cohomology(conn: &GlobalRank1Connection, data: &GlobalLatticeData) -> Result<(u64, u64, u64)> {
    let q = BaseRing::Rationals;
    let k = 2 + data.entries.iter().map(|(_, a, b)| a.abs().max(b.abs())).max().unwrap_or(0);
    let a_pts: Vec<(Point, i64)> = data.entries.iter().map(|(x, a, _)| (x.clone(), a + k)).collect();
    let b_pts: Vec<(Point, i64)> = data.entries.iter().map(|(x, _, b)| (x.clone(), b + k)).collect();
    let (den_a, n_a) = section_frame(&a_pts);
    // forms g dt: at finite x, ord g >= -(M_x + 1); at oo, ord g >= 1 - M_oo
    // if oo is in D and >= 2 otherwise.
    let mut den_b = Poly::one(q);
    let mut fin = 0i64;
    let mut at_inf = 2i64;
    for (x, m) in &b_pts {
        match x {
            Point::Finite(a) => {
                den_b = &den_b * &Poly::linear(q, a).pow((*m + 1) as usize);
                fin += m + 1;
            }
            Point::Infinity => at_inf = 1 - m,
        }
    }
    let n_b = (fin - at_inf + 1).max(0) as usize;
    // ∇(t^j / Da) * Db = Db (j t^(j-1) Da Q + t^j (P Da - Da' Q)) / (Da^2 Q)
    // with omega = P / Q.
    let (p, qd) = (conn.omega.num(), conn.omega.den());
    let e = &(&den_a * &den_a) * qd;
    let r1 = &den_b * &(&den_a * qd);
    let r2 = &den_b * &(&(p * &den_a) - &(&den_a.derivative() * qd));
    let mut rows = Vec::with_capacity(n_a);
    let mut xj = Poly::one(q);
    let mut xj1 = Poly::zero(q);
    for j in 0..n_a {
        let jj = q.constant(Rational::from_integer((j as i64).into()));
        let numer = &(&xj1 * &r1).scale(&jj) + &(&xj * &r2);
        let (quo, rem) = numer.div_rem(&e)?;
        if !rem.is_zero() || quo.degree().is_some_and(|d| d >= n_b) {
            return Err(Error::InvalidLatticePair("∇ leaves the prescribed pole bounds".into()));
        }
        rows.push((0..n_b).map(|i| quo.coeff(i)).collect());
        xj1 = xj.clone();
        xj = &xj * &Poly::x(q);
    }
    let rank = matrix::free_rank(rows)? as u64;
    Ok((n_a as u64 - rank, n_b as u64 - rank, 0))
}

/// `ε̃_x` for every point of `D`, in point order, computed on the local
/// pairs of `data`.
pub fn local_epsilon_factors_with(
    conn: &GlobalRank1Connection,
    u: &RatFunc,
    data: &GlobalLatticeData,
    work: i64,
) -> Result<Vec<(Point, TrivializedGradedLine)>> {
    conn.check_form(u)?;
    let mut out = Vec::new();
    for (i, (x, _, _)) in data.entries.iter().enumerate() {
        let local = local_coefficient(u, x, work)?;
        let pair = data.local_pair(i);
        let lam = connection::nu_inverse_lattice(&pair.n, &local, work)?;
        out.push((x.clone(), lattice::relative_det(&pair.l.change_base(local.base()), &lam, work)?));
    }
    Ok(out)
}

/// `ε̃_x` on the good lattice data.
pub fn local_epsilon_factors(
    conn: &GlobalRank1Connection,
    u: &RatFunc,
    work: i64,
) -> Result<Vec<(Point, TrivializedGradedLine)>> {
    local_epsilon_factors_with(conn, u, &GlobalLatticeData::good(conn)?, work)
}

/// `chi(U) - sum irr_x`.
pub fn euler_characteristic_oracle(conn: &GlobalRank1Connection) -> Result<i64> {
    let mut irr = 0;
    for x in &conn.points {
        irr += connection::irregularity(&local_cell(conn, x)?);
    }
    Ok(conn.euler_characteristic_of_u() - irr)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductFormulaReport {
    pub h0: u64,
    pub h1: u64,
    pub h2: u64,
    pub euler_oracle: i64,
    pub local: Vec<(Point, TrivializedGradedLine)>,
    pub local_grade_sum: i64,
    /// `grade grdet RΓ(O(A))`.
    pub grade_a: i64,
    /// `grade grdet RΓ(O(B'))`, `O(B')` the line bundle of `ν^-1(N ⊗ Ω¹(D))`.
    pub grade_b_prime: i64,
    pub locally_good: bool,
}

impl ProductFormulaReport {
    pub fn cohomology_grade(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }

    pub fn holds(&self) -> bool {
        let chi = self.cohomology_grade();
        self.locally_good
            && chi == self.local_grade_sum
            && chi == self.grade_a - self.grade_b_prime
            && chi == self.euler_oracle
    }
}

pub fn product_formula_check(conn: &GlobalRank1Connection, u: &RatFunc, work: i64) -> Result<ProductFormulaReport> {
    let data = GlobalLatticeData::good(conn)?;
    product_formula_check_with(conn, u, &data, work)
}

pub fn product_formula_check_with(
    conn: &GlobalRank1Connection,
    u: &RatFunc,
    data: &GlobalLatticeData,
    work: i64,
) -> Result<ProductFormulaReport> {
    conn.check_form(u)?;
    let (h0, h1, h2) = global_dr_cohomology(conn, data)?;
    let local = local_epsilon_factors_with(conn, u, data, work)?;
    let local_grade_sum = local.iter().map(|(_, l)| l.grade()).sum();
    let mut locally_good = true;
    for (i, (x, _, _)) in data.entries.iter().enumerate() {
        let c = localize_at(conn, x)?;
        let pair = data.local_pair(i);
        locally_good &= connection::goodness_check(&c, &pair, &pair.shift(1), work)?;
    }
    let deg_b_prime: i64 = data.entries.iter().map(|(x, _, b)| b + 1 + form_order(u, x)).sum();
    let (a0, a1) = line_bundle_cohomology(data.degree_a());
    let (b0, b1) = line_bundle_cohomology(deg_b_prime);
    Ok(ProductFormulaReport {
        h0,
        h1,
        h2,
        euler_oracle: euler_characteristic_oracle(conn)?,
        local,
        local_grade_sum,
        grade_a: a0 as i64 - a1 as i64,
        grade_b_prime: b0 as i64 - b1 as i64,
        locally_good,
    })
}
