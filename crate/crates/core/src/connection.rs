//! Connections on the formal punctured disk in Levelt-Turrittin form.
//!
//! A cell `(q, lambda, n, e)` is the connection `d + dq + (lambda + J_n) ds/s`
//! over `s` with `t = s^e`, pushed forward to `t`. Connections are written
//! `∇ = t d/dt + omega` against `dt/t`, acting on column vectors (left
//! convention).

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graded_line::{grdet_of_graded_vector_spaces, TrivializedGradedLine};
use crate::lattice::{self, Lattice};
use crate::matrix::{self, SeriesMatrix};
use crate::ring::{int, BaseRing, Rational, RingElem};
use crate::series::LaurentSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LTCell {
    q: LaurentSeries,
    lambda: Rational,
    jordan: usize,
    ram: usize,
}

impl LTCell {
    /// `q` is a polynomial in `s^-1` without constant term, over `Q`.
    pub fn new(q: LaurentSeries, lambda: Rational, jordan: usize, ram: usize) -> Result<Self> {
        if q.base() != BaseRing::Rationals || !q.is_exact() {
            return Err(Error::NormalizationRequired(format!("q must be an exact series over Q, got {q}")));
        }
        if q.terms().any(|(e, _)| e >= 0) {
            return Err(Error::NormalizationRequired(format!("q must only have negative powers, got {q}")));
        }
        if jordan == 0 {
            return Err(Error::Dimension("Jordan block size must be at least 1".into()));
        }
        if ram == 0 {
            return Err(Error::InvalidRamification("ramification index must be at least 1".into()));
        }
        if ram > 1 && !q.is_exact_zero() {
            let g = q.terms().fold(ram as i64, |g, (e, _)| g.gcd(&e));
            if g > 1 {
                return Err(Error::InvalidRamification(format!(
                    "exponents of {q} share the factor {g} with the ramification index {ram}"
                )));
            }
        }
        Ok(LTCell { q, lambda, jordan, ram })
    }

    /// `d + lambda dt/t`.
    pub fn regular(lambda: Rational) -> Self {
        LTCell { q: LaurentSeries::zero(BaseRing::Rationals), lambda, jordan: 1, ram: 1 }
    }

    pub fn q(&self) -> &LaurentSeries {
        &self.q
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn jordan(&self) -> usize {
        self.jordan
    }

    pub fn ram(&self) -> usize {
        self.ram
    }

    /// Realized rank `n * e`.
    pub fn rank(&self) -> usize {
        self.jordan * self.ram
    }

    /// Pole order of `q` in the ramified variable.
    pub fn pole_order(&self) -> i64 {
        self.q.low_exponent().map_or(0, |e| -e)
    }

    /// The integer part of `lambda`, absorbed into the lattices.
    pub fn lambda_shift(&self) -> i64 {
        let f = self.lambda.floor().to_integer();
        i64::try_from(f).expect("residue exponent fits in i64")
    }

    /// Connection matrix against `dt/t` in the basis `s^k v_l`, index
    /// `k * n + l`.
    pub fn realize(&self) -> SeriesMatrix {
        let q = BaseRing::Rationals;
        let (n, e) = (self.jordan, self.ram as i64);
        let r = self.rank();
        let inv_e = Rational::new(1.into(), e.into());
        let mut terms: Vec<Vec<Vec<(i64, RingElem)>>> = vec![vec![Vec::new(); r]; r];
        // s dq/ds = sum m a_m s^m
        let phi: Vec<(i64, Rational)> =
            self.q.terms().map(|(m, a)| (m, a.reduction() * int(m))).collect();
        for k in 0..e {
            for l in 0..n {
                let col = k as usize * n + l;
                let diag = (Rational::from_integer(k.into()) + &self.lambda) * &inv_e;
                terms[col][col].push((0, q.constant(diag)));
                if l + 1 < n {
                    terms[k as usize * n + l][col + 1].push((0, q.constant(inv_e.clone())));
                }
                for (m, c) in &phi {
                    let (a, b) = (k + m).div_mod_floor(&e);
                    let row = b as usize * n + l;
                    terms[row][col].push((a, q.constant(c * &inv_e)));
                }
            }
        }
        terms
            .into_iter()
            .map(|row| row.into_iter().map(|ts| LaurentSeries::from_terms(q, ts, None)).collect())
            .collect()
    }

    /// Pushforward of `s^-m O_s^n` in the basis `s^k v_l`: diagonal with
    /// entry `t^a` on index `b * n + l`, where `b - m = e a + b'` ranges
    /// over one residue system.
    pub fn pushforward_lattice(&self, m: i64) -> Lattice {
        let (n, e) = (self.jordan, self.ram as i64);
        let mut diag = vec![LaurentSeries::zero(BaseRing::Rationals); self.rank()];
        for c in -m..(e - m) {
            let (a, b) = c.div_mod_floor(&e);
            for l in 0..n {
                diag[b as usize * n + l] = LaurentSeries::t_pow(BaseRing::Rationals, a);
            }
        }
        Lattice::from_basis(matrix::diagonal(diag)).expect("monomial diagonal basis")
    }
}

pub fn irregularity(c: &LTCell) -> i64 {
    c.jordan as i64 * c.pole_order()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalConnection {
    cells: Vec<LTCell>,
    omega: SeriesMatrix,
}

impl FormalConnection {
    pub fn from_cells(cells: Vec<LTCell>) -> Result<Self> {
        let mut it = cells.iter();
        let first = it.next().ok_or_else(|| Error::Dimension("a connection needs at least one cell".into()))?;
        let omega = it.fold(first.realize(), |acc, c| matrix::block_sum(&acc, &c.realize()));
        Ok(FormalConnection { cells, omega })
    }

    pub fn trivial(rank: usize) -> Self {
        Self::from_cells(vec![LTCell::regular(int(0)); rank.max(1)]).expect("nonempty")
    }

    pub fn cells(&self) -> &[LTCell] {
        &self.cells
    }

    pub fn omega(&self) -> &SeriesMatrix {
        &self.omega
    }

    pub fn rank(&self) -> usize {
        self.omega.len()
    }

    pub fn irregularity(&self) -> i64 {
        self.cells.iter().map(irregularity).sum()
    }

    /// Cells in order; no reordering or braiding.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        FormalConnection { cells, omega: matrix::block_sum(&self.omega, &other.omega) }
    }
}

/// Realization over `t` of a ramified cell.
pub fn kummer_pushforward(c: &LTCell) -> Result<FormalConnection> {
    if c.ram < 2 {
        return Err(Error::InvalidRamification(format!("pushforward needs e >= 2, got {}", c.ram)));
    }
    FormalConnection::from_cells(vec![c.clone()])
}

/// `∇ m = t dm/dt + omega m`, as the coefficient vector of `dt/t`.
pub fn apply_nabla(conn: &FormalConnection, m: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
    if m.len() != conn.rank() {
        return Err(Error::Dimension(format!("vector of length {} for rank {}", m.len(), conn.rank())));
    }
    let base = m[0].base();
    let omega = matrix::change_base(&conn.omega, base);
    let om = matrix::mul_vec(&omega, m);
    Ok(m.iter().zip(om).map(|(x, y)| &x.euler_derivative() + &y).collect())
}

/// `(∇ B) = θ(B) + omega B`, columnwise.
fn nabla_matrix(conn: &FormalConnection, b: &SeriesMatrix) -> SeriesMatrix {
    let base = b[0][0].base();
    let omega = matrix::change_base(&conn.omega, base);
    let ob = matrix::mul(&omega, b);
    b.iter()
        .zip(ob)
        .map(|(row, orow)| row.iter().zip(orow).map(|(x, y)| &x.euler_derivative() + &y).collect())
        .collect()
}

#[derive(Clone, Debug)]
pub struct LatticePair {
    pub l: Lattice,
    pub n: Lattice,
}

impl LatticePair {
    /// Checks `L ⊆ N` and `∇ L ⊆ N dt/t`.
    pub fn new(conn: &FormalConnection, l: Lattice, n: Lattice, work: i64) -> Result<Self> {
        if l.rank() != conn.rank() || n.rank() != conn.rank() {
            return Err(Error::Dimension("lattice rank differs from the connection rank".into()));
        }
        if !lattice::lattice_contains(&n, &l, work)? {
            return Err(Error::InvalidLatticePair("L is not contained in N".into()));
        }
        let pair = LatticePair { l, n };
        let (_, c) = pair.frames(conn, work)?;
        if c.iter().flatten().any(|x| x.terms().any(|(e, _)| e < 0)) {
            return Err(Error::InvalidLatticePair("∇L is not contained in N dt/t".into()));
        }
        Ok(pair)
    }

    pub fn base(&self) -> BaseRing {
        self.l.base()
    }

    pub fn change_base(&self, base: BaseRing) -> Self {
        LatticePair { l: self.l.change_base(base), n: self.n.change_base(base) }
    }

    /// `t^-k` times both lattices.
    pub fn shift(&self, k: i64) -> Self {
        LatticePair { l: self.l.shift(k), n: self.n.shift(k) }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Ok(LatticePair { l: self.l.direct_sum(&other.l)?, n: self.n.direct_sum(&other.n)? })
    }

    /// `(B_N^-1 B_L, B_N^-1 ∇B_L)`.
    fn frames(&self, conn: &FormalConnection, work: i64) -> Result<(SeriesMatrix, SeriesMatrix)> {
        let ninv = matrix::inverse(&self.n.frame(work)?, work)?;
        let bl = self.l.frame(work)?;
        let p = matrix::mul(&ninv, &bl);
        let c = matrix::mul(&ninv, &nabla_matrix(conn, &bl));
        Ok((p, c))
    }
}

/// Canonical good pair: per cell `(π_* s^-m O, π_* s^-(m+p) O)` with `m`
/// the integer part of the residue exponent and `p` the pole order of `q`.
pub fn good_pair(conn: &FormalConnection) -> LatticePair {
    let mut it = conn.cells.iter().map(|c| {
        let m = c.lambda_shift();
        LatticePair { l: c.pushforward_lattice(m), n: c.pushforward_lattice(m + c.pole_order()) }
    });
    let first = it.next().expect("connections have a cell");
    it.fold(first, |acc, p| acc.direct_sum(&p).expect("same base"))
}

/// Row of window coordinates of `t^j * v` modulo `t^k`, where `v` is a
/// column of integral series; index `e * r + row`.
fn window_row(col: &[LaurentSeries], j: usize, k: usize, base: BaseRing) -> Result<Vec<RingElem>> {
    let r = col.len();
    let mut out = vec![base.zero(); r * k];
    for (row, x) in col.iter().enumerate() {
        if x.terms().any(|(e, _)| e < 0) {
            return Err(Error::InvalidLatticePair(format!("non-integral coordinate {x}")));
        }
        for e in j..k {
            out[e * r + row] = x.coeff((e - j) as i64)?;
        }
    }
    Ok(out)
}

fn column(m: &SeriesMatrix, c: usize) -> Vec<LaurentSeries> {
    m.iter().map(|row| row[c].clone()).collect()
}

/// Rows of `∇(B_L t^j e_i)` in `N`-frame window coordinates, `j < k`.
fn nabla_rows(p: &SeriesMatrix, c: &SeriesMatrix, k: usize, base: BaseRing) -> Result<Vec<Vec<RingElem>>> {
    let r = p.len();
    let mut rows = Vec::with_capacity(r * k);
    for j in 0..k {
        let jj = LaurentSeries::constant(base.constant(int(j as i64)));
        for i in 0..r {
            let v: Vec<LaurentSeries> = (0..r).map(|row| &(&jj * &p[row][i]) + &c[row][i]).collect();
            rows.push(window_row(&v, j, k, base)?);
        }
    }
    Ok(rows)
}

/// `(dim L/L', dim N/N', rank)` for the quotient complex
/// `[L/L' -> (N/N') dt/t]` of `inner ⊆ outer`, `rank` that of the map.
fn quotient_complex(
    conn: &FormalConnection,
    outer: &LatticePair,
    inner: &LatticePair,
    work: i64,
) -> Result<(i64, i64, i64)> {
    let base = outer.base();
    let dl = lattice::quotient_rank(&outer.l, &inner.l, work)?;
    let dn = lattice::quotient_rank(&outer.n, &inner.n, work)?;
    let k = lattice::common_sublattice_depth(&outer.l, &inner.l, work)?
        .max(lattice::common_sublattice_depth(&outer.n, &inner.n, work)?)
        .max(1) as usize;
    let (p, c) = outer.frames(conn, work.max(k as i64 + 2))?;
    let mut rows = nabla_rows(&p, &c, k, base)?;
    let sub = outer.n.transition(&inner.n, work.max(k as i64 + 2))?;
    let mut sub_rows = Vec::new();
    for j in 0..k {
        for i in 0..sub.len() {
            sub_rows.push(window_row(&column(&sub, i), j, k, base)?);
        }
    }
    let s = matrix::free_rank(sub_rows.clone())? as i64;
    rows.extend(sub_rows);
    let image = matrix::free_rank(rows)? as i64 - s;
    Ok((dl, dn, image))
}

pub const MAX_TRUNCATION: i64 = 256;

/// `(h^0, h^1)` of `[L -> N dt/t]`, computed on the quotient by `t^K`
/// times the canonical good pair, with `K` raised until the dimensions
/// are stable twice in a row.
pub fn disk_dr_cohomology(conn: &FormalConnection, pair: &LatticePair, work: i64) -> Result<(u64, u64)> {
    let g = good_pair(conn).change_base(pair.base());
    let k0 = lattice::common_sublattice_depth(&g.l, &pair.l, work)?
        .max(lattice::common_sublattice_depth(&g.n, &pair.n, work)?);
    let mut prev = None;
    let mut stable = 0;
    for k in k0..=k0 + MAX_TRUNCATION {
        let (dl, dn, image) = quotient_complex(conn, pair, &g.shift(-k), work)?;
        let cur = ((dl - image) as u64, (dn - image) as u64);
        stable = if Some(cur) == prev { stable + 1 } else { 0 };
        if stable >= 2 {
            return Ok(cur);
        }
        prev = Some(cur);
    }
    Err(Error::NonConvergent(MAX_TRUNCATION as usize))
}

/// `grdet` of the disk de Rham complex of a pair.
pub fn disk_dr_grdet(conn: &FormalConnection, pair: &LatticePair, work: i64) -> Result<TrivializedGradedLine> {
    let (h0, h1) = disk_dr_cohomology(conn, pair, work)?;
    grdet_of_graded_vector_spaces(pair.base(), &[(0, h0), (1, h1)], None)
}

/// `(dim ker, dim coker)` of `[L'/L -> (N'/N) dt/t]` for `pair ⊆ enlarged`.
pub fn quotient_cohomology(
    conn: &FormalConnection,
    pair: &LatticePair,
    enlarged: &LatticePair,
    work: i64,
) -> Result<(u64, u64)> {
    if !lattice::lattice_contains(&enlarged.l, &pair.l, work)? || !lattice::lattice_contains(&enlarged.n, &pair.n, work)? {
        return Err(Error::InvalidLatticePair("pair is not contained in the enlarged pair".into()));
    }
    let (dl, dn, image) = quotient_complex(conn, enlarged, pair, work)?;
    Ok(((dl - image) as u64, (dn - image) as u64))
}

/// Whether `[L'/L -> (N'/N) dt/t]` is acyclic for `pair ⊆ enlarged`.
pub fn goodness_check(conn: &FormalConnection, pair: &LatticePair, enlarged: &LatticePair, work: i64) -> Result<bool> {
    Ok(quotient_cohomology(conn, pair, enlarged, work)? == (0, 0))
}

/// `{m : u m dt ∈ N dt/t} = u^-1 t^-1 N`.
pub fn nu_inverse_lattice(n: &Lattice, u: &LaurentSeries, work: i64) -> Result<Lattice> {
    let n = n.change_base(u.base());
    u.invert(work).map_err(|_| Error::NotAUnit(u.to_string()))?;
    n.shift(1).divide(u)
}

/// `grdet(L : ν^-1(N ⊗ Ω¹))` for the canonical good pair, `ν = u dt`.
pub fn epsilon_tilde(conn: &FormalConnection, u: &LaurentSeries, work: i64) -> Result<TrivializedGradedLine> {
    epsilon_tilde_good(conn, u, &good_pair(conn), work)
}

/// The good-pair formula for a given pair (assumed good).
pub fn epsilon_tilde_good(
    _conn: &FormalConnection,
    u: &LaurentSeries,
    pair: &LatticePair,
    work: i64,
) -> Result<TrivializedGradedLine> {
    let base = u.base();
    let l = pair.l.change_base(base);
    let lam = nu_inverse_lattice(&pair.n, u, work)?;
    lattice::relative_det(&l, &lam, work)
}

/// Three-factor formula for any valid pair:
/// `grdet(L : ν^-1 N) ⊗ grdet(DR(L, N))^-1 ⊗ grdet(H_dR)`, with the last
/// factor computed on the canonical good pair.
pub fn epsilon_tilde_general(
    conn: &FormalConnection,
    u: &LaurentSeries,
    pair: &LatticePair,
    work: i64,
) -> Result<TrivializedGradedLine> {
    let base = u.base();
    let main = epsilon_tilde_good(conn, u, pair, work)?;
    let dr = disk_dr_grdet(conn, &pair.change_base(BaseRing::Rationals), work)?.change_base(base);
    let global = disk_dr_grdet(conn, &good_pair(conn), work)?.change_base(base);
    main.tensor(&dr.inverse())?.tensor(&global)
}

/// `ε̃ ⊗ grdet` of the punctual part, given as `(degree, dimension)` pairs.
pub fn epsilon_full(
    conn: &FormalConnection,
    u: &LaurentSeries,
    punctual: &[(i64, u64)],
    work: i64,
) -> Result<TrivializedGradedLine> {
    let e = epsilon_tilde(conn, u, work)?;
    e.tensor(&grdet_of_graded_vector_spaces(u.base(), punctual, None)?)
}

/// `ε̃(a ⊕ b) = ε̃(a) ⊗ ε̃(b)`.
pub fn ses_multiplicativity_check(
    a: &FormalConnection,
    b: &FormalConnection,
    u: &LaurentSeries,
    work: i64,
) -> Result<bool> {
    let whole = epsilon_tilde(&a.direct_sum(b), u, work)?;
    Ok(whole == epsilon_tilde(a, u, work)?.tensor(&epsilon_tilde(b, u, work)?)?)
}

/// Both bracketings of a three-term sum agree with the product of the
/// three factors.
pub fn ses_triple_check(
    a: &FormalConnection,
    b: &FormalConnection,
    c: &FormalConnection,
    u: &LaurentSeries,
    work: i64,
) -> Result<bool> {
    let left = epsilon_tilde(&a.direct_sum(b).direct_sum(c), u, work)?;
    let right = epsilon_tilde(&a.direct_sum(&b.direct_sum(c)), u, work)?;
    let base = u.base();
    let parts = [a, b, c].iter().map(|x| epsilon_tilde(x, u, work)).collect::<Result<Vec<_>>>()?;
    let prod = TrivializedGradedLine::tensor_all(base, &parts)?;
    Ok(left == prod && right == prod)
}

/// `true` if `x` lies in `[0, 1)`.
pub fn is_normalized_exponent(x: &Rational) -> bool {
    !x.is_negative() && x < &Rational::from_integer(1.into())
}

/// Residue exponent and lattice shift `m` with `lambda - m` in `[0, 1)`.
pub fn normalize_exponent(x: &Rational) -> (Rational, i64) {
    let m = x.floor();
    let shift = i64::try_from(m.to_integer()).expect("residue exponent fits in i64");
    let r = x - m;
    debug_assert!(!r.is_negative() && !(r >= Rational::from_integer(1.into())) || r.is_zero());
    (r, shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_series;
    use crate::ring::rat;

    const W: i64 = 16;

    fn q(s: &str) -> LaurentSeries {
        parse_series(s, BaseRing::Rationals).unwrap()
    }

    fn cell(qs: &str, lam: Rational, n: usize, e: usize) -> LTCell {
        LTCell::new(q(qs), lam, n, e).unwrap()
    }

    fn conn(c: LTCell) -> FormalConnection {
        FormalConnection::from_cells(vec![c]).unwrap()
    }

    #[test]
    fn irregularity_examples() {
        assert_eq!(irregularity(&cell("0", rat(1, 2), 1, 1)), 0);
        assert_eq!(irregularity(&cell("t^-1", int(0), 1, 1)), 1);
        let c = cell("2*t^-3", int(0), 2, 1);
        assert_eq!(irregularity(&c), 6);
        let p = good_pair(&conn(c));
        assert_eq!(lattice::quotient_rank(&p.n, &p.l, W).unwrap(), 6);
    }

    #[test]
    fn nabla_examples() {
        let triv = FormalConnection::trivial(1);
        assert_eq!(apply_nabla(&triv, &[q("t^3")]).unwrap(), vec![q("3*t^3")]);
        let half = conn(LTCell::regular(rat(1, 2)));
        assert_eq!(apply_nabla(&half, &[q("t^2")]).unwrap(), vec![q("5/2*t^2")]);
        let irr = conn(cell("t^-1", int(0), 1, 1));
        assert_eq!(apply_nabla(&irr, &[q("1")]).unwrap(), vec![q("-t^-1")]);
    }

    #[test]
    fn ramified_realization() {
        assert!(matches!(kummer_pushforward(&cell("t^-1", int(0), 1, 1)), Err(Error::InvalidRamification(_))));
        let c = kummer_pushforward(&cell("0", rat(1, 2), 1, 2)).unwrap();
        assert_eq!(c.omega()[0][0], q("1/4"));
        assert_eq!(c.omega()[1][1], q("3/4"));
        let c = kummer_pushforward(&cell("t^-1", int(0), 1, 2)).unwrap();
        let p = good_pair(&c);
        assert_eq!(lattice::quotient_rank(&p.n, &p.l, W).unwrap(), 1);
        assert_eq!(disk_dr_cohomology(&c, &p, W).unwrap(), (0, 0));
        assert!(goodness_check(&c, &p, &p.shift(1), W).unwrap());
    }

    #[test]
    fn good_pair_examples() {
        let p = good_pair(&FormalConnection::trivial(1));
        assert!(p.l.same_module(&Lattice::standard(BaseRing::Rationals, 1), W).unwrap());
        assert!(p.n.same_module(&p.l, W).unwrap());
        let c = conn(cell("t^-1", int(0), 1, 1));
        let p = good_pair(&c);
        assert!(p.n.same_module(&p.l.shift(1), W).unwrap());
        let j = conn(cell("0", int(0), 2, 1));
        let p = good_pair(&j);
        assert!(p.n.same_module(&p.l, W).unwrap());
        assert_eq!(disk_dr_cohomology(&j, &p, W).unwrap(), (1, 1));
    }

    #[test]
    fn goodness_examples() {
        let triv = FormalConnection::trivial(1);
        let p = good_pair(&triv);
        assert!(goodness_check(&triv, &p, &p.shift(1), W).unwrap());
        let half = conn(LTCell::regular(rat(1, 2)));
        let ph = good_pair(&half);
        assert!(goodness_check(&half, &ph, &ph.shift(2), W).unwrap());
        let unbalanced = LatticePair::new(&triv, p.l.clone(), p.n.shift(1), W).unwrap();
        assert!(!goodness_check(&triv, &p, &unbalanced, W).unwrap());
    }

    #[test]
    fn cohomology_examples() {
        let triv = FormalConnection::trivial(1);
        assert_eq!(disk_dr_cohomology(&triv, &good_pair(&triv), W).unwrap(), (1, 1));
        let half = conn(LTCell::regular(rat(1, 2)));
        assert_eq!(disk_dr_cohomology(&half, &good_pair(&half), W).unwrap(), (0, 0));
        let irr = conn(cell("t^-1", int(0), 1, 1));
        assert_eq!(disk_dr_cohomology(&irr, &good_pair(&irr), W).unwrap(), (0, 0));
    }

    #[test]
    fn nu_inverse_examples() {
        let o = Lattice::standard(BaseRing::Rationals, 1);
        let dt = q("1");
        assert!(nu_inverse_lattice(&o, &dt, W).unwrap().same_module(&o.shift(1), W).unwrap());
        assert!(nu_inverse_lattice(&o, &q("t^-1"), W).unwrap().same_module(&o, W).unwrap());
        assert!(nu_inverse_lattice(&o.shift(1), &dt, W).unwrap().same_module(&o.shift(2), W).unwrap());
    }

    #[test]
    fn epsilon_examples() {
        let triv = FormalConnection::trivial(1);
        assert_eq!(epsilon_tilde(&triv, &q("1"), W).unwrap().grade(), -1);
        assert_eq!(epsilon_tilde(&triv, &q("t^-1"), W).unwrap(), TrivializedGradedLine::trivial(BaseRing::Rationals));
        let irr = conn(cell("t^-1", int(0), 1, 1));
        assert_eq!(epsilon_tilde(&irr, &q("1"), W).unwrap().grade(), -2);
        let e = epsilon_tilde(&triv, &q("1"), W).unwrap().grade();
        assert_eq!(epsilon_full(&triv, &q("1"), &[], W).unwrap().grade(), e);
        assert_eq!(epsilon_full(&triv, &q("1"), &[(0, 1)], W).unwrap().grade(), e + 1);
        assert_eq!(epsilon_full(&triv, &q("1"), &[(1, 2)], W).unwrap().grade(), e - 2);
    }

    #[test]
    fn general_formula_on_non_good_pair() {
        let triv = FormalConnection::trivial(1);
        let p = good_pair(&triv);
        let wide = LatticePair::new(&triv, p.l.clone(), p.n.shift(1), W).unwrap();
        assert_eq!(disk_dr_cohomology(&triv, &wide, W).unwrap(), (1, 2));
        let fast = epsilon_tilde(&triv, &q("1"), W).unwrap();
        assert_eq!(epsilon_tilde_general(&triv, &q("1"), &wide, W).unwrap(), fast);
        assert_eq!(epsilon_tilde_general(&triv, &q("1"), &p, W).unwrap(), fast);
    }

    #[test]
    fn direct_sum_examples() {
        let triv = FormalConnection::trivial(1);
        let dt = q("1");
        assert_eq!(epsilon_tilde(&triv.direct_sum(&triv), &dt, W).unwrap().grade(), -2);
        let half = conn(LTCell::regular(rat(1, 2)));
        let irr = conn(cell("t^-1", int(0), 1, 1));
        assert!(ses_multiplicativity_check(&half, &irr, &dt, W).unwrap());
        assert!(ses_triple_check(&half, &irr, &triv, &dt, W).unwrap());
    }

    #[test]
    fn residue_shift_absorbed() {
        let one = conn(LTCell::regular(int(1)));
        let p = good_pair(&one);
        assert!(p.l.same_module(&Lattice::standard(BaseRing::Rationals, 1).shift(1), W).unwrap());
        assert_eq!(disk_dr_cohomology(&one, &p, W).unwrap(), (1, 1));
        assert_eq!(normalize_exponent(&rat(-3, 2)), (rat(1, 2), -2));
    }
}
