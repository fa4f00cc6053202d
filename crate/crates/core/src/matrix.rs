//! Matrices of Laurent series, and rank computations for finite free
//! modules over the coefficient ring.

use crate::error::{Error, Result};
use crate::ring::{BaseRing, RingElem};
use crate::series::LaurentSeries;

pub type SeriesMatrix = Vec<Vec<LaurentSeries>>;

pub fn identity(base: BaseRing, n: usize) -> SeriesMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { LaurentSeries::one(base) } else { LaurentSeries::zero(base) })
                .collect()
        })
        .collect()
}

pub fn diagonal(entries: Vec<LaurentSeries>) -> SeriesMatrix {
    let n = entries.len();
    let base = entries.first().map_or(BaseRing::Rationals, LaurentSeries::base);
    let mut m = identity(base, n);
    for (i, e) in entries.into_iter().enumerate() {
        m[i][i] = e;
    }
    m
}

pub fn is_diagonal(m: &SeriesMatrix) -> bool {
    m.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, x)| i == j || x.is_exact_zero()))
}

pub fn mul(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    let base = a[0][0].base();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = LaurentSeries::zero(base);
                    for l in 0..k {
                        if a[i][l].is_exact_zero() || b[l][j].is_exact_zero() {
                            continue;
                        }
                        acc = &acc + &(&a[i][l] * &b[l][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mul_vec(a: &SeriesMatrix, v: &[LaurentSeries]) -> Vec<LaurentSeries> {
    let col: SeriesMatrix = v.iter().map(|x| vec![x.clone()]).collect();
    mul(a, &col).into_iter().map(|mut r| r.remove(0)).collect()
}

pub fn scale(a: &SeriesMatrix, f: &LaurentSeries) -> SeriesMatrix {
    a.iter().map(|r| r.iter().map(|x| x * f).collect()).collect()
}

pub fn change_base(a: &SeriesMatrix, base: BaseRing) -> SeriesMatrix {
    a.iter().map(|r| r.iter().map(|x| x.change_base(base)).collect()).collect()
}

/// Block-diagonal sum.
pub fn block_sum(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    let base = a.first().or(b.first()).map_or(BaseRing::Rationals, |r| r[0].base());
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![LaurentSeries::zero(base); n + m]; n + m];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[i][j].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            out[n + i][n + j] = b[i][j].clone();
        }
    }
    out
}

/// Row with the pivot of least reduced valuation in column `col`.
fn pick_pivot(m: &SeriesMatrix, col: usize, from: usize) -> Option<(usize, i64)> {
    (from..m.len())
        .filter_map(|r| m[r][col].valuation().ok().map(|v| (r, v)))
        .min_by_key(|&(r, v)| (v, r))
}

/// Largest size for which exact matrices use cofactor expansion.
const COFACTOR_LIMIT: usize = 6;

fn cofactor_eligible(m: &SeriesMatrix) -> bool {
    m.len() <= COFACTOR_LIMIT && m.iter().flatten().all(LaurentSeries::is_exact)
}

/// Laplace expansion along the first row over the columns in `cols`.
fn laplace(m: &SeriesMatrix, row: usize, cols: &mut Vec<usize>) -> LaurentSeries {
    let base = m[0][0].base();
    if cols.is_empty() {
        return LaurentSeries::one(base);
    }
    let mut acc = LaurentSeries::zero(base);
    for k in 0..cols.len() {
        let c = cols[k];
        if m[row][c].is_exact_zero() {
            continue;
        }
        cols.remove(k);
        let minor = laplace(m, row + 1, cols);
        cols.insert(k, c);
        let term = &m[row][c] * &minor;
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn minor_det(m: &SeriesMatrix, skip_row: usize, skip_col: usize) -> LaurentSeries {
    let sub: SeriesMatrix = m
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != skip_col).map(|(_, x)| x.clone()).collect())
        .collect();
    if sub.is_empty() {
        return LaurentSeries::one(m[0][0].base());
    }
    laplace(&sub, 0, &mut (0..sub.len()).collect())
}

/// Adjugate of an exact matrix of small size, computed exactly.
pub fn exact_adjugate(m: &SeriesMatrix) -> Option<SeriesMatrix> {
    if !cofactor_eligible(m) {
        return None;
    }
    let n = m.len();
    Some(
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = minor_det(m, j, i);
                        if (i + j) % 2 == 0 { c } else { -c }
                    })
                    .collect()
            })
            .collect(),
    )
}

/// `d_k`: least valuation of the nonzero `k x k` minors of an exact
/// matrix over `Q((t))`, for `k = 1..=n`.
pub fn determinantal_valuations(m: &SeriesMatrix) -> Result<Vec<i64>> {
    let n = m.len();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut best: Option<i64> = None;
        for rows in subsets(n, k) {
            for cols in subsets(n, k) {
                let sub: SeriesMatrix = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect();
                let d = laplace(&sub, 0, &mut (0..k).collect());
                if let Ok(v) = d.valuation() {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
        }
        out.push(best.ok_or_else(|| Error::NotAUnit("matrix is singular".into()))?);
    }
    Ok(out)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Determinant over `A((t))`. Exact matrices of small size are expanded
/// exactly; otherwise inverses of pivots are expanded to `work` terms.
pub fn det(m: &SeriesMatrix, work: i64) -> Result<LaurentSeries> {
    let n = m.len();
    let base = m[0][0].base();
    if is_diagonal(m) {
        return Ok(m.iter().enumerate().fold(LaurentSeries::one(base), |acc, (i, r)| &acc * &r[i]));
    }
    if cofactor_eligible(m) {
        return Ok(laplace(m, 0, &mut (0..n).collect()));
    }
    let mut a = m.clone();
    let mut d = LaurentSeries::one(base);
    for col in 0..n {
        let (p, _) = pick_pivot(&a, col, col).ok_or_else(|| {
            Error::NotAUnit("matrix is singular modulo nilpotents at the available precision".into())
        })?;
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        d = &d * &a[col][col];
        let inv = a[col][col].invert(work)?;
        for r in col + 1..n {
            if a[r][col].is_known_zero() && a[r][col].is_exact() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    Ok(d)
}

/// Inverse over `A((t))` by Gauss-Jordan elimination.
pub fn inverse(m: &SeriesMatrix, work: i64) -> Result<SeriesMatrix> {
    let n = m.len();
    let base = m[0][0].base();
    if is_diagonal(m) {
        let entries = (0..n).map(|i| m[i][i].invert(work)).collect::<Result<Vec<_>>>()?;
        return Ok(diagonal(entries));
    }
    if let Some(adj) = exact_adjugate(m) {
        let dinv = det(m, work)?.invert(work)?;
        return Ok(scale(&adj, &dinv));
    }
    let mut a = m.clone();
    let mut inv = identity(base, n);
    for col in 0..n {
        let (p, _) = pick_pivot(&a, col, col).ok_or_else(|| {
            Error::NotAUnit("matrix is singular modulo nilpotents at the available precision".into())
        })?;
        a.swap(p, col);
        inv.swap(p, col);
        let pinv = a[col][col].invert(work)?;
        for c in 0..n {
            a[col][c] = &a[col][c] * &pinv;
            inv[col][c] = &inv[col][c] * &pinv;
        }
        for r in 0..n {
            if r == col || (a[r][col].is_known_zero() && a[r][col].is_exact()) {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let t = &f * &a[col][c];
                a[r][c] = &a[r][c] - &t;
                let t = &f * &inv[col][c];
                inv[r][c] = &inv[r][c] - &t;
            }
        }
    }
    Ok(inv)
}

/// Rank of the span of `rows` inside a finite free module over a local
/// coefficient ring, by elimination with unit pivots. Fails with
/// `NonFreeQuotient` if the span is not a free direct summand.
pub fn free_rank(rows: Vec<Vec<RingElem>>) -> Result<usize> {
    let mut rows: Vec<Vec<RingElem>> = rows.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let Some(width) = rows.first().map(Vec::len) else {
        return Ok(0);
    };
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col].is_unit()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inverse()?;
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] * &inv;
            // skipped columns may still hold nilpotent entries
            for c in 0..width {
                let t = &f * &rows[rank][c];
                rows[r][c] = &rows[r][c] - &t;
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r.iter().any(|x| !x.is_zero())) {
        return Err(Error::NonFreeQuotient("span has non-unit leftover entries".into()));
    }
    Ok(rank)
}
