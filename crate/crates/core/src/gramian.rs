//! Pre-Gramian matrices `P(x) = (g(x + k alpha - l / beta))_{k,l}` of
//! compactly supported windows, dual windows built from finite blocks of
//! `P(x)`, and the bidiagonal blocks of the symmetric order-2 spline with
//! their Neville-type factorization.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::windows::{build_eb_spline, EBSplineWindow};

/// Entries whose argument lies within this distance of the support ends
/// are treated as structural zeros.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Default number of samples of the interval `I`, endpoints included.
pub const DEFAULT_GRID_POINTS: usize = 257;

/// Largest denominator tried when recognising `alpha beta` as a fraction.
pub const MAX_DENOMINATOR: u64 = 256;

/// Time-frequency lattice `alpha Z x beta Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LatticeParams {
    pub alpha: f64,
    pub beta: f64,
    /// `(p, q)` coprime with `alpha beta = p / q`.
    pub rational_form: Option<(u64, u64)>,
}

impl LatticeParams {
    /// Validates the parameters and recognises `alpha beta` as a fraction
    /// with denominator at most [`MAX_DENOMINATOR`] when possible.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidLattice(format!(
                "alpha = {alpha} and beta = {beta} must be positive"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            rational_form: rational_approximation(alpha * beta, MAX_DENOMINATOR, 1e-12),
        })
    }

    pub fn with_rational_form(alpha: f64, beta: f64, p: u64, q: u64) -> Result<Self> {
        let mut lat = Self::new(alpha, beta)?;
        let g = gcd(p, q);
        if q == 0 || g != 1 {
            return Err(Error::InvalidLattice(format!(
                "{p}/{q} is not in lowest terms"
            )));
        }
        if (alpha * beta - p as f64 / q as f64).abs() > 1e-12 {
            return Err(Error::InvalidLattice(format!(
                "alpha beta = {} differs from {p}/{q}",
                alpha * beta
            )));
        }
        lat.rational_form = Some((p, q));
        Ok(lat)
    }

    pub fn redundancy_inverse(&self) -> f64 {
        self.alpha * self.beta
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Continued-fraction convergent `p / q` of `v` with `q <= max_q` and
/// `|v - p/q| <= tol`.
pub fn rational_approximation(v: f64, max_q: u64, tol: f64) -> Option<(u64, u64)> {
    if !(v > 0.0) {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_q {
            break;
        }
        if (v - p2 as f64 / q2 as f64).abs() <= tol {
            return Some((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = x - a as f64;
        if frac <= 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// Which construction applies to `G(B_m, alpha, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeCase {
    /// `1 / beta >= m`: every row of `P(x)` meets at most one column.
    HighRedundancy,
    /// `alpha` is an integer in `1..m` with `alpha beta < 1`.
    IntegerAlpha,
    /// `1 / beta` is an integer in `1..m` with `alpha beta < 1`.
    IntegerBetaInverse,
}

fn near_integer(v: f64) -> Option<u64> {
    let r = v.round();
    ((v - r).abs() <= 1e-12 && r >= 1.0).then_some(r as u64)
}

/// Classifies the lattice for an order-`m` spline, or explains why none of
/// the constructions applies.
pub fn classify_lattice(order: usize, lat: &LatticeParams) -> Result<LatticeCase> {
    let m = order as f64;
    if lat.alpha >= m {
        return Err(Error::InvalidLattice(format!(
            "alpha = {} must be smaller than the spline order {order}",
            lat.alpha
        )));
    }
    if 1.0 / lat.beta >= m - SUPPORT_TOL {
        return Ok(LatticeCase::HighRedundancy);
    }
    if lat.alpha * lat.beta >= 1.0 {
        return Err(Error::InvalidLattice(format!(
            "alpha beta = {} must be below 1",
            lat.alpha * lat.beta
        )));
    }
    if let Some(a) = near_integer(lat.alpha) {
        if (a as usize) < order {
            return Ok(LatticeCase::IntegerAlpha);
        }
    }
    if let Some(b) = near_integer(1.0 / lat.beta) {
        if (b as usize) < order {
            return Ok(LatticeCase::IntegerBetaInverse);
        }
    }
    Err(Error::InvalidLattice(format!(
        "(alpha, beta) = ({}, {}) is not covered for order {order}: need 0 < alpha < m and \
         beta <= 1/m, or alpha in {{1, ..., m-1}} with alpha beta < 1, or 1/beta in \
         {{1, ..., m-1}} with alpha beta < 1",
        lat.alpha, lat.beta
    )))
}

/// `k_0 = ceil((m - 1/beta) / (1/beta - alpha)) - 1`.
pub fn k0(order: usize, lat: &LatticeParams) -> i64 {
    let m = order as f64;
    let ib = 1.0 / lat.beta;
    ((m - ib) / (ib - lat.alpha) - 1e-12).ceil() as i64 - 1
}

/// The interval of length `alpha` on which `sigma(x)` is computed.
pub fn dual_interval(order: usize, lat: &LatticeParams, case: LatticeCase) -> (f64, f64) {
    let m = order as f64;
    match case {
        LatticeCase::HighRedundancy => ((m - lat.alpha) / 2.0, (m + lat.alpha) / 2.0),
        _ => {
            let a = m - 1.0 / lat.beta;
            (a, a + lat.alpha)
        }
    }
}

/// A finite block of `P(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreGramianBlock {
    pub entries: DenseMatrix,
    /// Index `k` of the first row.
    pub row_offset: i64,
    /// Index `l` of the first column.
    pub col_offset: i64,
    pub x: f64,
}

/// Pre-Gramian entry with structural zeros outside the open support.
fn entry(w: &EBSplineWindow, t: f64) -> f64 {
    let m = w.order as f64;
    if t <= SUPPORT_TOL || t >= m - SUPPORT_TOL {
        0.0
    } else {
        w.evaluate(t)
    }
}

/// Columns `l` where row `k` of `P(x)` is structurally nonzero.
fn row_columns(order: usize, lat: &LatticeParams, x: f64, k: i64) -> std::ops::RangeInclusive<i64> {
    let m = order as f64;
    let t = x + k as f64 * lat.alpha;
    // t - l / beta in (tol, m - tol)
    let lo = ((t - m + SUPPORT_TOL) * lat.beta).floor() as i64 + 1;
    let hi = ((t - SUPPORT_TOL) * lat.beta).ceil() as i64 - 1;
    let lo = (lo - 1..=lo + 1)
        .find(|&l| {
            let v = t - l as f64 / lat.beta;
            v > SUPPORT_TOL && v < m - SUPPORT_TOL
        })
        .unwrap_or(lo);
    let hi = (hi - 1..=hi + 1)
        .rev()
        .find(|&l| {
            let v = t - l as f64 / lat.beta;
            v > SUPPORT_TOL && v < m - SUPPORT_TOL
        })
        .unwrap_or(hi);
    lo..=hi
}

/// The submatrix of `P(x)` with the given index ranges.
pub fn pre_gramian_window(
    w: &EBSplineWindow,
    lat: &LatticeParams,
    x: f64,
    rows: std::ops::RangeInclusive<i64>,
    cols: std::ops::RangeInclusive<i64>,
) -> PreGramianBlock {
    let (k0, l0) = (*rows.start(), *cols.start());
    let nr = (rows.end() - k0 + 1).max(0) as usize;
    let nc = (cols.end() - l0 + 1).max(0) as usize;
    let entries = DenseMatrix::from_fn(nr, nc, |i, j| {
        let k = k0 + i as i64;
        let l = l0 + j as i64;
        entry(w, x + k as f64 * lat.alpha - l as f64 / lat.beta)
    });
    PreGramianBlock {
        entries,
        row_offset: k0,
        col_offset: l0,
        x,
    }
}

/// The square block `P_0(x)` with rows and columns `0..=k_0`, for
/// `x in I = [m - 1/beta, m - 1/beta + alpha]`.
pub fn build_block_p0(w: &EBSplineWindow, lat: &LatticeParams, x: f64) -> Result<PreGramianBlock> {
    let case = classify_lattice(w.order, lat)?;
    if case == LatticeCase::HighRedundancy {
        return Err(Error::InvalidLattice(
            "beta <= 1/m: P(x) is block diagonal, use the high-redundancy construction".into(),
        ));
    }
    let (a, b) = dual_interval(w.order, lat, case);
    if x < a - 1e-12 || x > b + 1e-12 {
        return Err(Error::OutOfRange(format!(
            "x = {x} is outside I = [{a}, {b}]"
        )));
    }
    let k = k0(w.order, lat);
    Ok(pre_gramian_window(w, lat, x, 0..=k, 0..=k))
}

/// `sigma(x)` for one `x`, with the row indices it lives on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaRow {
    pub x: f64,
    pub ks: Vec<i64>,
    pub values: Vec<f64>,
    /// `max_l |sum_k sigma_k P_{k,l}(x) - delta_{l,0}|`.
    pub residual: f64,
}

/// One sample `(x, gamma(x))` of a dual window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualSample {
    pub x: f64,
    pub value: f64,
    /// Sample sits on a shifted endpoint of `I`, where `gamma` may jump.
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualWindow {
    pub alpha: f64,
    pub beta: f64,
    pub case: LatticeCase,
    pub interval: (f64, f64),
    pub extra_cols: usize,
    pub x_grid: Vec<f64>,
    pub sigma_rows: Vec<SigmaRow>,
    pub max_residual: f64,
    /// `beta sum_k sup_x |sigma_k(x)|`.
    pub wiener_norm_estimate: f64,
}

impl DualWindow {
    /// `gamma(x + k alpha) = beta sigma_k(x)`, sorted by position.
    pub fn samples(&self) -> Vec<DualSample> {
        let last = self.x_grid.len().saturating_sub(1);
        let mut out: Vec<DualSample> = self
            .sigma_rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.ks
                    .iter()
                    .zip(&row.values)
                    .map(move |(&k, &s)| DualSample {
                        x: row.x + k as f64 * self.alpha,
                        value: self.beta * s,
                        boundary: i == 0 || i == last,
                    })
            })
            .collect();
        out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.boundary.cmp(&b.boundary)));
        out
    }
}

/// Builds `sigma(x)` on `grid_points` samples of `I` and the dual window
/// `gamma`. With `extra_cols = 0` the square block `P_0(x)` is inverted;
/// otherwise `extra_cols / 2` columns are added on the left and the rest on
/// the right, all rows supported inside the enlarged column range are kept,
/// and `sigma` is read off the Moore–Penrose pseudo-inverse.
pub fn dual_window(
    w: &EBSplineWindow,
    lat: &LatticeParams,
    grid_points: usize,
    extra_cols: usize,
) -> Result<DualWindow> {
    if w.order < 2 {
        return Err(Error::InvalidRates("dual windows need order m >= 2".into()));
    }
    if grid_points < 2 {
        return Err(Error::OutOfRange(
            "at least two grid points are required".into(),
        ));
    }
    let case = classify_lattice(w.order, lat)?;
    let (a, b) = dual_interval(w.order, lat, case);
    let k_top = match case {
        LatticeCase::HighRedundancy => 0,
        _ => k0(w.order, lat),
    };
    let x_grid: Vec<f64> = (0..grid_points)
        .map(|i| a + (b - a) * i as f64 / (grid_points - 1) as f64)
        .collect();
    let sigma_rows: Vec<SigmaRow> = x_grid
        .par_iter()
        .map(|&x| sigma_at(w, lat, x, k_top, extra_cols))
        .collect::<Result<_>>()?;

    let mut sup: BTreeMap<i64, f64> = BTreeMap::new();
    for row in &sigma_rows {
        for (&k, &s) in row.ks.iter().zip(&row.values) {
            let e = sup.entry(k).or_insert(0.0);
            *e = e.max(s.abs());
        }
    }
    let max_residual = sigma_rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(DualWindow {
        alpha: lat.alpha,
        beta: lat.beta,
        case,
        interval: (a, b),
        extra_cols,
        x_grid,
        sigma_rows,
        max_residual,
        wiener_norm_estimate: lat.beta * sup.values().sum::<f64>(),
    })
}

fn sigma_at(
    w: &EBSplineWindow,
    lat: &LatticeParams,
    x: f64,
    k_top: i64,
    extra_cols: usize,
) -> Result<SigmaRow> {
    let (ks, values) = if extra_cols == 0 {
        let block = pre_gramian_window(w, lat, x, 0..=k_top, 0..=k_top);
        let n = block.entries.rows();
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0;
        let sigma = linalg::solve(&block.entries.transpose(), &e0)?;
        ((0..=k_top).collect::<Vec<_>>(), sigma)
    } else {
        let lo = -((extra_cols / 2) as i64);
        let hi = k_top + (extra_cols - extra_cols / 2) as i64;
        let m = w.order as f64;
        let k_min = ((lo as f64 / lat.beta - x) / lat.alpha).floor() as i64 - 1;
        let k_max = ((hi as f64 / lat.beta - x + m) / lat.alpha).ceil() as i64 + 1;
        let rows: Vec<i64> = (k_min..=k_max)
            .filter(|&k| {
                let r = row_columns(w.order, lat, x, k);
                !r.is_empty() && *r.start() >= lo && *r.end() <= hi
            })
            .collect();
        let entries = DenseMatrix::from_fn(rows.len(), (hi - lo + 1) as usize, |i, j| {
            entry(
                w,
                x + rows[i] as f64 * lat.alpha - (lo + j as i64) as f64 / lat.beta,
            )
        });
        let d = linalg::svd(&entries)?;
        let rank = d.rank(linalg::PINV_CUTOFF);
        if rank < entries.cols() {
            return Err(Error::RankDeficient {
                rank,
                cols: entries.cols(),
            });
        }
        let gamma = linalg::pinv(&entries)?;
        let col0 = (-lo) as usize;
        (rows, gamma.row(col0).to_vec())
    };
    let residual = duality_residual(w, lat, x, &ks, &values);
    Ok(SigmaRow {
        x,
        ks,
        values,
        residual,
    })
}

/// `max_l |sum_k sigma_k P_{k,l}(x) - delta_{l,0}|` over every column that
/// meets a row carrying `sigma`.
fn duality_residual(
    w: &EBSplineWindow,
    lat: &LatticeParams,
    x: f64,
    ks: &[i64],
    sigma: &[f64],
) -> f64 {
    let mut sums: BTreeMap<i64, f64> = BTreeMap::new();
    sums.insert(0, 0.0);
    for (&k, &s) in ks.iter().zip(sigma) {
        for l in row_columns(w.order, lat, x, k) {
            let v = entry(w, x + k as f64 * lat.alpha - l as f64 / lat.beta);
            *sums.entry(l).or_insert(0.0) += s * v;
        }
    }
    sums.iter()
        .map(|(&l, &v)| (v - if l == 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

/// The symmetric order-2 spline with `B(x) = sinh(lambda x) / lambda` on `[0, 1]`.
pub fn symmetric_spline(lambda: f64) -> Result<EBSplineWindow> {
    build_eb_spline(&[lambda, -lambda])
}

/// The `(s + 1) x s` bidiagonal block with `a_j = B(x_j)`, `b_j = B(x_j + 1)`,
/// `x_j = x_1 - (j - 1)(1/beta - 1)` and `s = ceil(beta x_1 / (1 - beta))`.
pub fn build_block_bidiagonal(lambda: f64, beta: f64, x1: f64) -> Result<PreGramianBlock> {
    if !(lambda > 0.0) {
        return Err(Error::OutOfRange(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    if !(0.5 < beta && beta < 1.0) {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} must lie in (1/2, 1)"
        )));
    }
    if !(2.0 - 1.0 / beta < x1 && x1 < 1.0) {
        return Err(Error::OutOfRange(format!(
            "x1 = {x1} must lie in ({}, 1)",
            2.0 - 1.0 / beta
        )));
    }
    let b = symmetric_spline(lambda)?;
    let s = block_columns(beta, x1);
    let step = 1.0 / beta - 1.0;
    let mut entries = DenseMatrix::zeros(s + 1, s);
    for j in 0..s {
        let xj = x1 - j as f64 * step;
        entries[(j, j)] = b.evaluate(xj);
        entries[(j + 1, j)] = b.evaluate(xj + 1.0);
    }
    Ok(PreGramianBlock {
        entries,
        row_offset: 0,
        col_offset: 0,
        x: x1,
    })
}

fn block_columns(beta: f64, x1: f64) -> usize {
    ((beta * x1 / (1.0 - beta)) - 1e-12).ceil().max(1.0) as usize
}

/// `P_0 = C S` with unit bidiagonal `C` and the left inverse
/// `Gamma_0 = S^+ C^{-1}`.
#[derive(Clone, Debug, Serialize)]
pub struct NevilleFactorization {
    pub r: usize,
    pub c: DenseMatrix,
    pub s: DenseMatrix,
    pub f: DenseMatrix,
    pub gamma0: DenseMatrix,
    /// `||Gamma_0||_2`.
    pub norm: f64,
    pub s_pinv_norm: f64,
    /// `||Gamma_0 P_0 - I||_max`.
    pub left_inverse_residual: f64,
    /// `||C S - P_0||_max`.
    pub factor_residual: f64,
}

pub fn neville_factorize(p0: &PreGramianBlock, beta: f64) -> Result<NevilleFactorization> {
    let e = &p0.entries;
    let s = e.cols();
    if e.rows() != s + 1 || s == 0 {
        return Err(Error::Dimension(format!(
            "expected an (s+1) x s block, got {}x{}",
            e.rows(),
            s
        )));
    }
    let a: Vec<f64> = (0..s).map(|j| e[(j, j)]).collect();
    let b: Vec<f64> = (0..s).map(|j| e[(j + 1, j)]).collect();
    let delta = 0.5 * (1.0 / beta - 1.0);
    let x1 = p0.x;
    // 1-based r, smallest j with |x_j - 1/2| <= delta
    let r = (1..=s)
        .find(|&j| (x1 - (j - 1) as f64 * 2.0 * delta - 0.5).abs() <= delta + 1e-12)
        .ok_or_else(|| Error::OutOfRange("no node x_r within delta of 1/2".into()))?;

    let mut c = DenseMatrix::identity(s + 1);
    for j in 2..=r {
        c[(j - 1, j - 2)] = b[j - 2] / a[j - 2];
    }
    for i in r + 1..=s {
        c[(i - 1, i)] = a[i - 1] / b[i - 1];
    }
    let mut sm = DenseMatrix::zeros(s + 1, s);
    for j in 1..=s {
        if j < r {
            sm[(j - 1, j - 1)] = a[j - 1];
        } else if j == r {
            sm[(j - 1, j - 1)] = a[j - 1];
            sm[(j, j - 1)] = b[j - 1];
        } else {
            sm[(j, j - 1)] = b[j - 1];
        }
    }
    let factor_residual = c.matmul(&sm)?.sub(e)?.max_abs();
    let f = unit_bidiagonal_inverse(&c, r);
    let s_pinv = linalg::pinv(&sm)?;
    let gamma0 = s_pinv.matmul(&f)?;
    let left_inverse_residual = gamma0.matmul(e)?.sub(&DenseMatrix::identity(s))?.max_abs();
    Ok(NevilleFactorization {
        r,
        norm: linalg::norm2(&gamma0)?,
        s_pinv_norm: linalg::norm2(&s_pinv)?,
        c,
        s: sm,
        f,
        gamma0,
        left_inverse_residual,
        factor_residual,
    })
}

/// Inverse of the unit matrix with subdiagonal entries in rows `2..=r` and
/// superdiagonal entries in rows `r+1..=s`, by forward and back substitution
/// on the two decoupled blocks.
fn unit_bidiagonal_inverse(c: &DenseMatrix, r: usize) -> DenseMatrix {
    let n = c.rows();
    let mut f = DenseMatrix::identity(n);
    // lower block, rows/cols 0..r
    for j in 1..r {
        for k in 0..j {
            f[(j, k)] = -c[(j, j - 1)] * f[(j - 1, k)];
        }
    }
    // upper block, rows/cols r..n
    for i in (r..n - 1).rev() {
        for k in i + 1..n {
            f[(i, k)] = -c[(i, i + 1)] * f[(i + 1, k)];
        }
    }
    f
}

/// Norm bound `c_beta^{1/2} lambda / min{sqrt 2 sinh(lambda/2), sinh(lambda/(2 beta))}`.
pub fn neville_norm_bound(lambda: f64, beta: f64) -> f64 {
    let c = crate::bounds::c_beta(beta).unwrap_or(f64::NAN);
    let m = (2f64.sqrt() * (lambda / 2.0).sinh()).min((lambda / (2.0 * beta)).sinh());
    c.sqrt() * lambda / m
}

/// Location of one block of the staircase pre-Gramian of the order-2 spline
/// at `alpha = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StaircaseBlock {
    /// Row and column of the top-left entry.
    pub k: i64,
    pub l: i64,
    pub x1: f64,
    /// Number of columns; the block has `s + 1` rows, or is `1 x 1` when
    /// `x1 = 1`.
    pub s: usize,
}

/// Blocks of `P(x) = (B(x + k - l/beta))` whose first column lies in `cols`,
/// for the order-2 spline and `1/2 < beta < 1`.
pub fn staircase_blocks(beta: f64, x: f64, cols: std::ops::Range<i64>) -> Vec<StaircaseBlock> {
    let step = 1.0 / beta - 1.0;
    let mut out = Vec::new();
    let mut l = cols.start;
    while l < cols.end {
        let k = (l as f64 / beta - x + SUPPORT_TOL).floor() as i64 + 1;
        let t = x + k as f64 - l as f64 / beta;
        if (t - 1.0).abs() <= SUPPORT_TOL {
            out.push(StaircaseBlock {
                k,
                l,
                x1: 1.0,
                s: 1,
            });
            l += 1;
            continue;
        }
        if t >= 2.0 - 1.0 / beta - SUPPORT_TOL {
            let s = ((t / step) - SUPPORT_TOL).ceil().max(1.0) as usize;
            out.push(StaircaseBlock { k, l, x1: t, s });
            l += s as i64;
        } else {
            l += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k0_examples() {
        let lat = LatticeParams::new(1.0, 0.86).unwrap();
        assert_eq!(k0(4, &lat), 17);
        let lat = LatticeParams::new(1.0, 0.6).unwrap();
        assert_eq!(k0(2, &lat), 0);
        let w = build_eb_spline(&[1.0, -1.0]).unwrap();
        let blk = build_block_p0(&w, &lat, 0.5).unwrap();
        assert_eq!(blk.entries.rows(), 1);
        assert_eq!(blk.entries[(0, 0)], w.evaluate(0.5));
    }

    #[test]
    fn rational_detection() {
        let lat = LatticeParams::new(1.0, 31.0 / 61.0).unwrap();
        assert_eq!(lat.rational_form, Some((31, 61)));
        let lat = LatticeParams::new(2.0, 0.45).unwrap();
        assert_eq!(lat.rational_form, Some((9, 10)));
        assert_eq!(
            rational_approximation(std::f64::consts::PI / 4.0, 256, 1e-12),
            None
        );
    }

    #[test]
    fn lattice_cases() {
        let lat = LatticeParams::new(0.7, 0.6).unwrap();
        assert!(classify_lattice(4, &lat).is_err());
        let lat = LatticeParams::new(1.0, 0.86).unwrap();
        assert_eq!(
            classify_lattice(4, &lat).unwrap(),
            LatticeCase::IntegerAlpha
        );
        let lat = LatticeParams::new(0.7, 0.5).unwrap();
        assert_eq!(
            classify_lattice(4, &lat).unwrap(),
            LatticeCase::IntegerBetaInverse
        );
        let lat = LatticeParams::new(1.5, 0.25).unwrap();
        assert_eq!(
            classify_lattice(4, &lat).unwrap(),
            LatticeCase::HighRedundancy
        );
    }

    #[test]
    fn dual_residuals_small() {
        let w = build_eb_spline(&[1.0, 2.0, 3.0]).unwrap();
        let lat = LatticeParams::new(2.0, 0.45).unwrap();
        assert_eq!(k0(3, &lat), 3);
        for extra in [0, 4] {
            let d = dual_window(&w, &lat, 33, extra).unwrap();
            assert!(d.max_residual < 1e-12, "extra {extra}: {}", d.max_residual);
        }
        let w = build_eb_spline(&[-2.0, -1.0, 1.0, 2.0]).unwrap();
        let lat = LatticeParams::new(1.0, 0.86).unwrap();
        let d = dual_window(&w, &lat, 33, 8).unwrap();
        assert!(d.max_residual < 1e-11, "{}", d.max_residual);
    }

    #[test]
    fn bidiagonal_example() {
        let blk = build_block_bidiagonal(1.0, 0.6, 0.9).unwrap();
        assert_eq!((blk.entries.rows(), blk.entries.cols()), (3, 2));
        let x2: f64 = 0.9 - (1.0 / 0.6 - 1.0);
        assert!((blk.entries[(2, 1)] - (1.0 - x2).sinh()).abs() < 1e-14);
        let f = neville_factorize(&blk, 0.6).unwrap();
        assert!(f.left_inverse_residual < 1e-12);
        assert!(f.factor_residual < 1e-14);
        assert!(f.norm <= neville_norm_bound(1.0, 0.6));
    }

    #[test]
    fn staircase_covers_columns() {
        let beta = 0.8;
        let blocks = staircase_blocks(beta, 0.3, -5..20);
        for w in blocks.windows(2) {
            assert_eq!(w[0].l + w[0].s as i64, w[1].l);
        }
    }
}
