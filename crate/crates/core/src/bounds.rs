//! Frame bounds: closed-form lower bounds, transference through the Zak
//! factorization of totally positive windows, and optimal bounds computed
//! from the pre-Gramian.
//!
//! At rational `alpha beta = p / q` the pre-Gramian `P(x)` is block Toeplitz
//! with `q x p` blocks, so its extreme singular values are those of the
//! symbol `Phi(x, w) = sum_n Blk_n(x) e^{2 pi i n w}`. The bipartite graph of
//! nonzero entries usually splits into pieces: pieces that lift to finite
//! blocks of `P(x)` do not depend on `w` and are handled with a real SVD;
//! the rest are sampled in `w`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gramian::LatticeParams;
use crate::linalg::{self, ComplexMatrix, DenseMatrix};
use crate::windows::{build_eb_spline, TPFiniteWindow, Window};
use crate::zak::{self, ZakEvaluator};

/// Entries below this fraction of `max |g|` are structural zeros.
pub const CONNECTIVITY_TOL: f64 = 1e-14;
pub const DEFAULT_INITIAL_GRID: usize = 128;
pub const DEFAULT_MAX_GRID: usize = 2048;
pub const DEFAULT_REFINE_TOL: f64 = 1e-4;
/// Samples of `[0, alpha]` for the diagonal case before golden-section refinement.
pub const HIGHREDUNDANCY_GRID: usize = 2049;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    ClosedFormCase1,
    ClosedFormThmBound,
    ClosedFormTp,
    OptimalRational,
    /// Optimal spline bounds carried over to a totally positive window.
    TransferredRational,
    ZakSubsampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameBoundReport {
    pub lattice: LatticeParams,
    pub method: BoundMethod,
    pub lower: f64,
    pub upper: Option<f64>,
    /// `(n_x, n_w)` of the final grid; `(0, 0)` for closed forms.
    pub grid: (usize, usize),
    /// Relative change of the bounds in the last grid doubling.
    pub max_residual: f64,
    /// Point `x` attaining the lower bound, when it is located.
    pub minimizer: Option<f64>,
}

impl FrameBoundReport {
    fn closed(lattice: LatticeParams, method: BoundMethod, lower: f64) -> Self {
        Self {
            lattice,
            method,
            lower,
            upper: None,
            grid: (0, 0),
            max_residual: 0.0,
            minimizer: None,
        }
    }
}

/// The constant of the lower bound for the symmetric order-2 spline.
pub fn c_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} must lie in (0, 1)"
        )));
    }
    let ib = 1.0 / beta;
    Ok(if beta <= 0.5 {
        1.0
    } else if beta <= 0.75 {
        (3.0 - ib).powi(2)
    } else if beta <= 5.0 / 6.0 {
        (3.0 - ib) * (11.0 - 11.0 * ib + 3.0 * ib * ib)
    } else {
        let r = beta / (1.0 - beta);
        (1.0 + (r / PI).sqrt()) * (1.0 + (PI * r / 4.0).sqrt())
    })
}

/// Lower frame bound of `G(B, 1, beta)` for `B(x) = sinh(lambda x)/lambda`
/// on `[0, 1]`, mirrored on `[1, 2]`.
pub fn lower_bound_eb2(lambda: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} must lie in (0, 1)"
        )));
    }
    let c = c_beta(beta)?;
    let l = lambda.abs();
    if l == 0.0 {
        return Ok((0.5f64).min(1.0 / (2.0 * beta).powi(2)) / (beta * c));
    }
    let m = (2.0 * (l / 2.0).sinh().powi(2)).min((l / (2.0 * beta)).sinh().powi(2));
    Ok(m / (beta * l * l * c))
}

/// Optimal lower bound `2 sinh^2(lambda/2) / (beta lambda^2)` for `beta <= 1/2`.
pub fn lower_bound_case1(lambda: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} must lie in (0, 1/2]"
        )));
    }
    let l = lambda.abs();
    if l == 0.0 {
        return Ok(0.5 / beta);
    }
    Ok(2.0 * (l / 2.0).sinh().powi(2) / (beta * l * l))
}

/// Lower frame bound of `G(g, alpha, beta)` for `g^(w) = (1 + 4 pi^2 w^2 / lambda^2)^{-1}`.
pub fn lower_bound_tp2(lambda: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(lambda > 0.0 && alpha > 0.0 && beta > 0.0) {
        return Err(Error::OutOfRange(
            "lambda, alpha and beta must be positive".into(),
        ));
    }
    if alpha * beta >= 1.0 {
        return Err(Error::InvalidLattice(format!(
            "alpha beta = {} must be below 1",
            alpha * beta
        )));
    }
    let c = c_beta(alpha * beta)?;
    let m =
        (2.0 * (alpha * lambda / 2.0).sinh().powi(2)).min((lambda / (2.0 * beta)).sinh().powi(2));
    Ok(lambda * lambda * m / (16.0 * beta * c * (alpha * lambda / 2.0).cosh().powi(4)))
}

/// Bounds of a frame whose Zak transform is `D` times that of a frame with
/// bounds `(A, B)`, up to the lattice factor `kappa`.
pub fn transfer_bounds(a: f64, b: f64, kappa: f64, d_min_sq: f64, d_max_sq: f64) -> (f64, f64) {
    (kappa * a * d_min_sq, kappa * b * d_max_sq)
}

/// `(min, max)` over `w` of `|C t(alpha w) / alpha|^2`, the squared modulus of
/// the factor linking `Z_alpha g` to `Z_1 B_Lambda`. Every factor of `t` is
/// extremal at `alpha w = 1/2` (minimum) and `alpha w = 0` (maximum).
pub fn tp_transfer_range(window: &TPFiniteWindow, alpha: f64) -> Result<(f64, f64)> {
    let d = |w: f64| -> Result<f64> {
        let t = zak::factorization_factor(alpha, &window.pole_rates, w)?;
        Ok((t * window.normalization / alpha).norm_sqr())
    };
    Ok((d(0.5 / alpha)?, d(0.0)?))
}

/// `beta^{-1} inf_x sum_k g(x + k alpha)^2` and the matching supremum, for
/// `1 / beta` at least the support length.
pub fn optimal_bound_highredundancy(w: &Window, lat: &LatticeParams) -> Result<FrameBoundReport> {
    if !w.is_compact() {
        return Err(Error::UnboundedSupport);
    }
    let (a0, b0) = w.support();
    if 1.0 / lat.beta < b0 - a0 - 1e-12 {
        return Err(Error::InvalidLattice(format!(
            "1/beta = {} is shorter than the support length {}",
            1.0 / lat.beta,
            b0 - a0
        )));
    }
    let alpha = lat.alpha;
    let k_lo = ((a0 - alpha) / alpha).floor() as i64 - 1;
    let k_hi = (b0 / alpha).ceil() as i64 + 1;
    let f = |x: f64| -> f64 {
        (k_lo..=k_hi)
            .map(|k| w.evaluate(x + k as f64 * alpha).powi(2))
            .sum()
    };

    let n = HIGHREDUNDANCY_GRID;
    let xs: Vec<f64> = (0..n).map(|i| alpha * i as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let (imin, _) =
        vals.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    let (imax, _) =
        vals.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let h = alpha / (n - 1) as f64;
    let (x_min, v_min) = golden_section(&f, xs[imin] - h, xs[imin] + h, vals[imin], xs[imin]);
    let (_, v_max) = golden_section(
        &|x| -f(x),
        xs[imax] - h,
        xs[imax] + h,
        -vals[imax],
        xs[imax],
    );
    Ok(FrameBoundReport {
        lattice: *lat,
        method: BoundMethod::ClosedFormCase1,
        lower: v_min / lat.beta,
        upper: Some(-v_max / lat.beta),
        grid: (n, 1),
        max_residual: 0.0,
        minimizer: Some(x_min.rem_euclid(alpha)),
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]`; never returns a
/// worse point than the seed `(x0, f0)`.
fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, f0: f64, x0: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let (x, v) = if fc < fd { (c, fc) } else { (d, fd) };
    if v < f0 {
        (x, v)
    } else {
        (x0, f0)
    }
}

/// Grid settings for the optimal bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridOptions {
    pub initial: usize,
    pub max: usize,
    pub rel_tol: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            initial: DEFAULT_INITIAL_GRID,
            max: DEFAULT_MAX_GRID,
            rel_tol: DEFAULT_REFINE_TOL,
        }
    }
}

/// Doubles the grid until both bounds change by less than `rel_tol`.
fn refine(
    opts: &GridOptions,
    mut eval: impl FnMut(usize) -> Result<(f64, f64, usize)>,
) -> Result<(f64, f64, (usize, usize), f64)> {
    let mut n = opts.initial.max(2);
    let (mut lo, mut up, mut nw) = eval(n)?;
    let mut delta = f64::INFINITY;
    while n < opts.max {
        n *= 2;
        let (l2, u2, w2) = eval(n)?;
        delta = rel_change(lo, l2).max(rel_change(up, u2));
        (lo, up, nw) = (l2, u2, w2);
        if delta < opts.rel_tol {
            break;
        }
    }
    Ok((lo, up, (n, nw), delta))
}

fn rel_change(old: f64, new: f64) -> f64 {
    let scale = old.abs().max(new.abs());
    if scale == 0.0 {
        0.0
    } else {
        (old - new).abs() / scale
    }
}

/// A connected piece of the quotient graph of `P(x)`.
struct Component {
    rows: Vec<usize>,
    cols: Vec<usize>,
    /// Block-shift potentials; consistent iff the piece lifts to finite blocks.
    finite: bool,
    row_pot: Vec<i64>,
    col_pot: Vec<i64>,
}

/// The `q x p` blocks of `P(x)` as a list of nonzero `(i, j, n, value)`.
fn symbol_entries(
    w: &Window,
    lat: &LatticeParams,
    p: usize,
    q: usize,
    x: f64,
    threshold: f64,
) -> Vec<(usize, usize, i64, f64)> {
    let (a0, b0) = w.support();
    let period = q as f64 * lat.alpha;
    let mut out = Vec::new();
    for i in 0..q {
        for j in 0..p {
            let base = x + i as f64 * lat.alpha - j as f64 / lat.beta;
            let n_lo = ((a0 - base) / period).floor() as i64;
            let n_hi = ((b0 - base) / period).ceil() as i64;
            for n in n_lo..=n_hi {
                let v = w.evaluate(base + n as f64 * period);
                if v.abs() > threshold {
                    out.push((i, j, n, v));
                }
            }
        }
    }
    out
}

fn components(p: usize, q: usize, entries: &[(usize, usize, i64, f64)]) -> (Vec<Component>, bool) {
    // nodes: rows 0..q, cols q..q+p
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); p + q];
    for &(i, j, n, _) in entries {
        adj[i].push((q + j, n));
        adj[q + j].push((i, -n));
    }
    let isolated_col = (0..p).any(|j| adj[q + j].is_empty());
    let mut pot: Vec<Option<i64>> = vec![None; p + q];
    let mut comps = Vec::new();
    for start in 0..p + q {
        if pot[start].is_some() || adj[start].is_empty() {
            continue;
        }
        pot[start] = Some(0);
        let mut stack = vec![start];
        let mut members = vec![start];
        let mut finite = true;
        while let Some(u) = stack.pop() {
            let pu = pot[u].unwrap_or(0);
            for &(v, n) in &adj[u] {
                // row potential minus column potential equals the shift
                let want = pu - n;
                match pot[v] {
                    None => {
                        pot[v] = Some(want);
                        members.push(v);
                        stack.push(v);
                    }
                    Some(pv) if pv != want => finite = false,
                    _ => {}
                }
            }
        }
        members.sort_unstable();
        let (rows, cols): (Vec<usize>, Vec<usize>) = members.iter().partition(|&&u| u < q);
        comps.push(Component {
            row_pot: rows.iter().map(|&u| pot[u].unwrap_or(0)).collect(),
            col_pot: cols.iter().map(|&u| pot[u].unwrap_or(0)).collect(),
            rows,
            cols: cols.iter().map(|&u| u - q).collect(),
            finite,
        });
    }
    (comps, isolated_col)
}

/// `(sigma_min^2, sigma_max^2)` of `P(x)` with `w` sampled on `n_w` points
/// where needed; returns whether any piece needed `w`.
fn extreme_singular_values_at(
    w: &Window,
    lat: &LatticeParams,
    p: usize,
    q: usize,
    x: f64,
    n_w: usize,
    threshold: f64,
) -> Result<(f64, f64, bool)> {
    let entries = symbol_entries(w, lat, p, q, x, threshold);
    let (comps, isolated_col) = components(p, q, &entries);
    let mut lo = if isolated_col { 0.0 } else { f64::INFINITY };
    let mut up = 0.0f64;
    let mut used_w = false;
    for c in &comps {
        let row_idx = |i: usize| c.rows.binary_search(&i).ok();
        let col_idx = |j: usize| c.cols.binary_search(&j).ok();
        let local: Vec<(usize, usize, i64, f64)> = entries
            .iter()
            .filter_map(|&(i, j, n, v)| Some((row_idx(i)?, col_idx(j)?, n, v)))
            .collect();
        let (nr, nc) = (c.rows.len(), c.cols.len());
        if c.finite {
            let mut m = DenseMatrix::zeros(nr, nc);
            for &(r, s, n, v) in &local {
                if c.row_pot[r] - c.col_pot[s] == n {
                    m[(r, s)] += v;
                }
            }
            let sv = linalg::singular_values(&m)?;
            up = up.max(sv[0] * sv[0]);
            let smin = if nc > nr { 0.0 } else { sv[nc - 1] };
            lo = lo.min(smin * smin);
        } else {
            used_w = true;
            for k in 0..n_w {
                let omega = k as f64 / n_w as f64;
                let mut m = ComplexMatrix::zeros(nr, nc);
                for &(r, s, n, v) in &local {
                    m[(r, s)] += Complex64::from_polar(v, 2.0 * PI * n as f64 * omega);
                }
                let sv = linalg::complex_singular_values(&m)?;
                up = up.max(sv[0] * sv[0]);
                let smin = if nc > nr { 0.0 } else { sv[nc - 1] };
                lo = lo.min(smin * smin);
            }
        }
    }
    if !lo.is_finite() {
        lo = 0.0;
    }
    Ok((lo, up, used_w))
}

fn window_sup(w: &Window) -> f64 {
    let (a, b) = w.support();
    (0..=4096)
        .map(|i| w.evaluate(a + (b - a) * i as f64 / 4096.0).abs())
        .fold(0.0, f64::max)
}

/// Grid-optimal frame bounds at rational `alpha beta = p / q` from the
/// block-Toeplitz symbol of the pre-Gramian.
pub fn optimal_bound_rational(w: &Window, lat: &LatticeParams) -> Result<FrameBoundReport> {
    optimal_bound_rational_with(w, lat, &GridOptions::default())
}

pub fn optimal_bound_rational_with(
    w: &Window,
    lat: &LatticeParams,
    opts: &GridOptions,
) -> Result<FrameBoundReport> {
    if !w.is_compact() {
        return Err(Error::UnboundedSupport);
    }
    let (p, q) = lat.rational_form.ok_or_else(|| {
        Error::InvalidLattice(format!(
            "alpha beta = {} is not a fraction with denominator <= {}",
            lat.alpha * lat.beta,
            crate::gramian::MAX_DENOMINATOR
        ))
    })?;
    if p >= q {
        return Err(Error::InvalidLattice(format!(
            "alpha beta = {p}/{q} must be below 1"
        )));
    }
    let (p, q) = (p as usize, q as usize);
    let threshold = CONNECTIVITY_TOL * window_sup(w);
    // singular values of P(x) are (alpha / p)-periodic in x
    let x_period = lat.alpha / p as f64;
    let (lo, up, grid, delta) = refine(opts, |n| {
        let per_x: Vec<(f64, f64, bool)> = (0..n)
            .into_par_iter()
            .map(|i| {
                extreme_singular_values_at(
                    w,
                    lat,
                    p,
                    q,
                    x_period * i as f64 / n as f64,
                    n,
                    threshold,
                )
            })
            .collect::<Result<_>>()?;
        let lo = per_x.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let up = per_x.iter().map(|r| r.1).fold(0.0, f64::max);
        let used_w = per_x.iter().any(|r| r.2);
        Ok((lo, up, if used_w { n } else { 1 }))
    })?;
    Ok(FrameBoundReport {
        lattice: *lat,
        method: BoundMethod::OptimalRational,
        lower: lo / lat.beta,
        upper: Some(up / lat.beta),
        grid,
        max_residual: delta,
        minimizer: None,
    })
}

/// Extreme singular values of the full symbol `Phi(x, w)` without splitting
/// into pieces; a slow cross-check of [`optimal_bound_rational`].
pub fn symbol_extremes_dense(
    w: &Window,
    lat: &LatticeParams,
    x: f64,
    omega: f64,
) -> Result<(f64, f64)> {
    let (p, q) = lat
        .rational_form
        .ok_or_else(|| Error::InvalidLattice("irrational alpha beta".into()))?;
    let (p, q) = (p as usize, q as usize);
    let entries = symbol_entries(w, lat, p, q, x, 0.0);
    let mut m = ComplexMatrix::zeros(q, p);
    for (i, j, n, v) in entries {
        m[(i, j)] += Complex64::from_polar(v, 2.0 * PI * n as f64 * omega);
    }
    let sv = linalg::complex_singular_values(&m)?;
    Ok((
        sv[sv.len() - 1].powi(2) / lat.beta,
        sv[0].powi(2) / lat.beta,
    ))
}

/// `inf` and `sup` over `[0, 1)^2` of `sum_{j < N} |Z_1 g(x, w + j / N)|^2`,
/// the optimal bounds of `G(g, 1, 1/N)`.
pub fn optimal_bound_zak_subsampled(w: &Window, n: usize) -> Result<FrameBoundReport> {
    optimal_bound_zak_subsampled_with(w, n, &GridOptions::default())
}

pub fn optimal_bound_zak_subsampled_with(
    w: &Window,
    n: usize,
    opts: &GridOptions,
) -> Result<FrameBoundReport> {
    if n == 0 {
        return Err(Error::OutOfRange("N must be positive".into()));
    }
    let e = ZakEvaluator::new(w.clone(), 1.0)?;
    let step = 1.0 / n as f64;
    let (lo, up, grid, delta) = refine(opts, |g| {
        let rows: Vec<(f64, f64)> = (0..g)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 / g as f64;
                let mut lo = f64::INFINITY;
                let mut up = 0.0f64;
                for k in 0..g {
                    // the sum is (1/N)-periodic in w
                    let omega = step * k as f64 / g as f64;
                    let s: f64 = (0..n)
                        .map(|j| e.zak(x, omega + j as f64 * step).norm_sqr())
                        .sum();
                    lo = lo.min(s);
                    up = up.max(s);
                }
                (lo, up)
            })
            .collect();
        Ok((
            rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
            rows.iter().map(|r| r.1).fold(0.0, f64::max),
            g,
        ))
    })?;
    Ok(FrameBoundReport {
        lattice: LatticeParams::with_rational_form(1.0, step, 1, n as u64)?,
        method: BoundMethod::ZakSubsampled,
        lower: lo,
        upper: Some(up),
        grid,
        max_residual: delta,
        minimizer: None,
    })
}

/// Bounds for a totally positive window of finite type: optimal bounds of
/// `G(B_Lambda, 1, alpha beta)` with `Lambda = -alpha a`, transferred through
/// the exact range of the factorization factor.
pub fn transferred_optimal_tp(
    window: &TPFiniteWindow,
    lat: &LatticeParams,
    opts: &GridOptions,
) -> Result<FrameBoundReport> {
    let spline = build_eb_spline(&zak::associated_spline_rates(window, lat.alpha))?;
    let spline_lat = match lat.rational_form {
        Some((p, q)) => LatticeParams::with_rational_form(1.0, lat.alpha * lat.beta, p, q)?,
        None => LatticeParams::new(1.0, lat.alpha * lat.beta)?,
    };
    let inner = optimal_bound_rational_with(&Window::from(spline), &spline_lat, opts)?;
    let (dmin, dmax) = tp_transfer_range(window, lat.alpha)?;
    let (a, b) = transfer_bounds(
        inner.lower,
        inner.upper.unwrap_or(f64::NAN),
        lat.alpha,
        dmin,
        dmax,
    );
    Ok(FrameBoundReport {
        lattice: *lat,
        method: BoundMethod::TransferredRational,
        lower: a,
        upper: Some(b),
        grid: inner.grid,
        max_residual: inner.max_residual,
        minimizer: None,
    })
}

pub fn closed_form_eb2_report(lambda: f64, lat: &LatticeParams) -> Result<FrameBoundReport> {
    if lat.alpha != 1.0 {
        return Err(Error::InvalidLattice(
            "the closed form needs alpha = 1".into(),
        ));
    }
    if lat.beta <= 0.5 {
        return Ok(FrameBoundReport::closed(
            *lat,
            BoundMethod::ClosedFormCase1,
            lower_bound_case1(lambda, lat.beta)?,
        ));
    }
    Ok(FrameBoundReport::closed(
        *lat,
        BoundMethod::ClosedFormThmBound,
        lower_bound_eb2(lambda, lat.beta)?,
    ))
}

pub fn closed_form_tp2_report(lambda: f64, lat: &LatticeParams) -> Result<FrameBoundReport> {
    Ok(FrameBoundReport::closed(
        *lat,
        BoundMethod::ClosedFormTp,
        lower_bound_tp2(lambda, lat.alpha, lat.beta)?,
    ))
}

/// One row of the sweep `beta = k / den` for the symmetric order-2 spline
/// and the two-sided exponential with the same `lambda`, at `alpha = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: u64,
    pub beta: f64,
    pub eb_formula: f64,
    pub eb_optimal_lower: f64,
    pub eb_optimal_upper: f64,
    pub tp_formula: f64,
    pub tp_optimal_lower: f64,
    pub tp_optimal_upper: f64,
    pub grid: usize,
    pub max_residual: f64,
}

pub fn figure3_sweep(
    lambda: f64,
    den: u64,
    ks: std::ops::RangeInclusive<u64>,
    opts: &GridOptions,
) -> Result<Vec<SweepRow>> {
    if !(lambda > 0.0) {
        return Err(Error::OutOfRange(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    let spline = Window::from(build_eb_spline(&[lambda, -lambda])?);
    let tp = crate::windows::build_tp_window(&[lambda, -lambda], 1.0)?;
    let (dmin, dmax) = tp_transfer_range(&tp, 1.0)?;
    let ks: Vec<u64> = ks.collect();
    let mut rows: Vec<SweepRow> = ks
        .par_iter()
        .map(|&k| {
            let g = crate::gramian::gcd(k, den);
            let lat =
                LatticeParams::with_rational_form(1.0, k as f64 / den as f64, k / g, den / g)?;
            let opt = optimal_bound_rational_with(&spline, &lat, opts)?;
            let upper = opt.upper.unwrap_or(f64::NAN);
            let (tl, tu) = transfer_bounds(opt.lower, upper, 1.0, dmin, dmax);
            Ok(SweepRow {
                k,
                beta: lat.beta,
                eb_formula: lower_bound_eb2(lambda, lat.beta)?,
                eb_optimal_lower: opt.lower,
                eb_optimal_upper: upper,
                tp_formula: lower_bound_tp2(lambda, 1.0, lat.beta)?,
                tp_optimal_lower: tl,
                tp_optimal_upper: tu,
                grid: opt.grid.0,
                max_residual: opt.max_residual,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.k);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(lambda: f64) -> Window {
        Window::from(build_eb_spline(&[lambda, -lambda]).unwrap())
    }

    #[test]
    fn c_beta_cases() {
        assert_eq!(c_beta(0.4).unwrap(), 1.0);
        assert!((c_beta(0.75).unwrap() - 25.0 / 9.0).abs() < 1e-14);
        let v = c_beta(1.0 - 1e-4).unwrap();
        assert!((v / (57.42 * 89.62) - 1.0).abs() < 1e-3, "{v}");
        assert!((c_beta(5.0 / 6.0).unwrap() - c_beta(5.0 / 6.0 + 1e-12).unwrap()).abs() > 0.1);
        assert!(c_beta(1.0).is_err());
    }

    #[test]
    fn eb2_examples() {
        let v = lower_bound_eb2(1.0, 0.4).unwrap();
        assert!((v - 2.0 * 0.5f64.sinh().powi(2) / 0.4).abs() < 1e-14);
        let v = lower_bound_eb2(0.0, 0.6).unwrap();
        let want = (0.5f64).min(1.0 / 1.44) / (0.6 * (3.0 - 1.0 / 0.6f64).powi(2));
        assert!((v - want).abs() < 1e-14);
    }

    #[test]
    fn tp2_matches_transfer() {
        let (l, a, b) = (1.3, 0.8, 0.7);
        let tp = crate::windows::build_tp_window(&[l, -l], 1.0).unwrap();
        let (dmin, _) = tp_transfer_range(&tp, a).unwrap();
        let want = a * a * l.powi(4) / (16.0 * (a * l / 2.0).cosh().powi(4));
        assert!((dmin - want).abs() < 1e-12 * want);
        let eb = lower_bound_eb2(a * l, a * b).unwrap();
        let (t, _) = transfer_bounds(eb, 1.0, a, dmin, 1.0);
        assert!((t - lower_bound_tp2(l, a, b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hat_high_redundancy() {
        let lat = LatticeParams::new(1.0, 0.5).unwrap();
        let r = optimal_bound_highredundancy(&sym(0.0), &lat).unwrap();
        assert!((r.lower - 1.0).abs() < 1e-12);
        assert!((r.minimizer.unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rational_matches_diagonal_case() {
        let lat = LatticeParams::new(1.0, 0.5).unwrap();
        let r = optimal_bound_rational(&sym(1.0), &lat).unwrap();
        let want = 2.0 * 0.5f64.sinh().powi(2) / 0.5;
        assert!((r.lower - want).abs() < 1e-6, "{} vs {want}", r.lower);
    }

    #[test]
    fn components_agree_with_dense_symbol() {
        let w = Window::from(build_eb_spline(&[-1.0, 0.5, 2.0]).unwrap());
        let lat = LatticeParams::new(1.0, 0.6).unwrap();
        let (p, q) = lat.rational_form.unwrap();
        let thr = CONNECTIVITY_TOL * window_sup(&w);
        for &x in &[0.0, 0.13, 0.27] {
            let (lo, up, _) =
                extreme_singular_values_at(&w, &lat, p as usize, q as usize, x, 64, thr).unwrap();
            let mut dlo = f64::INFINITY;
            let mut dup = 0.0f64;
            for k in 0..64 {
                let (a, b) = symbol_extremes_dense(&w, &lat, x, k as f64 / 64.0).unwrap();
                dlo = dlo.min(a);
                dup = dup.max(b);
            }
            assert!((lo / lat.beta - dlo).abs() < 1e-10, "{x}: {lo} {dlo}");
            assert!((up / lat.beta - dup).abs() < 1e-10);
        }
    }
}
