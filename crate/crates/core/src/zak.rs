//! Zak transforms `Z_alpha g(x, w) = sum_k g(x - k alpha) e^{2 pi i k alpha w}`.
//!
//! Compactly supported windows are summed exactly. Windows of finite type
//! are summed over a window of `2K + 1` shifts centred at `floor(x / alpha)`,
//! with `K` chosen from their exponential envelope so that the neglected
//! tail is below [`TP_TAIL_TARGET`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::windows::{build_eb_spline, TPFiniteWindow, Window};

/// Bound on the neglected tail of a truncated Zak sum.
pub const TP_TAIL_TARGET: f64 = 1e-12;

/// x-tolerance of the zero bisection.
pub const BISECTION_TOL: f64 = 1e-12;

/// Uniform samples used to bracket the zero on `[0, 1]` (64 intervals).
pub const BRACKET_INTERVALS: usize = 64;

/// Grid cells excluded around the zero in the off-zero scan.
pub const EXCLUSION_CELLS: usize = 2;

/// Default grid for zero scans.
pub const DEFAULT_SCAN_GRID: usize = 256;

#[derive(Clone, Debug, Serialize)]
pub struct ZakEvaluator {
    window: Window,
    alpha: f64,
    truncation_half_width: usize,
    tail_bound: f64,
}

impl ZakEvaluator {
    pub fn new(window: impl Into<Window>, alpha: f64) -> Result<Self> {
        let window = window.into();
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "alpha = {alpha} must be positive"
            )));
        }
        let (k, tail) = match window.envelope() {
            None => {
                let (a, b) = window.support();
                (((b - a) / alpha).ceil() as usize + 1, 0.0)
            }
            Some((c, delta)) => {
                let q = (-delta * alpha).exp();
                let tail = |k: usize| 2.0 * c * (-delta * alpha * k as f64).exp() / (1.0 - q);
                let mut k = ((2.0 * c / ((1.0 - q) * TP_TAIL_TARGET)).ln() / (delta * alpha))
                    .ceil()
                    .max(1.0) as usize;
                while k > 1 && tail(k - 1) <= TP_TAIL_TARGET {
                    k -= 1;
                }
                while tail(k) > TP_TAIL_TARGET {
                    k += 1;
                }
                (k, tail(k))
            }
        };
        Ok(Self {
            window,
            alpha,
            truncation_half_width: k,
            tail_bound: tail,
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn truncation_half_width(&self) -> usize {
        self.truncation_half_width
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Shift indices `k` contributing at `x`.
    fn k_range(&self, x: f64) -> std::ops::RangeInclusive<i64> {
        if self.window.is_compact() {
            let (a, b) = self.window.support();
            let lo = ((x - b) / self.alpha).floor() as i64;
            let hi = ((x - a) / self.alpha).ceil() as i64;
            lo..=hi
        } else {
            let c = (x / self.alpha).floor() as i64;
            let k = self.truncation_half_width as i64;
            c - k..=c + k
        }
    }

    pub fn zak(&self, x: f64, omega: f64) -> Complex64 {
        self.k_range(x)
            .map(|k| {
                let v = self.window.evaluate(x - k as f64 * self.alpha);
                if v == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let turns = (k as f64 * self.alpha * omega).rem_euclid(1.0);
                Complex64::from_polar(v, 2.0 * PI * turns)
            })
            .sum()
    }

    /// `Z_alpha g(x, 1 / (2 alpha)) = sum_k (-1)^k g(x - k alpha)`, which is
    /// real for real windows.
    pub fn zak_half(&self, x: f64) -> f64 {
        self.k_range(x)
            .map(|k| {
                let v = self.window.evaluate(x - k as f64 * self.alpha);
                if k.rem_euclid(2) == 0 {
                    v
                } else {
                    -v
                }
            })
            .sum()
    }
}

pub fn zak(e: &ZakEvaluator, x: f64, omega: f64) -> Complex64 {
    e.zak(x, omega)
}

/// Maximal residuals of the periodicity, quasi-periodicity, dilation and
/// Fourier-side identities on sampled points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub samples: usize,
    pub periodicity: f64,
    pub quasi_periodicity: f64,
    pub scaling: f64,
    /// `None` when the Fourier-side sum cannot be truncated accurately
    /// enough (low orders) or the window has no closed-form transform.
    pub fourier: Option<f64>,
    pub fourier_terms: Option<usize>,
    pub max_residual: f64,
}

/// Additive recurrence points `frac(i * phi)`; deterministic and well spread.
fn kronecker(i: usize, irrational: f64) -> f64 {
    (0.5 + i as f64 * irrational).fract()
}

const PHI1: f64 = 0.618_033_988_749_894_9;
const PHI2: f64 = 0.414_213_562_373_095_1;
const PHI3: f64 = 0.732_050_807_568_877_2;

/// Target for the Fourier-side truncation error.
const FOURIER_TAIL_TARGET: f64 = 1e-11;
const FOURIER_MAX_TERMS: usize = 100_000;

pub fn verify_zak_identities(e: &ZakEvaluator, samples: usize) -> Result<IdentityResiduals> {
    let alpha = e.alpha;
    let scaled = ZakEvaluator::new(e.window.dilated(alpha)?, 1.0)?;
    let fourier_k = fourier_truncation(&e.window, alpha);
    let mut res = IdentityResiduals {
        samples,
        periodicity: 0.0,
        quasi_periodicity: 0.0,
        scaling: 0.0,
        fourier: fourier_k.map(|_| 0.0),
        fourier_terms: fourier_k,
        max_residual: 0.0,
    };
    for i in 0..samples {
        let x = (kronecker(i, PHI1) * 4.0 - 2.0) * alpha;
        let omega = (kronecker(i, PHI2) * 2.0 - 1.0) / alpha;
        let n = (kronecker(i, PHI3) * 7.0).floor() as i64 - 3;
        let z = e.zak(x, omega);

        let per = e.zak(x, omega + n as f64 / alpha);
        res.periodicity = res.periodicity.max((per - z).norm());

        let turns = (n as f64 * alpha * omega).rem_euclid(1.0);
        let quasi = e.zak(x + n as f64 * alpha, omega);
        let expected = Complex64::from_polar(1.0, 2.0 * PI * turns) * z;
        res.quasi_periodicity = res.quasi_periodicity.max((quasi - expected).norm());

        let sc = scaled.zak(x / alpha, alpha * omega);
        res.scaling = res.scaling.max((sc - z).norm());

        if let (Some(k), Some(r)) = (fourier_k, res.fourier.as_mut()) {
            let rhs = fourier_side(&e.window, alpha, x, omega, k);
            *r = r.max((rhs - z * alpha).norm());
        }
    }
    res.max_residual = res
        .periodicity
        .max(res.quasi_periodicity)
        .max(res.scaling)
        .max(res.fourier.unwrap_or(0.0));
    Ok(res)
}

/// `e^{2 pi i x w} Z_{1/alpha} g^(w, -x)` truncated to `|l| <= k`.
fn fourier_side(w: &Window, alpha: f64, x: f64, omega: f64, k: usize) -> Complex64 {
    let k = k as i64;
    let sum: Complex64 = (-k..=k)
        .map(|l| {
            let nu = omega - l as f64 / alpha;
            let turns = (-(l as f64) * x / alpha).rem_euclid(1.0);
            window_fourier(w, nu).unwrap_or_default() * Complex64::from_polar(1.0, 2.0 * PI * turns)
        })
        .sum();
    sum * Complex64::from_polar(1.0, 2.0 * PI * (x * omega).rem_euclid(1.0))
}

fn window_fourier(w: &Window, omega: f64) -> Option<Complex64> {
    match w {
        Window::EbSpline(b) => Some(b.fourier(omega)),
        Window::Tp(g) => Some(g.fourier(omega)),
        Window::Compact(_) => None,
    }
}

/// Number of Fourier terms needed for the target accuracy, from
/// `|g^(v)| <= M |v|^{-m}`: the tail beyond `|l| > K` is at most
/// `2 M alpha^m / ((m - 1) (K - 1)^{m - 1})`.
fn fourier_truncation(w: &Window, alpha: f64) -> Option<usize> {
    let (m, big_m) = match w {
        Window::EbSpline(b) => (
            b.order,
            b.rates.iter().map(|l| l.exp() + 1.0).product::<f64>()
                / (2.0 * PI).powi(b.order as i32),
        ),
        Window::Tp(g) => (
            g.order(),
            g.normalization * g.pole_rates.iter().map(|a| a.abs()).product::<f64>()
                / (2.0 * PI).powi(g.order() as i32),
        ),
        Window::Compact(_) => return None,
    };
    if m < 2 {
        return None;
    }
    let mf = m as f64;
    let k = (2.0 * big_m * alpha.powf(mf) / ((mf - 1.0) * FOURIER_TAIL_TARGET))
        .powf(1.0 / (mf - 1.0))
        + 1.0;
    let k = k.ceil().max(1.0);
    (k <= FOURIER_MAX_TERMS as f64).then_some(k as usize)
}

/// Location of the zero of a Zak transform on the line `w = 1 / (2 alpha)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroReport {
    pub alpha: f64,
    pub x_zero: f64,
    pub omega_zero: f64,
    /// `|Z(x_zero, omega_zero)|`.
    pub residual: f64,
    /// Smallest `|Z|` on the scan grid outside the excluded neighbourhood.
    pub min_modulus_off_zero: f64,
    /// Largest `|Z|` on the scan grid, to put the minimum in scale.
    pub max_modulus: f64,
    pub grid_resolution: usize,
}

/// Finds `x~` in `[0, 1)` with `Z_1 g(x~, 1/2) = 0` by bisection on the real
/// function `sum_k (-1)^k g(x - k)`, then scans an `n x n` grid of `[0, 1)^2`.
pub fn locate_zero_on_half_line(e: &ZakEvaluator, grid: usize) -> Result<ZeroReport> {
    if e.alpha != 1.0 {
        return Err(Error::OutOfRange(format!(
            "the half-line zero search needs alpha = 1, got {}",
            e.alpha
        )));
    }
    if !e.window.is_compact() {
        return Err(Error::UnboundedSupport);
    }
    let x_zero = bisect_half_line(|x| e.zak_half(x))?;
    let residual = e.zak_half(x_zero).abs();
    let (min_off, max_mod) = off_zero_scan(e, x_zero, grid);
    Ok(ZeroReport {
        alpha: 1.0,
        x_zero,
        omega_zero: 0.5,
        residual,
        min_modulus_off_zero: min_off,
        max_modulus: max_mod,
        grid_resolution: grid,
    })
}

fn bisect_half_line(h: impl Fn(f64) -> f64) -> Result<f64> {
    let n = BRACKET_INTERVALS;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let hs: Vec<f64> = xs.iter().map(|&x| h(x)).collect();
    let scale = hs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::NoBracket);
    }
    if let Some(i) = (0..n).find(|&i| hs[i].abs() <= 1e-14 * scale) {
        return Ok(xs[i]);
    }
    let i = (0..n)
        .find(|&i| (hs[i] > 0.0) != (hs[i + 1] > 0.0))
        .ok_or(Error::NoBracket)?;
    let (mut a, mut b) = (xs[i], xs[i + 1]);
    let mut ha = hs[i];
    while b - a > BISECTION_TOL {
        let mid = 0.5 * (a + b);
        let hm = h(mid);
        if hm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (hm > 0.0) == (ha > 0.0) {
            a = mid;
            ha = hm;
        } else {
            b = mid;
        }
    }
    let x = 0.5 * (a + b);
    Ok(if x >= 1.0 - BISECTION_TOL { 0.0 } else { x })
}

fn periodic_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// Minimum and maximum of `|Z|` over nodes `(i alpha / n, j / (alpha n))`,
/// skipping nodes within [`EXCLUSION_CELLS`] cells of `(x_zero, 1/(2 alpha))`.
fn off_zero_scan(e: &ZakEvaluator, x_zero: f64, n: usize) -> (f64, f64) {
    let alpha = e.alpha;
    let omega_zero = 0.5 / alpha;
    let radius = EXCLUSION_CELLS as f64 + 1e-9;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = alpha * i as f64 / n as f64;
            let near_x = periodic_distance(x, x_zero, alpha) * n as f64 / alpha <= radius;
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for j in 0..n {
                let omega = j as f64 / (alpha * n as f64);
                let m = e.zak(x, omega).norm();
                hi = hi.max(m);
                let near_w = periodic_distance(omega, omega_zero, 1.0 / alpha) * (alpha * n as f64)
                    <= radius;
                if !(near_x && near_w) {
                    lo = lo.min(m);
                }
            }
            (lo, hi)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)))
}

/// Grid cells of the fundamental domain whose boundary winding number is
/// nonzero, i.e. cells containing zeros of the Zak transform.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroCellScan {
    pub grid: usize,
    /// `(i, j, winding)` for cells `[x_i, x_{i+1}] x [w_j, w_{j+1}]` with
    /// `x_i = (i + 1/2) alpha / n` and `w_j = (j + 1/2) / (alpha n)`.
    pub cells: Vec<(usize, usize, i32)>,
    pub alpha: f64,
}

impl ZeroCellScan {
    /// Centre of cell `(i, j)`, reduced to the fundamental domain.
    pub fn cell_centre(&self, i: usize, j: usize) -> (f64, f64) {
        let n = self.grid as f64;
        let x = ((i + 1) as f64 / n * self.alpha).rem_euclid(self.alpha);
        let w = ((j + 1) as f64 / (n * self.alpha)).rem_euclid(1.0 / self.alpha);
        (x, w)
    }

    /// Whether the cell's `w`-range contains `1 / (2 alpha)`.
    pub fn straddles_half(&self, j: usize) -> bool {
        let n = self.grid as f64;
        let lo = (j as f64 + 0.5) / n;
        let hi = (j as f64 + 1.5) / n;
        lo < 0.5 && 0.5 < hi
    }
}

/// Counts zeros on an `n x n` cell grid by the winding number of `Z` around
/// each cell. Nodes are offset by half a cell so that zeros at rational
/// grid points fall inside cells rather than on their edges.
pub fn scan_zero_cells(e: &ZakEvaluator, n: usize) -> ZeroCellScan {
    let alpha = e.alpha;
    let node = |i: usize, j: usize| {
        let x = (i as f64 + 0.5) * alpha / n as f64;
        let w = (j as f64 + 0.5) / (alpha * n as f64);
        e.zak(x, w)
    };
    let values: Vec<Vec<Complex64>> = (0..=n)
        .into_par_iter()
        .map(|i| (0..=n).map(|j| node(i, j)).collect())
        .collect();
    let step = |a: Complex64, b: Complex64| (b / a).arg();
    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [
                values[i][j],
                values[i + 1][j],
                values[i + 1][j + 1],
                values[i][j + 1],
            ];
            if corners.iter().any(|z| z.norm() == 0.0) {
                cells.push((i, j, i32::MAX));
                continue;
            }
            let total: f64 = (0..4).map(|k| step(corners[k], corners[(k + 1) % 4])).sum();
            let winding = (total / (2.0 * PI)).round() as i32;
            if winding != 0 {
                cells.push((i, j, winding));
            }
        }
    }
    ZeroCellScan {
        grid: n,
        cells,
        alpha,
    }
}

/// `prod_nu alpha a_nu / (1 - e^{-(alpha a_nu + 2 pi i alpha w)})`; with
/// `Lambda = -alpha a` this satisfies
/// `alpha Z_alpha g(x, w) = C * factor * Z_1 B_Lambda(x / alpha, alpha w)`.
pub fn factorization_factor(alpha: f64, pole_rates: &[f64], omega: f64) -> Result<Complex64> {
    if let Some(bad) = pole_rates.iter().find(|a| **a == 0.0 || !a.is_finite()) {
        return Err(Error::InvalidRates(format!(
            "pole rates must be finite and nonzero, got {bad}"
        )));
    }
    let turns = (alpha * omega).rem_euclid(1.0);
    Ok(pole_rates
        .iter()
        .map(|&a| {
            let denom = Complex64::new(1.0, 0.0)
                - Complex64::from_polar((-alpha * a).exp(), -2.0 * PI * turns);
            Complex64::new(alpha * a, 0.0) / denom
        })
        .product())
}

/// The EB-spline `B_Lambda` with `Lambda = -alpha a` attached to a window of
/// finite type.
pub fn associated_spline_rates(window: &TPFiniteWindow, alpha: f64) -> Vec<f64> {
    window.pole_rates.iter().map(|a| -alpha * a).collect()
}

/// Largest deviation of `alpha Z_alpha g - C t Z_1 B_Lambda(x/alpha, alpha w)`
/// over an `n x n` grid of the fundamental cell `[0, alpha) x [0, 1/alpha)`.
pub fn factorization_residual(window: &TPFiniteWindow, alpha: f64, n: usize) -> Result<f64> {
    let direct = ZakEvaluator::new(window.clone(), alpha)?;
    let spline = build_eb_spline(&associated_spline_rates(window, alpha))?;
    let reduced = ZakEvaluator::new(spline, 1.0)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        let x = alpha * i as f64 / n as f64;
        for j in 0..n {
            let omega = j as f64 / (alpha * n as f64);
            let lhs = direct.zak(x, omega) * alpha;
            let t = factorization_factor(alpha, &window.pole_rates, omega)?;
            let rhs = t * window.normalization * reduced.zak(x / alpha, alpha * omega);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

/// Zero of `Z_alpha g` for a window of finite type, obtained from the zero
/// `x~_B` of the associated EB-spline: it sits at `(alpha x~_B, 1/(2 alpha))`.
pub fn locate_zero_tp(window: &TPFiniteWindow, alpha: f64, grid: usize) -> Result<ZeroReport> {
    if window.order() < 2 {
        return Err(Error::OutOfRange(
            "windows of finite type 1 are discontinuous and have no Zak zero".into(),
        ));
    }
    let spline = build_eb_spline(&associated_spline_rates(window, alpha))?;
    let reduced = ZakEvaluator::new(spline, 1.0)?;
    let x_b = bisect_half_line(|x| reduced.zak_half(x))?;
    let direct = ZakEvaluator::new(window.clone(), alpha)?;
    let x_zero = alpha * x_b;
    let residual = direct.zak(x_zero, 0.5 / alpha).norm();
    let (min_off, max_mod) = off_zero_scan(&direct, x_zero, grid);
    Ok(ZeroReport {
        alpha,
        x_zero,
        omega_zero: 0.5 / alpha,
        residual,
        min_modulus_off_zero: min_off,
        max_modulus: max_mod,
        grid_resolution: grid,
    })
}
