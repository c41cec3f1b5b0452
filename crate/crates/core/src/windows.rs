//! Window families: exponential B-splines and totally positive functions of
//! finite type.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exppoly::{ExpPolySegment, ExpPolyTerm, PiecewiseExpPoly, RATE_MERGE_TOL};
use crate::linalg::{self, DenseMatrix};

/// Samples per unit interval used by the shape invariant checks.
pub const CHECK_SAMPLES_PER_UNIT: usize = 1024;

/// The exponential B-spline `B_Lambda = e^{l_1 .}chi_[0,1) * ... * e^{l_m .}chi_[0,1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EBSplineWindow {
    pub rates: Vec<f64>,
    pub order: usize,
    pub shape: PiecewiseExpPoly,
}

pub fn build_eb_spline(rates: &[f64]) -> Result<EBSplineWindow> {
    let (&first, rest) = rates
        .split_first()
        .ok_or_else(|| Error::InvalidRates("at least one rate is required".into()))?;
    if let Some(bad) = rates.iter().find(|r| !r.is_finite()) {
        return Err(Error::InvalidRates(format!("rate {bad} is not finite")));
    }
    let mut shape = PiecewiseExpPoly::exp_box(first);
    for &lambda in rest {
        shape = shape.convolve_exp_box(lambda)?;
    }
    Ok(EBSplineWindow {
        rates: rates.to_vec(),
        order: rates.len(),
        shape,
    })
}

/// Minimum sampled value and maximum breakpoint jump of a spline shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShapeCheck {
    pub min_value: f64,
    pub max_jump: f64,
}

impl EBSplineWindow {
    pub fn evaluate(&self, x: f64) -> f64 {
        self.shape.evaluate(x)
    }

    pub fn fourier(&self, omega: f64) -> Complex64 {
        eb_spline_fourier(self, omega)
    }

    /// Nonnegativity and continuity diagnostics on a dense grid of `[0, m]`.
    pub fn shape_check(&self) -> ShapeCheck {
        let n = CHECK_SAMPLES_PER_UNIT * self.order;
        let m = self.order as f64;
        let min_value = (0..=n)
            .map(|i| self.evaluate(m * i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min);
        let knots = self.shape.breakpoints();
        let max_jump = knots[1..knots.len() - 1]
            .iter()
            .map(|&t| (self.shape.evaluate(t) - self.shape.evaluate_left(t)).abs())
            .fold(0.0, f64::max);
        ShapeCheck {
            min_value,
            max_jump,
        }
    }
}

/// `prod_j (e^{l_j - 2 pi i w} - 1) / (l_j - 2 pi i w)`.
pub fn eb_spline_fourier(w: &EBSplineWindow, omega: f64) -> Complex64 {
    w.rates
        .iter()
        .map(|&lambda| {
            let z = Complex64::new(lambda, -2.0 * PI * omega);
            if z.norm() < 1e-6 {
                Complex64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
            } else {
                (z.exp() - 1.0) / z
            }
        })
        .product()
}

/// Closed form of `B_Lambda` for pairwise distinct rates: on `[k-1, k)`,
/// `B(x + k - 1) = sum_j alpha_j^(k) e^{l_j x}` with
/// `alpha_j^(k) = (-1)^(k-1) e_{k-1}({e^{l_r}}_{r != j}) / prod_{r != j}(l_j - l_r)`,
/// where `e_n` is the elementary symmetric polynomial.
pub fn christensen_massopust(rates: &[f64], x: f64) -> Result<f64> {
    let mut l = rates.to_vec();
    l.sort_by(f64::total_cmp);
    let m = l.len();
    if m < 2 {
        return Err(Error::InvalidRates(
            "the closed form needs at least two rates".into(),
        ));
    }
    if l.windows(2).any(|w| w[1] - w[0] <= RATE_MERGE_TOL) {
        return Err(Error::InvalidRates(
            "the closed form needs distinct rates".into(),
        ));
    }
    if !(0.0..m as f64).contains(&x) {
        return Ok(0.0);
    }
    let k = x.floor() as usize + 1;
    let u = x - (k - 1) as f64;
    let mut total = 0.0;
    for j in 0..m {
        let others: Vec<f64> = (0..m).filter(|&r| r != j).map(|r| l[r]).collect();
        let denom: f64 = others.iter().map(|lr| l[j] - lr).product();
        let exps: Vec<f64> = others.iter().map(|lr| lr.exp()).collect();
        let e = elementary_symmetric(&exps, k - 1);
        let sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * e / denom * (l[j] * u).exp();
    }
    Ok(total)
}

fn elementary_symmetric(v: &[f64], n: usize) -> f64 {
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for &x in v {
        for k in (1..=n).rev() {
            e[k] += e[k - 1] * x;
        }
    }
    e[n]
}

/// A totally positive function of finite type,
/// `g^(w) = C prod_nu (1 + 2 pi i w / a_nu)^{-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TPFiniteWindow {
    pub pole_rates: Vec<f64>,
    pub normalization: f64,
    /// Two segments, `(-inf, 0)` and `[0, inf)`.
    pub eval_form: PiecewiseExpPoly,
    /// `|g(x)| <= envelope_constant * exp(-decay |x|)`.
    pub envelope_constant: f64,
    pub decay: f64,
}

pub fn build_tp_window(pole_rates: &[f64], c: f64) -> Result<TPFiniteWindow> {
    if pole_rates.is_empty() {
        return Err(Error::InvalidRates(
            "at least one pole rate is required".into(),
        ));
    }
    if let Some(bad) = pole_rates.iter().find(|a| **a == 0.0 || !a.is_finite()) {
        return Err(Error::InvalidRates(format!(
            "pole rates must be finite and nonzero, got {bad}"
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidRates(format!(
            "normalization {c} must be positive"
        )));
    }

    // group equal rates: (b, multiplicity)
    let mut sorted = pole_rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for a in sorted {
        match groups.last_mut() {
            Some((b, mult)) if (a - *b).abs() <= RATE_MERGE_TOL => *mult += 1,
            _ => groups.push((a, 1)),
        }
    }
    let k: f64 = pole_rates.iter().product();

    let mut left_terms = Vec::new();
    let mut right_terms = Vec::new();
    let min_rate = groups
        .iter()
        .map(|(b, _)| b.abs())
        .fold(f64::INFINITY, f64::min);
    let slowest_has_poly = groups
        .iter()
        .any(|(b, mult)| *mult > 1 && (b.abs() - min_rate).abs() <= RATE_MERGE_TOL);
    let decay = if slowest_has_poly {
        0.9 * min_rate
    } else {
        min_rate
    };
    let mut envelope_constant = 0.0;

    for (j, &(b, mult)) in groups.iter().enumerate() {
        // Taylor coefficients of h_j(s_0 + t) = K prod_{i != j} (d_i + t)^{-m_i}
        let mut series = vec![0.0; mult];
        series[0] = k;
        for (i, &(bi, mi)) in groups.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = bi - b;
            let factor = inverse_power_series(d, mi, mult);
            series = truncated_product(&series, &factor);
        }
        for r in 1..=mult {
            let amp = c * series[mult - r] / factorial(r - 1);
            let mut coeffs = vec![0.0; r];
            coeffs[r - 1] = if b > 0.0 { amp } else { -amp };
            let term = ExpPolyTerm::new(-b, coeffs);
            if b > 0.0 {
                right_terms.extend(term);
            } else {
                left_terms.extend(term);
            }
            let n = (r - 1) as f64;
            let eps = b.abs() - decay;
            let poly_peak = if r == 1 {
                1.0
            } else {
                (n / (std::f64::consts::E * eps)).powf(n)
            };
            envelope_constant += amp.abs() * poly_peak;
        }
    }
    let eval_form = PiecewiseExpPoly::from_segments(vec![
        ExpPolySegment::new(f64::NEG_INFINITY, 0.0, left_terms),
        ExpPolySegment::new(0.0, f64::INFINITY, right_terms),
    ])?;
    Ok(TPFiniteWindow {
        pole_rates: pole_rates.to_vec(),
        normalization: c,
        eval_form,
        envelope_constant,
        decay,
    })
}

/// Coefficients of `(d + t)^{-m}` up to `t^{len - 1}`.
fn inverse_power_series(d: f64, m: usize, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut binom = 1.0;
    for n in 0..len {
        if n > 0 {
            binom *= (m + n - 1) as f64 / n as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * binom * d.powi(-((m + n) as i32)));
    }
    out
}

fn truncated_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|k| {
            (0..=k)
                .map(|i| a[i] * b.get(k - i).copied().unwrap_or(0.0))
                .sum()
        })
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl TPFiniteWindow {
    pub fn evaluate(&self, x: f64) -> f64 {
        self.eval_form.evaluate(x)
    }

    pub fn order(&self) -> usize {
        self.pole_rates.len()
    }

    pub fn fourier(&self, omega: f64) -> Complex64 {
        self.pole_rates
            .iter()
            .map(|&a| Complex64::new(1.0, 2.0 * PI * omega / a).inv())
            .product::<Complex64>()
            * self.normalization
    }

    /// Numbers of positive and negative pole rates.
    pub fn sign_counts(&self) -> (usize, usize) {
        let pos = self.pole_rates.iter().filter(|a| **a > 0.0).count();
        (pos, self.pole_rates.len() - pos)
    }

    /// The window `x -> g(s x)`, which is again of finite type with poles
    /// `s a_nu` and normalization `C / s`.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        let poles: Vec<f64> = self.pole_rates.iter().map(|a| s * a).collect();
        build_tp_window(&poles, self.normalization / s)
    }
}

/// Result of a Schoenberg–Whitney test on given nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SchoenbergWhitney {
    pub determinant: f64,
    pub condition_holds: bool,
}

/// Computes `det(g(x_j - y_k))` and the interlacing condition
/// `x_{j - m1} < y_j < x_{j + m2}`.
pub fn schoenberg_whitney_check(
    w: &TPFiniteWindow,
    xs: &[f64],
    ys: &[f64],
) -> Result<SchoenbergWhitney> {
    let n = xs.len();
    if ys.len() != n || n == 0 {
        return Err(Error::Dimension(format!(
            "{} x-nodes and {} y-nodes",
            xs.len(),
            ys.len()
        )));
    }
    let increasing = |v: &[f64]| v.windows(2).all(|p| p[0] < p[1]);
    if !increasing(xs) || !increasing(ys) {
        return Err(Error::OutOfRange(
            "nodes must be strictly increasing".into(),
        ));
    }
    let a = DenseMatrix::from_fn(n, n, |j, k| w.evaluate(xs[j] - ys[k]));
    let determinant = linalg::det(&a)?;
    let (m1, m2) = w.sign_counts();
    let condition_holds = (0..n).all(|j| {
        let lower = if j >= m1 {
            xs[j - m1]
        } else {
            f64::NEG_INFINITY
        };
        let upper = if j + m2 < n {
            xs[j + m2]
        } else {
            f64::INFINITY
        };
        lower < ys[j] && ys[j] < upper
    });
    Ok(SchoenbergWhitney {
        determinant,
        condition_holds,
    })
}

/// A window with enough structure for Zak transforms and Gramians.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Window {
    EbSpline(EBSplineWindow),
    Tp(TPFiniteWindow),
    Compact(PiecewiseExpPoly),
}

impl Window {
    pub fn shape(&self) -> &PiecewiseExpPoly {
        match self {
            Self::EbSpline(w) => &w.shape,
            Self::Tp(w) => &w.eval_form,
            Self::Compact(f) => f,
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.shape().evaluate(x)
    }

    pub fn is_compact(&self) -> bool {
        self.shape().is_compact()
    }

    pub fn support(&self) -> (f64, f64) {
        self.shape().support()
    }

    /// `(C', delta)` for windows with unbounded support.
    pub fn envelope(&self) -> Option<(f64, f64)> {
        match self {
            Self::Tp(w) => Some((w.envelope_constant, w.decay)),
            _ => None,
        }
    }

    /// `x -> g(s x)`.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        match self {
            Self::Tp(w) => Ok(Self::Tp(w.dilated(s)?)),
            _ => Ok(Self::Compact(self.shape().dilate(s)?)),
        }
    }
}

impl From<EBSplineWindow> for Window {
    fn from(w: EBSplineWindow) -> Self {
        Self::EbSpline(w)
    }
}

impl From<TPFiniteWindow> for Window {
    fn from(w: TPFiniteWindow) -> Self {
        Self::Tp(w)
    }
}
