//! Piecewise exponential polynomials.
//!
//! A [`PiecewiseExpPoly`] is a function that on each segment `[a, b)` equals
//! `sum_j p_j(x - o) e^{xi_j (x - o)}` for real polynomials `p_j`, where the
//! local origin `o` is the segment's left end (or its right end when the
//! segment is unbounded on the left). Outside the support the function is 0.
//!
//! Everything needed for exponential B-splines is exact in this form:
//! convolution with `e^{lambda x} chi_[0,1)`, differentiation, integration,
//! translation, dilation and linear combination.

use serde::Serialize;

use crate::error::{Error, Result};

/// Rates closer than this are merged into a single polynomial-weighted term.
pub const RATE_MERGE_TOL: f64 = 1e-12;

/// Breakpoints closer than this are identified.
pub const KNOT_TOL: f64 = 1e-12;

/// One term `p(u) e^{rate u}`, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpPolyTerm {
    pub rate: f64,
    pub coeffs: Vec<f64>,
}

impl ExpPolyTerm {
    /// Trims trailing zero coefficients; returns `None` for the zero polynomial.
    pub fn new(rate: f64, mut coeffs: Vec<f64>) -> Option<Self> {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            None
        } else {
            Some(Self { rate, coeffs })
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, u: f64) -> f64 {
        poly_eval(&self.coeffs, u) * (self.rate * u).exp()
    }

    fn derivative(&self) -> Option<Self> {
        let mut c: Vec<f64> = self.coeffs.iter().map(|a| self.rate * a).collect();
        for (k, a) in self.coeffs.iter().enumerate().skip(1) {
            c[k - 1] += k as f64 * a;
        }
        Self::new(self.rate, c)
    }

    /// The same function written around an origin moved by `s`:
    /// `p(w + s) e^{rate (w + s)}` as a polynomial in `w`.
    fn shifted(&self, s: f64) -> Option<Self> {
        if s == 0.0 {
            return Some(self.clone());
        }
        let scale = (self.rate * s).exp();
        let c = poly_shift(&self.coeffs, s)
            .into_iter()
            .map(|a| a * scale)
            .collect();
        Self::new(self.rate, c)
    }

    /// `int_0^len p(u) e^{rate u} du`.
    fn integral(&self, len: f64) -> f64 {
        if self.rate.abs() <= RATE_MERGE_TOL {
            poly_eval(&poly_antiderivative(&self.coeffs), len)
        } else {
            let q = exp_antiderivative(&self.coeffs, self.rate);
            poly_eval(&q, len) * (self.rate * len).exp() - q[0]
        }
    }
}

/// Segment `[left, right)` carrying merged terms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpPolySegment {
    pub left: f64,
    pub right: f64,
    pub terms: Vec<ExpPolyTerm>,
}

impl ExpPolySegment {
    pub fn new(left: f64, right: f64, terms: Vec<ExpPolyTerm>) -> Self {
        Self {
            left,
            right,
            terms: merge_terms(terms),
        }
    }

    pub fn origin(&self) -> f64 {
        if self.left.is_finite() {
            self.left
        } else if self.right.is_finite() {
            self.right
        } else {
            0.0
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x < self.right
    }

    /// Value of the segment formula (ignores the segment bounds).
    pub fn eval_formula(&self, x: f64) -> f64 {
        let u = x - self.origin();
        self.terms.iter().map(|t| t.eval(u)).sum()
    }

    /// The terms rewritten around `origin`.
    fn terms_at(&self, origin: f64) -> Vec<ExpPolyTerm> {
        let s = origin - self.origin();
        self.terms.iter().filter_map(|t| t.shifted(s)).collect()
    }
}

/// Piecewise exponential polynomial with contiguous half-open segments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiecewiseExpPoly {
    segments: Vec<ExpPolySegment>,
    support: (f64, f64),
}

impl PiecewiseExpPoly {
    pub fn from_segments(segments: Vec<ExpPolySegment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::OutOfRange("at least one segment is required".into()))?;
        for s in &segments {
            if !(s.left < s.right) {
                return Err(Error::OutOfRange(format!(
                    "segment [{}, {}) is empty",
                    s.left, s.right
                )));
            }
        }
        for w in segments.windows(2) {
            if w[0].right != w[1].left {
                return Err(Error::OutOfRange(format!(
                    "segments [.., {}) and [{}, ..) are not contiguous",
                    w[0].right, w[1].left
                )));
            }
        }
        let support = (first.left, segments[segments.len() - 1].right);
        Ok(Self { segments, support })
    }

    /// `p(x - left) e^{rate (x - left)}` on `[left, right)`.
    pub fn single(left: f64, right: f64, rate: f64, coeffs: Vec<f64>) -> Result<Self> {
        let terms = ExpPolyTerm::new(rate, coeffs).into_iter().collect();
        Self::from_segments(vec![ExpPolySegment::new(left, right, terms)])
    }

    /// `e^{rate x}` on `[0, 1)`.
    pub fn exp_box(rate: f64) -> Self {
        Self::single(0.0, 1.0, rate, vec![1.0]).expect("valid segment")
    }

    pub fn zero() -> Self {
        Self::from_segments(vec![ExpPolySegment::new(0.0, 1.0, Vec::new())]).expect("valid segment")
    }

    pub fn segments(&self) -> &[ExpPolySegment] {
        &self.segments
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn is_compact(&self) -> bool {
        self.support.0.is_finite() && self.support.1.is_finite()
    }

    /// Segment left ends followed by the right end of the support.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.segments.iter().map(|s| s.left).collect();
        b.push(self.support.1);
        b
    }

    fn segment_index(&self, x: f64) -> Option<usize> {
        let i = self.segments.partition_point(|s| s.left <= x);
        if i == 0 {
            return None;
        }
        self.segments[i - 1].contains(x).then_some(i - 1)
    }

    /// Like `segment_index` but tolerant to `x` sitting a hair below a knot.
    fn segment_index_tol(&self, x: f64) -> Option<usize> {
        let i = self.segments.partition_point(|s| s.left <= x + KNOT_TOL);
        if i == 0 {
            return None;
        }
        (x < self.segments[i - 1].right).then_some(i - 1)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match self.segment_index(x) {
            Some(i) => self.segments[i].eval_formula(x),
            None => 0.0,
        }
    }

    /// Limit from the left at `x`.
    pub fn evaluate_left(&self, x: f64) -> f64 {
        let i = self.segments.partition_point(|s| s.left < x);
        if i == 0 || x > self.segments[i - 1].right {
            return 0.0;
        }
        self.segments[i - 1].eval_formula(x)
    }

    /// Largest jump `|f(t+) - f(t-)|` over all breakpoints, including the
    /// ends of the support.
    pub fn max_jump(&self) -> f64 {
        self.breakpoints()
            .into_iter()
            .filter(|t| t.is_finite())
            .map(|t| (self.evaluate(t) - self.evaluate_left(t)).abs())
            .fold(0.0, f64::max)
    }

    /// Terms describing `self` on `[c, c + tiny)`, rewritten around `c`.
    fn terms_near(&self, c: f64) -> Vec<ExpPolyTerm> {
        match self.segment_index_tol(c) {
            Some(i) => self.segments[i].terms_at(c),
            None => Vec::new(),
        }
    }

    /// Rebuilds the function on the segmentation given by `knots`.
    fn resegment(&self, knots: &[f64]) -> Self {
        let segments = knots
            .windows(2)
            .map(|w| {
                let origin = if w[0].is_finite() { w[0] } else { w[1] };
                let terms = match self.segment_index_tol(if w[0].is_finite() {
                    w[0]
                } else {
                    w[1] - 1.0
                }) {
                    Some(i) => self.segments[i].terms_at(origin),
                    None => Vec::new(),
                };
                ExpPolySegment::new(w[0], w[1], terms)
            })
            .collect();
        Self::from_segments(segments).expect("knots are increasing")
    }

    pub fn scale(&self, c: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let terms = s
                    .terms
                    .iter()
                    .filter_map(|t| {
                        ExpPolyTerm::new(t.rate, t.coeffs.iter().map(|a| c * a).collect())
                    })
                    .collect();
                ExpPolySegment::new(s.left, s.right, terms)
            })
            .collect();
        Self::from_segments(segments).expect("same segmentation")
    }

    /// `x -> f(x - s)`.
    pub fn shift(&self, s: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|seg| ExpPolySegment {
                left: seg.left + s,
                right: seg.right + s,
                terms: seg.terms.clone(),
            })
            .collect();
        Self::from_segments(segments).expect("translation keeps segments contiguous")
    }

    /// `x -> f(a x)` for `a > 0`.
    pub fn dilate(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::OutOfRange(format!(
                "dilation factor {a} must be positive"
            )));
        }
        let segments = self
            .segments
            .iter()
            .map(|seg| {
                let terms = seg
                    .terms
                    .iter()
                    .filter_map(|t| {
                        let mut p = 1.0;
                        let c = t
                            .coeffs
                            .iter()
                            .map(|c| {
                                let v = c * p;
                                p *= a;
                                v
                            })
                            .collect();
                        ExpPolyTerm::new(t.rate * a, c)
                    })
                    .collect();
                ExpPolySegment::new(seg.left / a, seg.right / a, terms)
            })
            .collect();
        Self::from_segments(segments)
    }

    /// Pointwise sum on the common refinement of both segmentations.
    pub fn add(&self, other: &Self) -> Self {
        let knots = merge_knots(self.breakpoints().into_iter().chain(other.breakpoints()));
        let a = self.resegment(&knots);
        let b = other.resegment(&knots);
        let segments = a
            .segments
            .into_iter()
            .zip(b.segments)
            .map(|(s, t)| {
                let mut terms = s.terms;
                terms.extend(t.terms);
                ExpPolySegment::new(s.left, s.right, terms)
            })
            .collect();
        Self::from_segments(segments).expect("common refinement")
    }

    /// `sum_k c_k f(x - shift_k)`.
    pub fn linear_combination(parts: &[(f64, &Self, f64)]) -> Self {
        parts
            .iter()
            .map(|(c, f, s)| f.shift(*s).scale(*c))
            .reduce(|acc, g| acc.add(&g))
            .unwrap_or_else(Self::zero)
    }

    pub fn differentiate(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let terms = s.terms.iter().filter_map(ExpPolyTerm::derivative).collect();
                ExpPolySegment::new(s.left, s.right, terms)
            })
            .collect();
        Self::from_segments(segments).expect("same segmentation")
    }

    /// Exact integral over the support.
    pub fn integral(&self) -> Result<f64> {
        if !self.is_compact() {
            return Err(Error::UnboundedSupport);
        }
        Ok(self
            .segments
            .iter()
            .map(|s| {
                s.terms
                    .iter()
                    .map(|t| t.integral(s.right - s.left))
                    .sum::<f64>()
            })
            .sum())
    }

    /// `f * (e^{lambda .} chi_[0,1))`, computed exactly.
    ///
    /// With `F(x) = e^{lambda x} int_{-inf}^x f(t) e^{-lambda t} dt` the
    /// convolution is `F(x) - e^lambda F(x - 1)`.
    pub fn convolve_exp_box(&self, lambda: f64) -> Result<Self> {
        if !self.is_compact() {
            return Err(Error::UnboundedSupport);
        }
        let mut pieces = Vec::with_capacity(self.segments.len() + 1);
        let mut value_at_left = 0.0;
        for seg in &self.segments {
            let mut terms = Vec::with_capacity(seg.terms.len() + 1);
            let mut carried = value_at_left;
            for t in &seg.terms {
                let mu = t.rate - lambda;
                if mu.abs() <= RATE_MERGE_TOL {
                    terms.extend(ExpPolyTerm::new(lambda, poly_antiderivative(&t.coeffs)));
                } else {
                    let q = exp_antiderivative(&t.coeffs, mu);
                    carried -= q[0];
                    terms.extend(ExpPolyTerm::new(t.rate, q));
                }
            }
            terms.extend(ExpPolyTerm::new(lambda, vec![carried]));
            let piece = ExpPolySegment::new(seg.left, seg.right, terms);
            value_at_left = piece.eval_formula(seg.right);
            pieces.push(piece);
        }
        let end = self.support.1;
        pieces.push(ExpPolySegment::new(
            end,
            f64::INFINITY,
            ExpPolyTerm::new(lambda, vec![value_at_left])
                .into_iter()
                .collect(),
        ));
        let big_f = Self::from_segments(pieces).expect("contiguous antiderivative pieces");

        let base = self.breakpoints();
        let knots = merge_knots(base.iter().copied().chain(base.iter().map(|t| t + 1.0)));
        let e_lambda = lambda.exp();
        let segments = knots
            .windows(2)
            .map(|w| {
                let c = w[0];
                let mut terms = big_f.terms_near(c);
                for t in big_f.terms_near(c - 1.0) {
                    // rewrite around c - 1 then relabel the origin as c
                    let coeffs = t.coeffs.iter().map(|a| -e_lambda * a).collect();
                    terms.extend(ExpPolyTerm::new(t.rate, coeffs));
                }
                ExpPolySegment::new(w[0], w[1], terms)
            })
            .collect();
        Self::from_segments(segments)
    }
}

/// Sorted knot list with near-duplicates removed.
fn merge_knots(iter: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = iter.collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for t in v {
        match out.last() {
            Some(&last) if (t - last).abs() <= KNOT_TOL || t == last => {}
            _ => out.push(t),
        }
    }
    out
}

/// Sorts terms by rate and merges rates within [`RATE_MERGE_TOL`].
fn merge_terms(mut terms: Vec<ExpPolyTerm>) -> Vec<ExpPolyTerm> {
    terms.sort_by(|a, b| a.rate.total_cmp(&b.rate));
    let mut out: Vec<ExpPolyTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if (t.rate - last.rate).abs() <= RATE_MERGE_TOL => {
                if last.coeffs.len() < t.coeffs.len() {
                    last.coeffs.resize(t.coeffs.len(), 0.0);
                }
                for (a, b) in last.coeffs.iter_mut().zip(&t.coeffs) {
                    *a += b;
                }
            }
            _ => out.push(t),
        }
    }
    out.into_iter()
        .filter_map(|t| ExpPolyTerm::new(t.rate, t.coeffs))
        .collect()
}

pub(crate) fn poly_eval(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * u + a)
}

/// Coefficients of `p(w + s)`.
fn poly_shift(c: &[f64], s: f64) -> Vec<f64> {
    let mut r = c.to_vec();
    let n = r.len();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            r[j] += s * r[j + 1];
        }
    }
    r
}

/// Antiderivative vanishing at 0.
fn poly_antiderivative(c: &[f64]) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(c.iter().enumerate().map(|(k, a)| a / (k + 1) as f64))
        .collect()
}

/// `Q` with `(Q(u) e^{mu u})' = p(u) e^{mu u}`, i.e.
/// `Q = sum_k (-1)^k p^{(k)} / mu^{k+1}`.
fn exp_antiderivative(p: &[f64], mu: f64) -> Vec<f64> {
    let mut q = vec![0.0; p.len()];
    let mut d = p.to_vec();
    let mut factor = 1.0 / mu;
    while !d.is_empty() {
        for (qi, di) in q.iter_mut().zip(&d) {
            *qi += factor * di;
        }
        d = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| k as f64 * a)
            .collect();
        factor = -factor / mu;
    }
    q
}

/// Number of strict sign alternations after deleting zeros.
pub fn strong_sign_changes_seq(c: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in c {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Sign changes of `g` sampled at `n` uniform points of `[a, b]`; samples
/// below `1e-12 * max |g|` count as zeros.
pub fn strong_sign_changes_sampled(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> usize {
    let n = n.max(2);
    let samples: Vec<f64> = (0..n)
        .map(|i| g(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect();
    let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cleaned: Vec<f64> = samples
        .into_iter()
        .map(|v| if v.abs() <= 1e-12 * scale { 0.0 } else { v })
        .collect();
    strong_sign_changes_seq(&cleaned)
}

pub fn strong_sign_changes_fn(f: &PiecewiseExpPoly, a: f64, b: f64, n: usize) -> usize {
    strong_sign_changes_sampled(|x| f.evaluate(x), a, b, n)
}
