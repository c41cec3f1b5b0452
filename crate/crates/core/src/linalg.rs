//! Small dense linear algebra: LU solves, determinants, the Golub–Kahan–Reinsch
//! SVD, Moore–Penrose pseudo-inverses and Hermitian eigenvalues.
//!
//! Everything here works on matrices of at most a few hundred rows and is
//! written for reproducibility rather than speed.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Row-major dense real matrix.
#[derive(Clone, PartialEq, Serialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Row-vector product `x^T A`.
    pub fn vec_mul(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} rows",
                x.len(),
                self.rows
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch in subtraction".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let c0 = cols.start;
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows.start + i, c0 + j)]
        })
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Row-major dense complex matrix, used for the pre-Gramian symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
    sign: f64,
    singular_at: Option<usize>,
}

impl Lu {
    /// Pivots below `1e-13 * ||A||_inf` mark the matrix as singular.
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Dimension("LU of a non-square matrix".into()));
        }
        let n = a.rows;
        let threshold = 1e-13 * a.norm_inf();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular_at = None;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            if pivot <= threshold || pivot == 0.0 {
                singular_at.get_or_insert(k);
                continue;
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= f * v;
                    }
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            sign,
            singular_at,
        })
    }

    pub fn det(&self) -> f64 {
        let n = self.lu.rows;
        (0..n).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows;
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "rhs of length {} for n = {n}",
                b.len()
            )));
        }
        if let Some(pivot) = self.singular_at {
            return Err(Error::Singular { pivot });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// Solves `A x = b` by partially pivoted elimination.
pub fn solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    Lu::new(a)?.solve(b)
}

/// Determinant via LU. Exactly singular matrices give 0.
pub fn det(a: &DenseMatrix) -> Result<f64> {
    if a.rows != a.cols {
        return Err(Error::Dimension(
            "determinant of a non-square matrix".into(),
        ));
    }
    if a.rows == 0 {
        return Ok(1.0);
    }
    Ok(Lu::new(a)?.det())
}

/// Thin singular value decomposition `A = U diag(sigma) V^T` with `sigma`
/// descending. `U` is `rows x k`, `V` is `cols x k`, `k = min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl Svd {
    /// Number of singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cutoff = rel_tol * self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let (m, n, k) = (self.u.rows, self.v.rows, self.sigma.len());
        DenseMatrix::from_fn(m, n, |i, j| {
            (0..k)
                .map(|l| self.u[(i, l)] * self.sigma[l] * self.v[(j, l)])
                .sum()
        })
    }
}

pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    if a.rows == 0 || a.cols == 0 {
        return Ok(Svd {
            u: DenseMatrix::zeros(a.rows, 0),
            sigma: Vec::new(),
            v: DenseMatrix::zeros(a.cols, 0),
        });
    }
    if a.rows >= a.cols {
        golub_kahan(a)
    } else {
        let t = golub_kahan(&a.transpose())?;
        Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.sigma)
}

/// Spectral norm.
pub fn norm2(a: &DenseMatrix) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Relative singular value cutoff used by [`pinv`].
pub const PINV_CUTOFF: f64 = 1e-12;

/// Moore–Penrose pseudo-inverse; singular values below
/// `PINV_CUTOFF * sigma_max` are treated as zero.
pub fn pinv(a: &DenseMatrix) -> Result<DenseMatrix> {
    let d = svd(a)?;
    let cutoff = PINV_CUTOFF * d.sigma.first().copied().unwrap_or(0.0);
    let k = d.sigma.len();
    Ok(DenseMatrix::from_fn(a.cols, a.rows, |i, j| {
        (0..k)
            .filter(|&l| d.sigma[l] > cutoff)
            .map(|l| d.v[(i, l)] * d.u[(j, l)] / d.sigma[l])
            .sum()
    }))
}

/// Householder bidiagonalization followed by implicitly shifted QR on the
/// bidiagonal, for `rows >= cols`.
fn golub_kahan(a_in: &DenseMatrix) -> Result<Svd> {
    let m = a_in.rows;
    let n = a_in.cols;
    debug_assert!(m >= n);
    let nu = n;
    let mut a = a_in.clone();
    let mut s = vec![0.0f64; n.min(m + 1)];
    let mut u = DenseMatrix::zeros(m, nu);
    let mut v = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0f64; n];
    let mut work = vec![0.0; m];

    let nct = (m - 1).min(n);
    let nrt = n.saturating_sub(2).min(m);
    for k in 0..nct.max(nrt) {
        if k < nct {
            s[k] = 0.0;
            for i in k..m {
                s[k] = s[k].hypot(a[(i, k)]);
            }
            if s[k] != 0.0 {
                if a[(k, k)] < 0.0 {
                    s[k] = -s[k];
                }
                for i in k..m {
                    a[(i, k)] /= s[k];
                }
                a[(k, k)] += 1.0;
            }
            s[k] = -s[k];
        }
        for j in k + 1..n {
            if k < nct && s[k] != 0.0 {
                let mut t = 0.0;
                for i in k..m {
                    t += a[(i, k)] * a[(i, j)];
                }
                t = -t / a[(k, k)];
                for i in k..m {
                    let aik = a[(i, k)];
                    a[(i, j)] += t * aik;
                }
            }
            e[j] = a[(k, j)];
        }
        if k < nct {
            for i in k..m {
                u[(i, k)] = a[(i, k)];
            }
        }
        if k < nrt {
            e[k] = 0.0;
            for i in k + 1..n {
                e[k] = e[k].hypot(e[i]);
            }
            if e[k] != 0.0 {
                if e[k + 1] < 0.0 {
                    e[k] = -e[k];
                }
                let ek = e[k];
                for ei in e.iter_mut().take(n).skip(k + 1) {
                    *ei /= ek;
                }
                e[k + 1] += 1.0;
            }
            e[k] = -e[k];
            if k + 1 < m && e[k] != 0.0 {
                for w in work.iter_mut().skip(k + 1) {
                    *w = 0.0;
                }
                for j in k + 1..n {
                    for i in k + 1..m {
                        work[i] += e[j] * a[(i, j)];
                    }
                }
                for j in k + 1..n {
                    let t = -e[j] / e[k + 1];
                    for i in k + 1..m {
                        a[(i, j)] += t * work[i];
                    }
                }
            }
            for i in k + 1..n {
                v[(i, k)] = e[i];
            }
        }
    }

    let mut p = n.min(m + 1);
    if nct < n {
        s[nct] = a[(nct, nct)];
    }
    if m < p {
        s[p - 1] = 0.0;
    }
    if nrt + 1 < p {
        e[nrt] = a[(nrt, p - 1)];
    }
    e[p - 1] = 0.0;

    for j in nct..nu {
        for i in 0..m {
            u[(i, j)] = 0.0;
        }
        u[(j, j)] = 1.0;
    }
    for k in (0..nct).rev() {
        if s[k] != 0.0 {
            for j in k + 1..nu {
                let mut t = 0.0;
                for i in k..m {
                    t += u[(i, k)] * u[(i, j)];
                }
                t = -t / u[(k, k)];
                for i in k..m {
                    let uik = u[(i, k)];
                    u[(i, j)] += t * uik;
                }
            }
            for i in k..m {
                u[(i, k)] = -u[(i, k)];
            }
            u[(k, k)] += 1.0;
            for i in 0..k.saturating_sub(1) {
                u[(i, k)] = 0.0;
            }
        } else {
            for i in 0..m {
                u[(i, k)] = 0.0;
            }
            u[(k, k)] = 1.0;
        }
    }

    for k in (0..n).rev() {
        if k < nrt && e[k] != 0.0 {
            for j in k + 1..nu {
                let mut t = 0.0;
                for i in k + 1..n {
                    t += v[(i, k)] * v[(i, j)];
                }
                t = -t / v[(k + 1, k)];
                for i in k + 1..n {
                    let vik = v[(i, k)];
                    v[(i, j)] += t * vik;
                }
            }
        }
        for i in 0..n {
            v[(i, k)] = 0.0;
        }
        v[(k, k)] = 1.0;
    }

    let pp = p - 1;
    let eps = f64::EPSILON;
    let tiny = 2f64.powi(-966);
    let max_iter = 75 * n.max(10);
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    while p > 0 {
        // k is the largest index below p-1 with a negligible superdiagonal;
        // None plays the role of -1.
        let mut k: isize = p as isize - 2;
        while k >= 0 {
            let ku = k as usize;
            if e[ku].abs() <= tiny + eps * (s[ku].abs() + s[ku + 1].abs()) {
                e[ku] = 0.0;
                break;
            }
            k -= 1;
        }
        let kase;
        if k == p as isize - 2 {
            kase = 4;
        } else {
            let mut ks: isize = p as isize - 1;
            while ks > k {
                let ksu = ks as usize;
                let t = (if ks != p as isize { e[ksu].abs() } else { 0.0 })
                    + (if ks != k + 1 { e[ksu - 1].abs() } else { 0.0 });
                if s[ksu].abs() <= tiny + eps * t {
                    s[ksu] = 0.0;
                    break;
                }
                ks -= 1;
            }
            if ks == k {
                kase = 3;
            } else if ks == p as isize - 1 {
                kase = 1;
            } else {
                kase = 2;
                k = ks;
            }
        }
        let k = (k + 1) as usize;

        match kase {
            1 => {
                let mut f = e[p - 2];
                e[p - 2] = 0.0;
                for j in (k..=p - 2).rev() {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] *= cs;
                    }
                    for i in 0..n {
                        let t = cs * v[(i, j)] + sn * v[(i, p - 1)];
                        v[(i, p - 1)] = -sn * v[(i, j)] + cs * v[(i, p - 1)];
                        v[(i, j)] = t;
                    }
                }
            }
            2 => {
                let mut f = e[k - 1];
                e[k - 1] = 0.0;
                for j in k..p {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    f = -sn * e[j];
                    e[j] *= cs;
                    for i in 0..m {
                        let t = cs * u[(i, j)] + sn * u[(i, k - 1)];
                        u[(i, k - 1)] = -sn * u[(i, j)] + cs * u[(i, k - 1)];
                        u[(i, j)] = t;
                    }
                }
            }
            3 => {
                let scale = s[p - 1]
                    .abs()
                    .max(s[p - 2].abs())
                    .max(e[p - 2].abs())
                    .max(s[k].abs())
                    .max(e[k].abs());
                let sp = s[p - 1] / scale;
                let spm1 = s[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = s[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = 0.0;
                if b != 0.0 || c != 0.0 {
                    shift = (b * b + c).sqrt();
                    if b < 0.0 {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;
                for j in k..p - 1 {
                    let mut t = f.hypot(g);
                    let mut cs = f / t;
                    let mut sn = g / t;
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * s[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * s[j];
                    g = sn * s[j + 1];
                    s[j + 1] *= cs;
                    for i in 0..n {
                        let t = cs * v[(i, j)] + sn * v[(i, j + 1)];
                        v[(i, j + 1)] = -sn * v[(i, j)] + cs * v[(i, j + 1)];
                        v[(i, j)] = t;
                    }
                    t = f.hypot(g);
                    cs = f / t;
                    sn = g / t;
                    s[j] = t;
                    f = cs * e[j] + sn * s[j + 1];
                    s[j + 1] = -sn * e[j] + cs * s[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] *= cs;
                    if j < m - 1 {
                        for i in 0..m {
                            let t = cs * u[(i, j)] + sn * u[(i, j + 1)];
                            u[(i, j + 1)] = -sn * u[(i, j)] + cs * u[(i, j + 1)];
                            u[(i, j)] = t;
                        }
                    }
                }
                e[p - 2] = f;
                iter += 1;
                total_iter += 1;
                if iter > max_iter {
                    return Err(Error::NoConvergence {
                        iterations: total_iter,
                    });
                }
            }
            _ => {
                let mut k = k;
                if s[k] <= 0.0 {
                    s[k] = if s[k] < 0.0 { -s[k] } else { 0.0 };
                    for i in 0..=pp {
                        v[(i, k)] = -v[(i, k)];
                    }
                }
                while k < pp {
                    if s[k] >= s[k + 1] {
                        break;
                    }
                    s.swap(k, k + 1);
                    if k < n - 1 {
                        for i in 0..n {
                            let t = v[(i, k + 1)];
                            v[(i, k + 1)] = v[(i, k)];
                            v[(i, k)] = t;
                        }
                    }
                    if k < m - 1 {
                        for i in 0..m {
                            let t = u[(i, k + 1)];
                            u[(i, k + 1)] = u[(i, k)];
                            u[(i, k)] = t;
                        }
                    }
                    k += 1;
                }
                iter = 0;
                p -= 1;
            }
        }
    }
    s.truncate(n);
    Ok(Svd { u, sigma: s, v })
}

/// Eigenvalues of a real symmetric matrix in ascending order
/// (Householder tridiagonalization followed by implicit QL).
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    if a.rows != a.cols {
        return Err(Error::Dimension(
            "eigenvalues of a non-square matrix".into(),
        ));
    }
    let n = a.rows;
    let mut w = a.clone();
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n)
            .map(|i| w[(i, k)] * w[(i, k)])
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = w[(k + 1, k)];
        let alpha = if x0 > 0.0 { -norm } else { norm };
        for i in k + 1..n {
            v[i] = w[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut().take(n).skip(k + 1) {
            *vi /= vnorm;
        }
        for i in k + 1..n {
            p[i] = (k + 1..n).map(|j| w[(i, j)] * v[j]).sum();
        }
        let kk: f64 = (k + 1..n).map(|i| v[i] * p[i]).sum();
        for i in k + 1..n {
            p[i] -= kk * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                w[(i, j)] -= 2.0 * (v[i] * p[j] + p[i] * v[j]);
            }
        }
        w[(k + 1, k)] = alpha;
        w[(k, k + 1)] = alpha;
        for i in k + 2..n {
            w[(i, k)] = 0.0;
            w[(k, i)] = 0.0;
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| w[(i, i)]).collect();
    let mut e: Vec<f64> = (0..n)
        .map(|i| if i + 1 < n { w[(i + 1, i)] } else { 0.0 })
        .collect();
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix;
/// `e[i]` couples `d[i]` and `d[i + 1]`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence { iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues (ascending) of a Hermitian matrix via its real symmetric
/// embedding `[[Re H, -Im H], [Im H, Re H]]`, whose spectrum is that of `H`
/// with every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if h.rows != h.cols {
        return Err(Error::Dimension(
            "eigenvalues of a non-square matrix".into(),
        ));
    }
    let n = h.rows;
    let emb = DenseMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let all = symmetric_eigenvalues(&emb)?;
    Ok(all
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect())
}

/// Singular values (descending) of a complex matrix from the eigenvalues
/// of its smaller Gram matrix.
pub fn complex_singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let (m, n) = (a.rows, a.cols);
    let k = m.min(n);
    let mut g = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let mut acc = Complex64::new(0.0, 0.0);
            if n <= m {
                for r in 0..m {
                    acc += a[(r, i)].conj() * a[(r, j)];
                }
            } else {
                for c in 0..n {
                    acc += a[(i, c)] * a[(j, c)].conj();
                }
            }
            g[(i, j)] = acc;
            g[(j, i)] = acc.conj();
        }
    }
    let mut ev = hermitian_eigenvalues(&g)?;
    ev.reverse();
    Ok(ev.into_iter().map(|l| l.max(0.0).sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn random_matrix(rows: usize, cols: usize, seed: &mut u64) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| lcg(seed))
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let b = [3.0, -1.0, 2.5];
        assert_eq!(solve(&DenseMatrix::identity(3), &b).unwrap(), b.to_vec());
        let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(solve(&a, &[2.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn solve_random_residual() {
        let mut seed = 7;
        let mut a = random_matrix(20, 20, &mut seed);
        for i in 0..20 {
            a[(i, i)] += 8.0;
        }
        let b: Vec<f64> = (0..20).map(|_| lcg(&mut seed)).collect();
        let x = solve(&a, &b).unwrap();
        let r = a.mul_vec(&x).unwrap();
        let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = r
            .iter()
            .zip(&b)
            .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        assert!(res <= 1e-10 * bmax, "residual {res}");
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            solve(&a, &[1.0, 1.0]),
            Err(Error::Singular { pivot: 1 })
        ));
        assert!(det(&a).unwrap().abs() < 1e-15);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let a = DenseMatrix::from_rows(&[
            vec![2.0, -1.0, 0.5],
            vec![1.0, 3.0, 2.0],
            vec![0.0, 4.0, -1.0],
        ])
        .unwrap();
        let (m0, m1, m2) = (-3.0 - 2.0 * 4.0, -1.0 - 2.0 * 0.0, 4.0 - 3.0 * 0.0);
        let cof = 2.0 * m0 + m1 + 0.5 * m2;
        assert!((det(&a).unwrap() - cof).abs() < 1e-13);
    }

    #[test]
    fn svd_diagonal_and_rank_one() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]).unwrap();
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);

        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [0.3, 1.0, -1.0];
        let r1 = DenseMatrix::from_fn(4, 3, |i, j| u[i] * v[j]);
        let s = singular_values(&r1).unwrap();
        let expected =
            (u.iter().map(|x| x * x).sum::<f64>() * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        assert!((s[0] - expected).abs() < 1e-12);
        assert!(s[1] < 1e-13 && s[2] < 1e-13);
    }

    #[test]
    fn svd_matches_gram_eigenvalues() {
        let mut seed = 99;
        let a = random_matrix(10, 7, &mut seed);
        let s = singular_values(&a).unwrap();
        let gram = a.transpose().matmul(&a).unwrap();
        let mut ev = symmetric_eigenvalues(&gram).unwrap();
        ev.reverse();
        for (si, li) in s.iter().zip(&ev) {
            assert!((si - li.sqrt()).abs() < 1e-10, "{si} vs {}", li.sqrt());
        }
    }

    #[test]
    fn svd_reconstructs_wide_and_tall() {
        let mut seed = 3;
        for &(m, n) in &[(6, 4), (4, 6), (1, 5), (5, 1), (8, 8)] {
            let a = random_matrix(m, n, &mut seed);
            let d = svd(&a).unwrap();
            let err = d.reconstruct().sub(&a).unwrap().max_abs();
            assert!(err < 1e-12, "{m}x{n}: {err}");
            assert!(d.sigma.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn pinv_special_cases() {
        let a = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let inv = pinv(&a).unwrap();
        let id = a
            .matmul(&inv)
            .unwrap()
            .sub(&DenseMatrix::identity(2))
            .unwrap();
        assert!(id.max_abs() < 1e-12);

        let tall =
            DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 2.0]]).unwrap();
        let left = pinv(&tall).unwrap().matmul(&tall).unwrap();
        assert!(left.sub(&DenseMatrix::identity(2)).unwrap().max_abs() < 1e-12);

        let z = pinv(&DenseMatrix::zeros(3, 2)).unwrap();
        assert_eq!((z.rows(), z.cols()), (2, 3));
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn hermitian_eigenvalues_of_rotation_generator() {
        let mut h = ComplexMatrix::zeros(2, 2);
        h[(0, 1)] = Complex64::new(0.0, -1.0);
        h[(1, 0)] = Complex64::new(0.0, 1.0);
        let ev = hermitian_eigenvalues(&h).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_singular_values_of_real_matrix_agree() {
        let mut seed = 11;
        let a = random_matrix(5, 3, &mut seed);
        let mut c = ComplexMatrix::zeros(5, 3);
        for i in 0..5 {
            for j in 0..3 {
                c[(i, j)] = Complex64::new(a[(i, j)], 0.0);
            }
        }
        let s1 = singular_values(&a).unwrap();
        let s2 = complex_singular_values(&c).unwrap();
        for (p, q) in s1.iter().zip(&s2) {
            assert!((p - q).abs() < 1e-12);
        }
    }
}
