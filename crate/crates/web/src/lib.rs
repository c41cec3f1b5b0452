//! Browser demo: EB-spline samples, the modulus of the Zak transform, and
//! frame bounds on the `k/61` density sweep.

use gabor_eb::bounds::{self, GridOptions};
use gabor_eb::gramian::LatticeParams;
use gabor_eb::windows::{build_eb_spline, Window};
use gabor_eb::zak::{self, ZakEvaluator};
use wasm_bindgen::prelude::*;

fn js_err(e: gabor_eb::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[x_0, B(x_0), x_1, B(x_1), ...]` on `samples` uniform points of `[0, m]`.
#[wasm_bindgen]
pub fn spline_samples(rates: &[f64], samples: usize) -> Result<Vec<f64>, JsError> {
    let b = build_eb_spline(rates).map_err(js_err)?;
    let n = samples.max(2);
    let m = b.order as f64;
    Ok((0..n)
        .flat_map(|i| {
            let x = m * i as f64 / (n - 1) as f64;
            [x, b.evaluate(x)]
        })
        .collect())
}

/// Row-major `|Z_alpha B(x_i, w_j)|` on an `n x n` grid of
/// `[0, alpha) x [0, 1/alpha)`, followed by the located zero `(x, w)`.
#[wasm_bindgen]
pub fn zak_modulus(rates: &[f64], alpha: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let e = ZakEvaluator::new(build_eb_spline(rates).map_err(js_err)?, alpha).map_err(js_err)?;
    let n = n.clamp(2, 512);
    let mut out = Vec::with_capacity(n * n + 2);
    for i in 0..n {
        let x = alpha * i as f64 / n as f64;
        for j in 0..n {
            out.push(e.zak(x, j as f64 / (alpha * n as f64)).norm());
        }
    }
    let zero = zak::locate_zero_on_half_line(&e, 256).map_err(js_err)?;
    out.push(zero.x_zero);
    out.push(zero.omega_zero);
    Ok(out)
}

/// `[formula, optimal lower, optimal upper]` for the symmetric order-2
/// spline with parameter `lambda` at `alpha = 1`, `beta = k / den`.
#[wasm_bindgen]
pub fn frame_bounds(lambda: f64, k: u32, den: u32) -> Result<Vec<f64>, JsError> {
    if k == 0 || k >= den {
        return Err(JsError::new("need 0 < k < den"));
    }
    let beta = k as f64 / den as f64;
    let lat = LatticeParams::new(1.0, beta).map_err(js_err)?;
    if lat.rational_form.is_none() {
        return Err(JsError::new("denominator too large"));
    }
    let w = Window::from(build_eb_spline(&[lambda, -lambda]).map_err(js_err)?);
    let opts = GridOptions {
        max: 512,
        ..GridOptions::default()
    };
    let opt = bounds::optimal_bound_rational_with(&w, &lat, &opts).map_err(js_err)?;
    let formula = bounds::lower_bound_eb2(lambda, beta).map_err(js_err)?;
    Ok(vec![formula, opt.lower, opt.upper.unwrap_or(f64::NAN)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_samples() {
        assert_eq!(
            spline_samples(&[0.0, 0.0], 3).ok().unwrap(),
            vec![0.0, 0.0, 1.0, 1.0, 2.0, 0.0]
        );
    }

    #[test]
    fn zak_grid_ends_with_the_zero() {
        let v = zak_modulus(&[0.0, 0.0], 1.0, 8).ok().unwrap();
        assert_eq!(v.len(), 66);
        assert_eq!(&v[64..], &[0.5, 0.5]);
    }

    #[test]
    fn bounds_are_ordered() {
        let v = frame_bounds(1.0, 40, 61).ok().unwrap();
        assert!(v[0] <= v[1] && v[1] <= v[2]);
    }
}
