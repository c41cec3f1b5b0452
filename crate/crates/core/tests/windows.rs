mod common;

use std::f64::consts::PI;

use gabor_eb::windows::{
    build_eb_spline, build_tp_window, christensen_massopust, schoenberg_whitney_check,
};
use proptest::prelude::*;

fn fourier_quadrature(
    g: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    cuts: &[f64],
    omega: f64,
) -> (f64, f64) {
    let re = common::integrate_split(&|x| g(x) * (2.0 * PI * omega * x).cos(), a, b, cuts, 1e-13);
    let im = common::integrate_split(&|x| -g(x) * (2.0 * PI * omega * x).sin(), a, b, cuts, 1e-13);
    (re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn permutation_independence(mut r in prop::collection::vec(-2.0f64..2.0, 2..=5), seed in any::<u64>()) {
        let b = build_eb_spline(&r).unwrap();
        let n = r.len();
        r.rotate_left((seed % n as u64) as usize);
        r.swap(0, n - 1);
        let c = build_eb_spline(&r).unwrap();
        for i in 0..=100 {
            let x = n as f64 * i as f64 / 100.0;
            prop_assert!((b.evaluate(x) - c.evaluate(x)).abs() <= 1e-10);
        }
    }

    #[test]
    fn spline_fourier_matches_quadrature(r in prop::collection::vec(-2.0f64..2.0, 1..=4), omega in -3.0f64..3.0) {
        let b = build_eb_spline(&r).unwrap();
        let m = r.len() as f64;
        let cuts: Vec<f64> = (1..r.len()).map(|k| k as f64).collect();
        let (re, im) = fourier_quadrature(&|x| b.evaluate(x), 0.0, m, &cuts, omega);
        let z = b.fourier(omega);
        prop_assert!((z.re - re).abs() <= 1e-9 && (z.im - im).abs() <= 1e-9, "{z} vs {re} {im}");
    }

    #[test]
    fn tp_fourier_matches_quadrature(
        poles in prop::collection::vec((0.5f64..3.0, any::<bool>()), 2..=4),
        omega in -1.0f64..1.0,
    ) {
        let poles: Vec<f64> = poles.into_iter().map(|(a, neg)| if neg { -a } else { a }).collect();
        let g = build_tp_window(&poles, 1.0).unwrap();
        let reach = 40.0 / poles.iter().fold(f64::INFINITY, |m, a| m.min(a.abs()));
        let cuts: Vec<f64> = (-(reach as i64)..=reach as i64).map(|k| k as f64 * 0.5).collect();
        let (re, im) = fourier_quadrature(&|x| g.evaluate(x), -reach, reach, &cuts, omega);
        let z = g.fourier(omega);
        prop_assert!((z.re - re).abs() <= 1e-8 && (z.im - im).abs() <= 1e-8, "{z} vs {re} {im}");
    }
}

#[test]
fn two_sided_exponential() {
    let g = build_tp_window(&[1.0, -1.0], 1.0).unwrap();
    for x in [-2.0, -0.5, 0.0, 0.3, 4.0] {
        assert!((g.evaluate(x) - 0.5 * (-f64::abs(x)).exp()).abs() < 1e-15);
    }
    assert_eq!(g.sign_counts(), (1, 1));
    assert!((g.fourier(0.0).re - 1.0).abs() < 1e-15);
}

#[test]
fn symmetric_spline_normalization() {
    let l = 1.7;
    let b = build_eb_spline(&[l, -l]).unwrap();
    for x in [0.0, 0.25, 0.5, 0.999] {
        assert!((b.evaluate(x) - (l * x).sinh() / l).abs() < 1e-14);
        assert!((b.evaluate(2.0 - x) - b.evaluate(x)).abs() < 1e-13);
    }
}

#[test]
fn christensen_massopust_agrees() {
    let rates = [-2.0, -1.0, 1.0, 2.0];
    let b = build_eb_spline(&rates).unwrap();
    for i in 0..=400 {
        let x = 4.0 * i as f64 / 400.0;
        assert!((christensen_massopust(&rates, x).unwrap() - b.evaluate(x)).abs() < 1e-12);
    }
}

fn nodes(state: &mut u64, n: usize) -> Vec<f64> {
    let mut pool: Vec<i32> = (-12..=12).collect();
    let mut out = Vec::new();
    for _ in 0..n {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let i = ((*state >> 33) as usize) % pool.len();
        out.push(pool.swap_remove(i) as f64 * 0.25);
    }
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn tp_determinants_are_nonnegative_and_interlacing_decides_positivity() {
    let g = build_tp_window(&[1.0, -1.0], 1.0).unwrap();
    let mut state = 17u64;
    let (mut positive, mut zero) = (0, 0);
    for t in 0..200 {
        let n = 1 + t % 6;
        let xs = nodes(&mut state, n);
        let ys = nodes(&mut state, n);
        let r = schoenberg_whitney_check(&g, &xs, &ys).unwrap();
        let scale: f64 = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| g.evaluate(xs[j] - ys[k]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .product();
        assert!(
            r.determinant >= -1e-12 * scale,
            "{xs:?} {ys:?}: {}",
            r.determinant
        );
        let strict = r.determinant > 1e-12 * scale;
        assert_eq!(
            strict, r.condition_holds,
            "{xs:?} {ys:?}: {}",
            r.determinant
        );
        if strict {
            positive += 1;
        } else {
            zero += 1;
        }
    }
    assert!(
        positive > 20 && zero > 20,
        "{positive} positive, {zero} singular"
    );
}

#[test]
fn dilation_scales_poles() {
    let g = build_tp_window(&[2.0, -1.0], 1.0).unwrap();
    let h = g.dilated(0.5).unwrap();
    for x in [-1.0, 0.2, 1.3] {
        assert!((h.evaluate(x) - g.evaluate(0.5 * x)).abs() < 1e-13);
    }
}
