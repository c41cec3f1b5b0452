mod common;

use gabor_eb::exppoly::{strong_sign_changes_fn, strong_sign_changes_seq, PiecewiseExpPoly};
use gabor_eb::windows::build_eb_spline;
use proptest::prelude::*;

fn rates(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.5f64..2.5, 1..=max_len)
}

/// A compactly supported piecewise exp-poly: a random combination of
/// shifted splines.
fn random_function() -> impl Strategy<Value = PiecewiseExpPoly> {
    (
        rates(3),
        prop::collection::vec((-1.0f64..1.0, -1.5f64..1.5), 1..=3),
    )
        .prop_map(|(r, parts)| {
            let b = build_eb_spline(&r).unwrap();
            let terms: Vec<(f64, &PiecewiseExpPoly, f64)> =
                parts.iter().map(|&(c, s)| (c, &b.shape, s)).collect();
            PiecewiseExpPoly::linear_combination(&terms)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convolution_matches_quadrature(f in random_function(), lambda in -2.0f64..2.0, seed in any::<u64>()) {
        let h = f.convolve_exp_box(lambda).unwrap();
        let knots = f.breakpoints();
        let (lo, hi) = h.support();
        let mut s = seed;
        for _ in 0..50 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = lo - 0.25 + (hi - lo + 0.5) * ((s >> 11) as f64 / (1u64 << 53) as f64);
            let cuts: Vec<f64> = knots.iter().map(|k| x - k).collect();
            let integrand = |t: f64| (lambda * t).exp() * f.evaluate(x - t);
            let want = common::integrate_split(&integrand, 0.0, 1.0, &cuts, 1e-14);
            prop_assert!((h.evaluate(x) - want).abs() <= 1e-10, "x = {x}: {} vs {want}", h.evaluate(x));
        }
    }

    #[test]
    fn support_is_additive(f in random_function(), lambda in -2.0f64..2.0) {
        let (a, b) = f.support();
        let (c, d) = f.convolve_exp_box(lambda).unwrap().support();
        prop_assert!((c - a).abs() <= 1e-12 && (d - b - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn integral_is_preserved(f in random_function(), lambda in -2.0f64..2.0) {
        prop_assume!(lambda.abs() > 1e-6);
        let h = f.convolve_exp_box(lambda).unwrap();
        let want = f.integral().unwrap() * (lambda.exp() - 1.0) / lambda;
        prop_assert!((h.integral().unwrap() - want).abs() <= 1e-10 * (1.0 + want.abs()));
    }

    #[test]
    fn variation_diminishing(r in rates(5), c in prop::collection::vec(-1.0f64..1.0, 1..=12)) {
        let b = build_eb_spline(&r).unwrap();
        let parts: Vec<(f64, &PiecewiseExpPoly, f64)> =
            c.iter().enumerate().map(|(k, &ck)| (ck, &b.shape, k as f64)).collect();
        let f = PiecewiseExpPoly::linear_combination(&parts);
        let n = c.len() + r.len();
        prop_assert!(strong_sign_changes_fn(&f, 0.0, n as f64, 256 * n) <= strong_sign_changes_seq(&c));
    }
}

#[test]
fn equal_rates_give_polynomial_weights() {
    // B_(1,1)(x) = x e^x on [0, 1]
    let b = build_eb_spline(&[1.0, 1.0]).unwrap();
    for x in [0.1, 0.5, 0.9] {
        assert!((b.evaluate(x) - x * x.exp()).abs() < 1e-14);
    }
    // nearly equal rates merge
    let c = build_eb_spline(&[1.0, 1.0 + 1e-14]).unwrap();
    assert!((c.evaluate(0.5) - b.evaluate(0.5)).abs() < 1e-12);
}

#[test]
fn segments_are_half_open() {
    let b = build_eb_spline(&[0.0]).unwrap();
    assert_eq!(b.evaluate(0.0), 1.0);
    assert_eq!(b.evaluate(1.0), 0.0);
    assert_eq!(b.shape.evaluate_left(1.0), 1.0);
}
