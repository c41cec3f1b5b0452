use gabor_eb::bounds::{
    self, c_beta, lower_bound_case1, lower_bound_eb2, lower_bound_tp2,
    optimal_bound_highredundancy, optimal_bound_rational, optimal_bound_rational_with,
    optimal_bound_zak_subsampled_with, transfer_bounds, BoundMethod, GridOptions,
};
use gabor_eb::gramian::LatticeParams;
use gabor_eb::windows::{build_eb_spline, build_tp_window, Window};

fn sym(lambda: f64) -> Window {
    build_eb_spline(&[lambda, -lambda]).unwrap().into()
}

fn fixed(n: usize) -> GridOptions {
    GridOptions {
        initial: n,
        max: n,
        rel_tol: 0.0,
    }
}

#[test]
fn ordering_chain_on_the_sixty_first_grid() {
    for k in (31..=60).step_by(3) {
        let beta = k as f64 / 61.0;
        let lat = LatticeParams::new(1.0, beta).unwrap();
        let r = optimal_bound_rational(&sym(1.0), &lat).unwrap();
        let a = lower_bound_eb2(1.0, beta).unwrap();
        assert!(a <= r.lower && r.lower <= r.upper.unwrap(), "k = {k}");
        assert_eq!(r.method, BoundMethod::OptimalRational);
    }
}

#[test]
fn case_one_agrees_with_high_redundancy() {
    for (lambda, alpha, beta) in [
        (1.0, 1.0, 0.5),
        (0.3, 1.0, 0.2),
        (2.5, 0.75, 0.5),
        (1.0, 2.0, 0.25),
    ] {
        let lat = LatticeParams::new(alpha, beta).unwrap();
        let r = optimal_bound_rational(&sym(lambda), &lat).unwrap();
        let h = optimal_bound_highredundancy(&sym(lambda), &lat).unwrap();
        assert!(
            (r.lower - h.lower).abs() <= 1e-6
                && (r.upper.unwrap() - h.upper.unwrap()).abs() <= 1e-6
        );
        if alpha == 1.0 {
            let c = lower_bound_case1(lambda, beta).unwrap();
            assert!((c - h.lower).abs() <= 1e-9 * c, "{lambda} {beta}");
        }
    }
}

#[test]
fn hat_function_high_redundancy() {
    let hat: Window = build_eb_spline(&[0.0, 0.0]).unwrap().into();
    let h = optimal_bound_highredundancy(&hat, &LatticeParams::new(1.0, 0.5).unwrap()).unwrap();
    assert!((h.lower - 1.0).abs() < 1e-12);
    assert!((h.minimizer.unwrap() - 0.5).abs() < 1e-6);
    assert!(h.lower <= h.upper.unwrap());
}

#[test]
fn grid_refinement_never_raises_the_lower_bound() {
    for (w, lat) in [
        (sym(1.0), LatticeParams::new(1.0, 40.0 / 61.0).unwrap()),
        (
            build_eb_spline(&[-2.0, -1.0, 1.0, 2.0]).unwrap().into(),
            LatticeParams::new(1.0, 0.75).unwrap(),
        ),
        (
            build_eb_spline(&[2.0, -1.0, 0.5]).unwrap().into(),
            LatticeParams::new(0.75, 0.8).unwrap(),
        ),
    ] {
        let mut last = f64::INFINITY;
        let mut last_up = 0.0;
        for n in [16, 32, 64, 128] {
            let r = optimal_bound_rational_with(&w, &lat, &fixed(n)).unwrap();
            assert!(r.lower <= last + 1e-12, "n = {n}: {} after {last}", r.lower);
            assert!(r.upper.unwrap() >= last_up - 1e-12);
            last = r.lower;
            last_up = r.upper.unwrap();
        }
    }
}

#[test]
fn dense_symbol_cross_check() {
    let w: Window = build_eb_spline(&[1.0, 2.0, 3.0]).unwrap().into();
    let lat = LatticeParams::new(1.0, 0.6).unwrap();
    let r = optimal_bound_rational_with(&w, &lat, &fixed(64)).unwrap();
    let mut lo = f64::INFINITY;
    for i in 0..16 {
        for j in 0..16 {
            let (s_min, _) =
                bounds::symbol_extremes_dense(&w, &lat, i as f64 / 16.0 * 0.2, j as f64 / 16.0)
                    .unwrap();
            lo = lo.min(s_min);
        }
    }
    assert!(r.lower <= lo + 1e-9, "{} vs {lo}", r.lower);
}

#[test]
fn critical_density_has_no_lower_bound() {
    let r = optimal_bound_zak_subsampled_with(&sym(1.0), 1, &fixed(256)).unwrap();
    assert!(r.lower < 1e-4, "{}", r.lower);
    assert!(r.upper.unwrap() > 0.5);
}

#[test]
fn c_beta_values_and_jump() {
    assert_eq!(c_beta(0.4).unwrap(), 1.0);
    assert!((c_beta(0.75).unwrap() - 25.0 / 9.0).abs() < 1e-14);
    let left = c_beta(5.0 / 6.0).unwrap();
    let right = c_beta(5.0 / 6.0 + 1e-12).unwrap();
    assert!((left - right).abs() > 0.1);
    assert!(c_beta(1.0).is_err() && c_beta(0.0).is_err());
}

#[test]
fn closed_form_examples() {
    let s = 0.5f64.sinh();
    assert!((lower_bound_eb2(1.0, 0.4).unwrap() - 2.0 * s * s / 0.4).abs() < 1e-14);
    let want = 1.0 / (0.6 * (3.0 - 1.0 / 0.6f64).powi(2)) * 0.5f64.min(1.0 / 1.44);
    assert!((lower_bound_eb2(0.0, 0.6).unwrap() - want).abs() < 1e-14);
    let tp = (2.0 * s * s).min(1f64.sinh().powi(2)) / (8.0 * 0.5f64.cosh().powi(4));
    assert!((lower_bound_tp2(1.0, 1.0, 0.5).unwrap() - tp).abs() < 1e-14);
    assert!(lower_bound_eb2(1.0, 1.0).is_err() && lower_bound_tp2(1.0, 2.0, 0.5).is_err());
}

#[test]
fn tp_bound_decreases_with_density() {
    let mut last = f64::INFINITY;
    for i in 0..=49 {
        let beta = 0.5 + 0.49 * i as f64 / 49.0;
        let a = lower_bound_tp2(1.0, 1.0, beta).unwrap();
        assert!(a <= last);
        last = a;
    }
}

#[test]
fn transfer_is_linear() {
    assert_eq!(transfer_bounds(2.0, 3.0, 1.0, 1.0, 1.0), (2.0, 3.0));
    let (a1, _) = transfer_bounds(2.0, 3.0, 1.5, 0.2, 4.0);
    let (a2, _) = transfer_bounds(2.0, 3.0, 3.0, 0.2, 4.0);
    assert!((a2 - 2.0 * a1).abs() < 1e-15);
}

#[test]
fn transferred_bounds_for_tp_windows() {
    let tp = build_tp_window(&[1.0, -1.0], 1.0).unwrap();
    for k in [35u64, 48, 59] {
        let beta = k as f64 / 61.0;
        let lat = LatticeParams::new(1.0, beta).unwrap();
        let r = bounds::transferred_optimal_tp(&tp, &lat, &GridOptions::default()).unwrap();
        assert_eq!(r.method, BoundMethod::TransferredRational);
        assert!(lower_bound_tp2(1.0, 1.0, beta).unwrap() <= r.lower && r.lower <= r.upper.unwrap());
    }
    let (dmin, dmax) = bounds::tp_transfer_range(&tp, 1.0).unwrap();
    assert!((dmin - 1.0 / (16.0 * 0.5f64.cosh().powi(4))).abs() < 1e-14);
    assert!(dmin <= dmax);
}
