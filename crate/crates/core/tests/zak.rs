use gabor_eb::exppoly::PiecewiseExpPoly;
use gabor_eb::windows::{build_eb_spline, build_tp_window, Window};
use gabor_eb::zak::{self, ZakEvaluator};

#[test]
fn identities_hold_for_all_window_types() {
    let cases: Vec<(Window, f64)> = vec![
        (build_eb_spline(&[0.0, 0.0]).unwrap().into(), 1.0),
        (
            build_eb_spline(&[-2.0, -1.0, 1.0, 2.0]).unwrap().into(),
            0.8,
        ),
        (build_tp_window(&[1.0, -1.0], 1.0).unwrap().into(), 1.0),
        (
            build_tp_window(&[3.0, 1.0, -0.7, -2.0], 2.0)
                .unwrap()
                .into(),
            1.7,
        ),
    ];
    for (w, alpha) in cases {
        let e = ZakEvaluator::new(w, alpha).unwrap();
        let r = zak::verify_zak_identities(&e, 64).unwrap();
        assert!(
            r.quasi_periodicity <= 1e-10 && r.periodicity <= 1e-10 && r.max_residual <= 1e-10,
            "{r:?}"
        );
    }
}

#[test]
fn tail_bound_is_small_for_tp_windows() {
    let e = ZakEvaluator::new(build_tp_window(&[0.3, -0.3], 1.0).unwrap(), 0.5).unwrap();
    assert!(e.tail_bound() <= 1e-12);
}

#[test]
fn half_line_value_is_real() {
    let e = ZakEvaluator::new(build_eb_spline(&[1.0, 2.0, 3.0]).unwrap(), 1.0).unwrap();
    for x in [0.1, 0.4, 0.77] {
        let z = e.zak(x, 0.5);
        assert!(z.im.abs() < 1e-13 && (z.re - e.zak_half(x)).abs() < 1e-13);
    }
}

#[test]
fn hat_zero_is_at_half() {
    let e = ZakEvaluator::new(build_eb_spline(&[0.0, 0.0]).unwrap(), 1.0).unwrap();
    let r = zak::locate_zero_on_half_line(&e, 256).unwrap();
    assert_eq!((r.x_zero, r.omega_zero), (0.5, 0.5));
    assert!(r.min_modulus_off_zero > 0.0);
}

#[test]
fn combinations_with_nonvanishing_symbol_keep_the_zero_set() {
    for rates in [&[0.0, 0.0][..], &[-1.0, 0.5, 2.0], &[1.0, 1.0, -1.0, -1.0]] {
        let b = build_eb_spline(rates).unwrap();
        let g = PiecewiseExpPoly::linear_combination(&[(2.0, &b.shape, 0.0), (1.0, &b.shape, 1.0)]);
        let sb = zak::scan_zero_cells(&ZakEvaluator::new(b.clone(), 1.0).unwrap(), 128);
        let sg = zak::scan_zero_cells(&ZakEvaluator::new(Window::Compact(g), 1.0).unwrap(), 128);
        assert_eq!(sb.cells, sg.cells, "{rates:?}");
        assert_eq!(sb.cells.len(), 1);
    }
}

#[test]
fn tp_zero_matches_associated_spline() {
    let tp = build_tp_window(&[2.0, 1.0], 1.0).unwrap();
    let r = zak::locate_zero_tp(&tp, 1.0, 256).unwrap();
    assert!((r.omega_zero - 0.5).abs() < 1e-15);
    let e = ZakEvaluator::new(tp, 1.0).unwrap();
    assert!(e.zak(r.x_zero, 0.5).norm() < 1e-10);
}

#[test]
fn factorization_for_dilated_lattice() {
    let tp = build_tp_window(&[1.5, -0.5, -2.0], 1.0).unwrap();
    for alpha in [0.5, 1.0, 1.7] {
        assert!(zak::factorization_residual(&tp, alpha, 32).unwrap() <= 1e-8);
    }
    let rates = zak::associated_spline_rates(&tp, 0.5);
    assert_eq!(rates.len(), 3);
}
