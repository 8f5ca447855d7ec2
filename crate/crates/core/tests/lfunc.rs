use critline::forms::{build_coeff_table, CoeffTable, FormSpec};
use critline::lfunc::{divisor_tail, LFunction, LMethod};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn delta() -> &'static LFunction {
    static L: OnceLock<LFunction> = OnceLock::new();
    L.get_or_init(|| LFunction::new(build_coeff_table(&FormSpec::delta(), 4000).unwrap()).unwrap())
}

fn f23() -> &'static LFunction {
    static L: OnceLock<LFunction> = OnceLock::new();
    L.get_or_init(|| LFunction::new(build_coeff_table(&FormSpec::f23(), 20_000).unwrap()).unwrap())
}

// high-precision references
const LAMBDA_DELTA_9I: f64 = 1.564025775070757644e-6;
const L_DELTA_9I: (f64, f64) = (0.06136639170915911, -0.21106045282347610);
const FIRST_ZERO_DELTA: f64 = 9.222379399921102522;
const L_DELTA_3: f64 = 0.94858740746804404739;

#[test]
fn delta_root_number_is_one() {
    let th = delta().root_number();
    assert!((th - Complex64::new(1.0, 0.0)).norm() < 1e-10, "{th}");
}

#[test]
fn f23_root_number_is_one() {
    let th = f23().root_number();
    assert!((th - Complex64::new(1.0, 0.0)).norm() < 1e-10, "{th}");
}

#[test]
fn completed_delta_at_reference_point() {
    let v = delta().completed(Complex64::new(0.5, 9.0)).unwrap();
    let z = v.value.to_complex();
    assert!((z.re - LAMBDA_DELTA_9I).abs() < 1e-12 * LAMBDA_DELTA_9I, "{z}");
    assert!(z.im.abs() < 1e-12 * LAMBDA_DELTA_9I, "{z}");
    assert!(v.rel_error < 1e-11);
}

#[test]
fn l_value_delta_on_line() {
    let v = delta().l_value(Complex64::new(0.5, 9.0), 4000, 1e-10).unwrap();
    assert!(matches!(v.method, LMethod::Smoothed { .. }));
    assert!((v.value - Complex64::new(L_DELTA_9I.0, L_DELTA_9I.1)).norm() < 1e-11, "{:?}", v);
}

#[test]
fn l_value_delta_at_three_both_routes() {
    let t = build_coeff_table(&FormSpec::delta(), 4000).unwrap();
    let s = 3.0;
    let direct: f64 = (1..=4000).map(|n| t.r[n].re * (n as f64).powf(-s)).sum();
    assert!((direct - L_DELTA_3).abs() < 1e-8);
    let v = delta().l_value(Complex64::new(s, 0.0), 4000, 1e-6).unwrap();
    assert!(matches!(v.method, LMethod::Direct { .. }));
    assert!((v.value.re - L_DELTA_3).abs() <= v.error);
    let v = delta().l_value(Complex64::new(s, 0.0), 10, 1e-12).unwrap();
    assert!(matches!(v.method, LMethod::Smoothed { .. }));
    assert!((v.value.re - L_DELTA_3).abs() < 1e-13, "{:?}", v);
}

#[test]
fn l_value_at_two_direct_tail_is_honest() {
    let t = build_coeff_table(&FormSpec::delta(), 10_000).unwrap();
    let lf = LFunction::with_root_number(t, Complex64::new(1.0, 0.0)).unwrap();
    let smooth = lf.l_value(Complex64::new(2.0, 0.0), 1, 1e-12).unwrap();
    let direct = lf.l_value(Complex64::new(2.0, 0.0), 10_000, 1e-2).unwrap();
    assert!(matches!(direct.method, LMethod::Direct { terms: 10_000 }));
    assert!((direct.value - smooth.value).norm() <= direct.error);
    assert!(divisor_tail(1e4, 2.0) < 1e-2);
}

#[test]
fn first_zero_of_delta() {
    let recs = delta().scan_sign_changes(0.0, 10.0).unwrap();
    assert_eq!(recs.len(), 1);
    assert!((recs[0].refined - FIRST_ZERO_DELTA).abs() < 1e-8, "{:?}", recs[0]);
}

#[test]
fn quadrature_evaluator_agrees() {
    for s in [Complex64::new(0.5, 9.0), Complex64::new(0.8, 3.0), Complex64::new(2.0, 14.0)] {
        let a = delta().completed(s).unwrap().value.to_complex_scaled(-std::f64::consts::PI / 2.0 * s.im);
        let b = delta()
            .completed_by_quadrature(s, 1e-10)
            .unwrap()
            .to_complex_scaled(-std::f64::consts::PI / 2.0 * s.im);
        assert!((a - b).norm() < 1e-8 * a.norm(), "{s}: {a} vs {b}");
    }
}

#[test]
fn quadrature_refines_first_zero() {
    let g = delta().refine_by_quadrature(FIRST_ZERO_DELTA, 1e-4, 1e-11).unwrap();
    assert!((g - FIRST_ZERO_DELTA).abs() < 1e-7, "{g}");
}

/// Naive evaluation at `s = 3` for the weight-one form: the Dirichlet series
/// converges absolutely and the gamma factor is elementary.
#[test]
fn completed_f23_at_three_matches_series() {
    let table: &CoeffTable = f23().table();
    let c = 2.0 * std::f64::consts::PI / 23f64.sqrt();
    let series: f64 = (1..=table.n_max).map(|n| table.r[n].re * (n as f64).powi(-3)).sum();
    let expect = c.powi(-3) * 2.0 * series;
    let v = f23().completed(Complex64::new(3.0, 0.0)).unwrap().value.to_complex();
    assert!((v.re - expect).abs() < 1e-8 * expect, "{v} vs {expect}");
}

#[test]
fn no_zeros_below_one() {
    let rep = delta().count_zeros(1.0).unwrap();
    assert_eq!(rep.count_argument, 0);
    assert_eq!(rep.count_signs, 0);
}

#[test]
fn count_is_locally_constant() {
    let a = delta().count_zeros(12.0).unwrap();
    let b = delta().count_zeros(12.3).unwrap();
    assert_eq!(a.count_argument, b.count_argument);
    assert_eq!(a.count_signs, b.count_signs);
    assert_eq!(a.count_signs as i64, a.count_argument);
}

#[test]
fn ordinate_near_t_is_nudged() {
    let rep = delta().count_zeros(FIRST_ZERO_DELTA).unwrap();
    assert!((rep.t_max - FIRST_ZERO_DELTA).abs() >= 1e-3);
    assert_eq!(rep.count_signs as i64, rep.count_argument);
}

fn rotated(lf: &LFunction, s: Complex64) -> (Complex64, Complex64) {
    let a = lf.completed(s).unwrap().value;
    let b = lf.completed(Complex64::new(1.0 - s.re, s.im)).unwrap().value;
    let shift = -std::f64::consts::PI / 2.0 * s.im.abs();
    (a.to_complex_scaled(shift), b.conj().to_complex_scaled(shift))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functional_equation_delta(sigma in -1.0f64..2.0, t in -30.0f64..30.0) {
        let lf = delta();
        let (a, b) = rotated(lf, Complex64::new(sigma, t));
        prop_assert!((a - lf.root_number() * b).norm() <= 1e-10 * a.norm().max(b.norm()));
    }

    #[test]
    fn functional_equation_f23(sigma in -1.0f64..2.0, t in -20.0f64..20.0) {
        let lf = f23();
        let (a, b) = rotated(lf, Complex64::new(sigma, t));
        prop_assert!((a - lf.root_number() * b).norm() <= 1e-10 * a.norm().max(b.norm()));
    }

    #[test]
    fn hardy_z_is_real_and_even(t in 0.1f64..40.0) {
        let p = delta().hardy_z(t).unwrap();
        let m = delta().hardy_z(-t).unwrap();
        prop_assert!(p.eval_error < 1e-9);
        prop_assert!((p.z - m.z).abs() <= 1e-10 * p.z.abs().max(1e-300) + 1e-12 * p.lambda_log.to_complex_scaled(-std::f64::consts::PI / 2.0 * t).norm());
    }
}

#[test]
fn delta_count_to_forty() {
    let rep = delta().count_zeros(40.0).unwrap();
    assert_eq!(rep.count_argument, 13);
    assert_eq!(rep.count_signs as i64, rep.count_argument);
    for g in &rep.ordinates {
        let q = delta().refine_by_quadrature(*g, 1e-5, 1e-11).unwrap();
        assert!((q - g).abs() < 1e-6, "{g} vs {q}");
    }
}
