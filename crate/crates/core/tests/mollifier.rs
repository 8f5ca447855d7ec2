use critline::forms::{build_coeff_table, CoeffTable, FormSpec};
use critline::lfunc::LFunction;
use critline::mollifier::{
    advisory_schedule, build_mollifier, frak_f, phi, DetectorParams, MOLLIFIER_CSV_HEADER,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn delta_table() -> &'static CoeffTable {
    static T: OnceLock<CoeffTable> = OnceLock::new();
    T.get_or_init(|| build_coeff_table(&FormSpec::delta(), 100_000).unwrap())
}

fn delta() -> &'static LFunction {
    static L: OnceLock<LFunction> = OnceLock::new();
    L.get_or_init(|| LFunction::new(build_coeff_table(&FormSpec::delta(), 3000).unwrap()).unwrap())
}

const PRIMES_257_300: [u64; 8] = [257, 263, 269, 271, 277, 281, 283, 293];

#[test]
fn below_257_the_mollifier_is_trivial() {
    let m = build_mollifier(delta_table(), 100.0).unwrap();
    assert!(m.is_trivial());
    assert_eq!(m.alpha(1), Complex64::new(1.0, 0.0));
    assert_eq!(m.beta(1), Complex64::new(1.0, 0.0));
    for s in [Complex64::new(0.5, 3.0), Complex64::new(-2.0, 17.0)] {
        assert_eq!(phi(s, &m), Complex64::new(1.0, 0.0));
    }
}

#[test]
fn support_up_to_300_is_the_primes() {
    let t = delta_table();
    let m = build_mollifier(t, 300.0).unwrap();
    let mut expect = vec![1u64];
    expect.extend(PRIMES_257_300);
    assert_eq!(m.support, expect);
    for p in PRIMES_257_300 {
        assert_eq!(m.alpha(p), -t.r[p as usize] / 2.0);
        let taper = 1.0 - (p as f64).ln() / 300f64.ln();
        assert!((m.beta(p) - m.alpha(p) * taper).norm() < 1e-16);
    }
    for nu in 2..=300u64 {
        if !PRIMES_257_300.contains(&nu) {
            assert_eq!(m.alpha(nu), Complex64::new(0.0, 0.0), "nu = {nu}");
        }
    }
}

#[test]
fn two_prime_product_appears_by_x_70000() {
    let t = delta_table();
    let m = build_mollifier(t, 7e4).unwrap();
    let expect = t.r[257] * t.r[263] / 4.0;
    assert!((m.alpha(257 * 263) - expect).norm() <= 1e-15 * expect.norm());
    assert!(m.support.iter().all(|&v| v <= 70_000));
}

#[test]
fn phi_is_a_finite_sum() {
    let t = delta_table();
    let m = build_mollifier(t, 300.0).unwrap();
    let mut expect = 1.0;
    for p in PRIMES_257_300 {
        expect += m.beta(p).re / (p as f64).sqrt();
    }
    assert!((phi(Complex64::new(0.5, 0.0), &m) - expect).norm() < 1e-15);
    let sum: Complex64 = m.beta.iter().sum();
    assert!((phi(Complex64::new(0.0, 0.0), &m) - sum).norm() < 1e-15);
}

#[test]
fn coverage_is_checked() {
    let t = build_coeff_table(&FormSpec::delta(), 200).unwrap();
    assert!(build_mollifier(&t, 300.0).is_err());
    assert!(build_mollifier(&t, 2.0).is_err());
}

#[test]
fn f23_drops_vanishing_primes() {
    let t = build_coeff_table(&FormSpec::f23(), 2000).unwrap();
    let m = build_mollifier(&t, 2000.0).unwrap();
    for &nu in &m.support[1..] {
        assert!(m.alpha(nu).norm() > 0.0);
    }
    // 263 is inert in Q(sqrt(-23)), so a(263) = 0
    assert_eq!(t.r[263], Complex64::new(0.0, 0.0));
    assert_eq!(m.alpha(263), Complex64::new(0.0, 0.0));
}

#[test]
fn params_and_regime_flag() {
    assert!(DetectorParams::new(0.1, 0.3, 300.0).is_err());
    assert!(DetectorParams::new(0.05, 1.0, 300.0).is_err());
    assert!(DetectorParams::new(0.05, 0.3, 2.0).is_err());
    let p = DetectorParams::new(0.05, 0.3, 300.0).unwrap();
    assert!(p.advisory());
    let tiny = DetectorParams::new(1e-300, 0.9, 3.0).unwrap();
    assert!(!tiny.advisory());
}

#[test]
fn schedule_at_a_million() {
    let s = advisory_schedule(1e6, 10.0).unwrap();
    assert!((s.delta - 1e-6).abs() < 1e-20);
    assert!((s.x - 10f64.powf(0.06)).abs() < 1e-12);
    assert!(s.trivial_mollifier);
    assert!(!s.legal, "h1 = A / ln X exceeds 1 at this height");
}

#[test]
fn trivial_mollifier_detector_value() {
    let m = build_mollifier(delta_table(), 100.0).unwrap();
    let p = DetectorParams::new(0.05, 0.3, 100.0).unwrap();
    for t in [3.0, 10.0, 21.5] {
        let v = frak_f(delta(), &m, &p, t).unwrap();
        let lam = delta().completed(Complex64::new(0.5, t)).unwrap().value;
        let expect = lam.ln_abs + (std::f64::consts::FRAC_PI_2 - 0.05) * t - 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((v.value.ln_abs - expect).abs() < 1e-12);
        assert!((v.rotated.abs() - v.value.ln_abs.exp()).abs() < 1e-8 * v.rotated.abs());
    }
}

#[test]
fn detector_vanishes_at_a_zero() {
    let m = build_mollifier(delta_table(), 300.0).unwrap();
    let p = DetectorParams::new(0.05, 0.3, 300.0).unwrap();
    let g = delta().scan_sign_changes(9.0, 9.5).unwrap()[0].refined;
    let at = frak_f(delta(), &m, &p, g).unwrap().rotated.abs();
    let near = frak_f(delta(), &m, &p, g + 0.1).unwrap().rotated.abs();
    assert!(at < 1e-7 * near, "{at} vs {near}");
}

#[test]
fn rotated_detector_is_real() {
    let m = build_mollifier(delta_table(), 300.0).unwrap();
    let p = DetectorParams::new(0.05, 0.3, 300.0).unwrap();
    let v = frak_f(delta(), &m, &p, 10.0).unwrap();
    assert!(v.rel_error < 1e-8);
    // the rotated value equals +-|F| when theta^{-1/2} F is real
    assert!((v.rotated.abs() - v.value.ln_abs.exp()).abs() <= 1e-8 * v.rotated.abs());
}

#[test]
fn csv_dump_has_header_and_rows() {
    let m = build_mollifier(delta_table(), 300.0).unwrap();
    let mut buf = Vec::new();
    m.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(MOLLIFIER_CSV_HEADER));
    assert_eq!(lines.count(), 9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_multiplicative_on_coprime_support(i in 0usize..4000, j in 0usize..4000) {
        let m = {
            static M: OnceLock<critline::mollifier::MollifierTable> = OnceLock::new();
            M.get_or_init(|| build_mollifier(delta_table(), 1e5).unwrap())
        };
        let (u, v) = (m.support[i % m.support.len()], m.support[j % m.support.len()]);
        if critline::arith::gcd(u, v) == 1 && u * v <= 100_000 {
            let uv = m.alpha(u * v);
            prop_assert!((uv - m.alpha(u) * m.alpha(v)).norm() <= 1e-15 * uv.norm().max(1e-300));
        }
    }

    #[test]
    fn beta_grows_with_x(k in 0usize..9, x in 300.0f64..5000.0) {
        let nu = [1u64, 257, 263, 269, 271, 277, 281, 283, 293][k];
        let a = build_mollifier(delta_table(), x).unwrap();
        let b = build_mollifier(delta_table(), x * 1.5).unwrap();
        prop_assert!(b.beta(nu).norm() >= a.beta(nu).norm());
        prop_assert!(b.beta(nu).norm() <= b.alpha(nu).norm());
    }
}

#[test]
fn alpha_multiplicative_exhaustive_to_1e5() {
    let t = delta_table();
    let m = build_mollifier(t, 1e5).unwrap();
    let mut composite = 0;
    for (&nu, &a) in m.support.iter().zip(&m.alpha) {
        let f = critline::arith::factorize(nu);
        assert!(f.iter().all(|&(p, e)| e == 1 && p > 256), "nu = {nu}");
        let prod: Complex64 = f.iter().map(|&(p, _)| -t.r[p as usize] / 2.0).product();
        assert!((a - prod).norm() <= 1e-15 * prod.norm(), "nu = {nu}");
        composite += (f.len() > 1) as usize;
    }
    assert!(composite > 100);
}
