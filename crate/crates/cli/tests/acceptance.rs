//! Acceptance run: one line per criterion, `PASS` or `FAIL`, with the
//! measured quantities. The process fails on any outcome other than the one
//! recorded in `EXPECTED_FAIL`.

use critline::arith::{factorize, primes_up_to, tau_t_from_factors, ArithCache};
use critline::detector::{detect_intervals, lemma1_truncated_check, Flag};
use critline::forms::{build_coeff_table, expand_eta_product, reconstruct_exact, CoeffTable, FormSource, FormSpec};
use critline::lfunc::LFunction;
use critline::mollifier::{build_mollifier, DetectorParams};
use critline::sums::*;
use critline::voronoi::{bessel_mellin_check, twisted_identity_check, KernelShape, TestKernel};
use critline::Complex64;
use std::f64::consts::PI;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

/// The printed mean-square kernel is missing the weight factors for `k > 1`;
/// the inequalities fail for the weight-12 form by ten orders of magnitude.
const EXPECTED_FAIL: &[u32] = &[6];

const N_MAX: usize = 100_000;

fn delta_table() -> &'static CoeffTable {
    static T: OnceLock<CoeffTable> = OnceLock::new();
    T.get_or_init(|| build_coeff_table(&FormSpec::delta(), N_MAX).unwrap())
}

fn f23_table() -> &'static CoeffTable {
    static T: OnceLock<CoeffTable> = OnceLock::new();
    T.get_or_init(|| build_coeff_table(&FormSpec::f23(), N_MAX).unwrap())
}

fn delta_l() -> &'static LFunction {
    static L: OnceLock<LFunction> = OnceLock::new();
    L.get_or_init(|| LFunction::new(delta_table().clone()).unwrap())
}

fn f23_l() -> &'static LFunction {
    static L: OnceLock<LFunction> = OnceLock::new();
    L.get_or_init(|| LFunction::new(f23_table().clone()).unwrap())
}

type Outcome = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed.as_secs_f64() < limit_s as f64
}

fn c1_coefficients() -> Outcome {
    let start = Instant::now();
    let cache = ArithCache::new(N_MAX);
    let mut mismatches = 0usize;
    let mut deligne_worst: f64 = 0.0;
    for form in [FormSpec::delta(), FormSpec::f23()] {
        let FormSource::EtaProduct(factors) = &form.source else {
            return Err("built-in forms are eta products".into());
        };
        let eta = expand_eta_product(factors, N_MAX).map_err(err)?;
        let primes: Vec<(u64, i128)> = primes_up_to(N_MAX as u64).into_iter().map(|p| (p, eta[p as usize])).collect();
        let hecke = reconstruct_exact(&primes, &form, N_MAX).map_err(err)?;
        mismatches += (1..=N_MAX).filter(|&n| eta[n] != hecke[n]).count();
        let half = (form.weight as f64 - 1.0) / 2.0;
        for n in 1..=N_MAX {
            let r = eta[n] as f64 / (n as f64).powf(half);
            deligne_worst = deligne_worst.max(r.abs() / cache.tau(n) as f64);
        }
    }
    let el = start.elapsed();
    Ok((
        mismatches == 0 && deligne_worst <= 1.0 + 1e-12 && within(el, 30),
        format!("mismatches {mismatches}, max |r(n)|/tau(n) = {deligne_worst:.6}, {:.1} s", el.as_secs_f64()),
    ))
}

/// `|Lambda(s) - theta conj(Lambda(1 - conj s))| / max`, on the common scale
/// `e^{-pi |t| / 2}`.
fn fe_residual(lf: &LFunction, sigma: f64, t: f64) -> Result<f64, String> {
    let a = lf.completed(Complex64::new(sigma, t)).map_err(err)?.value;
    let b = lf.completed(Complex64::new(1.0 - sigma, t)).map_err(err)?.value.conj();
    let shift = -PI / 2.0 * t.abs();
    let (a, b) = (a.to_complex_scaled(shift), b.to_complex_scaled(shift));
    Ok((a - lf.root_number() * b).norm() / a.norm().max(b.norm()))
}

fn c2_functional_equation() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for lf in [delta_l(), f23_l()] {
        for sigma in [0.3, 0.5, 0.7] {
            for t in 0..=30 {
                worst = worst.max(fe_residual(lf, sigma, t as f64)?);
            }
        }
    }
    let el = start.elapsed();
    Ok((
        worst < 1e-8 && within(el, 120),
        format!("max relative residual {worst:.2e} over 186 points, {:.1} s", el.as_secs_f64()),
    ))
}

fn c3_reality() -> Outcome {
    let mut worst: f64 = 0.0;
    for lf in [delta_l(), f23_l()] {
        let rot = lf.root_number().sqrt().inv();
        for t in 0..=30 {
            let t = t as f64;
            let v = lf.completed(Complex64::new(0.5, t)).map_err(err)?.value;
            let z = v.to_complex_scaled(-PI / 2.0 * t) * rot;
            worst = worst.max(z.im.abs() / z.norm());
        }
    }
    Ok((worst <= 1e-8, format!("max |Im|/|Lambda| = {worst:.2e} on t = 0..30, both forms")))
}

fn c4_zero_accounting() -> Outcome {
    let start = Instant::now();
    let lf = delta_l();
    let rep = lf.count_zeros(40.0).map_err(err)?;
    let mut worst: f64 = 0.0;
    for g in &rep.ordinates {
        let q = lf.refine_by_quadrature(*g, 1e-5, 1e-11).map_err(err)?;
        worst = worst.max((q - g).abs());
    }
    let el = start.elapsed();
    Ok((
        rep.count_signs as i64 == rep.count_argument && worst < 1e-6 && within(el, 300),
        format!(
            "{} sign changes, N(T) = {}, max ordinate gap between methods {worst:.1e}, {:.1} s",
            rep.count_signs,
            rep.count_argument,
            el.as_secs_f64()
        ),
    ))
}

fn detector_params() -> DetectorParams {
    DetectorParams::new(0.05, 0.3, 300.0).unwrap()
}

fn c5_detector() -> Outcome {
    let lf = delta_l();
    let m = build_mollifier(lf.table(), 300.0).map_err(err)?;
    let p = detector_params();
    let rep = detect_intervals(lf, &m, &p, 40.0, 0.3 / 4.0).map_err(err)?;
    let determinate = rep.records.iter().all(|r| r.flag != Flag::Indeterminate);
    let sound = rep.records.iter().filter(|r| r.i1 >= r.i2 - r.quad_error).count();
    let e1 = rep.e1_points().count();
    Ok((
        rep.all_e1_confirmed() && rep.n0_bound <= rep.direct_sign_changes as f64 && determinate && sound == rep.records.len(),
        format!(
            "{e1} E1 points all confirmed: {}, N0 bound {} <= direct {}, I1 >= I2 - eps at {sound}/{} points",
            rep.all_e1_confirmed(),
            rep.n0_bound,
            rep.direct_sign_changes,
            rep.records.len()
        ),
    ))
}

fn c6_lemma1() -> Outcome {
    let lf = delta_l();
    let m = build_mollifier(lf.table(), 300.0).map_err(err)?;
    let rep = lemma1_truncated_check(lf, &m, &detector_params(), 20.0, None, 1e-6).map_err(err)?;
    let (p1, p2) = rep.holds(&rep.printed);
    let (c1, c2) = rep.holds(&rep.corrected);
    Ok((
        p1 && p2,
        format!(
            "LHS1 {:.4e}, LHS2 {:.4e}; printed kernel RHS1 {:.4e} (tail {:.1e}) holds {p1}, RHS2 {:.4e} holds {p2}; \
             weight-corrected RHS1 {:.4e} (tail {:.1e}) holds {c1}, RHS2 {:.4e} holds {c2}",
            rep.lhs1,
            rep.lhs2,
            rep.printed.rhs1,
            rep.printed.tail1,
            rep.printed.rhs2,
            rep.corrected.rhs1,
            rep.corrected.tail1,
            rep.corrected.rhs2
        ),
    ))
}

fn c7_selberg() -> Outcome {
    let t = delta_table();
    let mut worst: f64 = 0.0;
    for x in [300.0, 600.0] {
        let m = build_mollifier(t, x).map_err(err)?;
        for th in [0.0, 0.1, 0.25] {
            let a = selberg_sum(th, t, &m).map_err(err)?.value;
            let b = selberg_sum_decomposed(th, t, &m).map_err(err)?.value;
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    let mut moebius_bad = 0;
    for q in 1..=5000u64 {
        let (a, b) = moebius_inversion_check(q, |n| (n * n % 1009) as i64 - 500).map_err(err)?;
        moebius_bad += usize::from(a != b);
    }
    Ok((
        worst <= 1e-10 && moebius_bad == 0,
        format!("max relative gap {worst:.2e} over 6 cases; Moebius mismatches {moebius_bad} for q <= 5000"),
    ))
}

fn c8_kfactor() -> Outcome {
    let t = delta_table();
    let support = build_mollifier(t, N_MAX as f64).map_err(err)?.support;
    let grid = [
        Complex64::new(0.5, 0.0),
        Complex64::new(0.5, 14.0),
        Complex64::new(0.75, -3.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 7.5),
    ];
    let (mut worst, mut tau_bad, mut count) = (0.0f64, 0usize, 0usize);
    for s in grid {
        for &m in &support[1..] {
            let k = k_factor(t, m, s, K_MAX_TERMS).map_err(err)?;
            worst = worst.max(k.discrepancy() / k.method_a.norm().max(1.0));
            tau_bad += usize::from(k.method_a.norm() > tau_t_from_factors(&factorize(m), 6) as f64);
            count += 1;
        }
    }
    Ok((
        worst <= 1e-10 && tau_bad == 0,
        format!("{count} (m, s) pairs, max A/B gap {worst:.2e}, tau_6 violations {tau_bad}"),
    ))
}

fn c9_rankin() -> Outcome {
    let t = delta_table();
    let full = rankin_mean(t, 100_000).map_err(err)?;
    let half = rankin_mean(t, 50_000).map_err(err)?;
    let drift = (half - full).abs() / full;
    Ok((full > 0.0 && drift < 0.05, format!("mean(1e5) = {full:.6}, mean(5e4) = {half:.6}, drift {drift:.2e}")))
}

fn c10_voronoi() -> Outcome {
    let bump = |u1| TestKernel::new(KernelShape::ExpBump, 1.0, u1).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for (table, u1, configs) in [
        (delta_table(), 400.0, vec![(1i64, 1u64), (1, 2), (1, 4)]),
        (f23_table(), 20_000.0, vec![(1, 23), (3, 46), (-3, 46)]),
    ] {
        for (a, q) in configs {
            let v = twisted_identity_check(a, q, &bump(u1), table, 1e-6).map_err(err)?;
            ok &= v.passes(1e-6);
            lines.push(format!("{} q={q} a={a}: {:.1e}", table.form.id, v.residual()));
        }
    }
    for (a, b, k, h) in [(1.0, 1.0, 1u32, 20_000.0), (4.0, 1.0, 2, 1_000.0), (1.0, 2.0, 12, 50.0)] {
        let r = bessel_mellin_check(a, b, k, 1.0, h, 1e-8).map_err(err)?;
        let d = r.discrepancy.unwrap();
        ok &= d < 1e-6;
        lines.push(format!("Bessel (a={a}, b={b}, k={k}): {d:.1e}"));
    }
    Ok((ok, lines.join("; ")))
}

fn c11_shifted() -> Outcome {
    let t = delta_table();
    let configs = [
        (10_000u64, 1u64, 1u64, 1u64),
        (10_000, 1, 1, 2),
        (20_000, 1, 1, 7),
        (30_000, 2, 3, 1),
        (12_000, 3, 7, 5),
        (18_000, 5, 2, 4),
        (350, 257, 1, 3),
        (40_000, 1, 2, 1),
        (25_000, 3, 1, 11),
        (15_000, 7, 5, 2),
    ];
    let (mut exact, mut max_ratio) = (0, 0.0f64);
    for (n, m1, m2, l) in configs {
        let s = shifted_convolution(n, m1, m2, l, t).map_err(err)?;
        exact += usize::from(s.forward.re.to_bits() == s.bucketed.re.to_bits() && s.forward.im.to_bits() == s.bucketed.im.to_bits());
        max_ratio = max_ratio.max(s.cancellation_ratio());
    }
    let mut sweep = Vec::new();
    let mut n = 1_000u64;
    while n <= 64_000 {
        let s = shifted_convolution(n, 1, 1, 1, t).map_err(err)?;
        sweep.push(format!("{n}:{:.3}", s.forward.norm() / (n as f64).powf(10.0 / 11.0)));
        n *= 2;
    }
    Ok((
        exact == configs.len() && max_ratio < 1.0,
        format!("{exact}/10 bitwise equal, max |S|/sum|terms| {max_ratio:.3e}; |S|/N^(10/11) sweep {}", sweep.join(" ")),
    ))
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let cache = dir.path().join("cache");
    let run = |name: &str| -> Result<(Option<i32>, Vec<(String, Vec<u8>)>), String> {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_critline"))
            .args(["verify", "--out-dir", out.to_str().unwrap()])
            .env("CRITLINE_CACHE_DIR", &cache)
            .output()
            .map_err(err)?;
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
            .map_err(err)?
            .filter_map(|e| e.ok())
            .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
            .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
            .collect();
        files.sort();
        Ok((o.status.code(), files))
    };
    let (code_a, a) = run("first")?;
    let (code_b, b) = run("second")?;
    let same = a == b && code_a == code_b;
    Ok((
        same && !a.is_empty() && code_a.is_some_and(|c| c <= 1),
        format!("{} CSV files, identical: {same}, exit codes {code_a:?} and {code_b:?}", a.len()),
    ))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "coefficient exactness", c1_coefficients),
        (2, "functional equation", c2_functional_equation),
        (3, "critical-line reality", c3_reality),
        (4, "zero accounting", c4_zero_accounting),
        (5, "detector soundness", c5_detector),
        (6, "mean-square inequalities", c6_lemma1),
        (7, "Selberg-sum identity", c7_selberg),
        (8, "K-factor equivalence", c8_kfactor),
        (9, "Rankin stability", c9_rankin),
        (10, "summation identities", c10_voronoi),
        (11, "shifted convolution", c11_shifted),
        (12, "determinism", c12_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let status = if pass { "PASS" } else { "FAIL" };
        let known = EXPECTED_FAIL.contains(&id);
        let note = if known { " [known failure]" } else { "" };
        println!(
            "criterion {id:>2} {status} {name}{note}: {detail} ({:.1} s)",
            start.elapsed().as_secs_f64()
        );
        if pass == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
