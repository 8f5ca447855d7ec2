//! Bessel functions of the first kind for integer order.

use crate::specfun::quad::{integrate, QuadratureSpec, Upper};
use std::f64::consts::PI;

/// `J_m(x)` for integer `m >= 0` and `x >= 0`.
///
/// Regimes: ascending series where it does not cancel, the Hankel asymptotic
/// expansion for `x >= 35 + m^2 / 2`, and Miller's backward recurrence
/// normalised by `J_0 + 2 sum J_{2k} = 1` in between.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j requires x >= 0");
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mf = m as f64;
    if x <= 5.0 || x * x / 4.0 < mf + 1.0 {
        series(m, x)
    } else if x >= 35.0 + mf * mf / 2.0 {
        hankel(m, x)
    } else {
        miller(m, x)
    }
}

fn series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for j in 1..=m {
        lead *= half / j as f64;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    loop {
        term *= q / (j * (j + m as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || j > 500.0 {
            break;
        }
        j += 1.0;
    }
    lead * sum
}

fn hankel(m: u32, x: f64) -> f64 {
    let mu = 4.0 * (m as f64) * (m as f64);
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for j in 1..60 {
        let odd = (2 * j - 1) as f64;
        a *= (mu - odd * odd) * inv8x / j as f64;
        if a.abs() > prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        // P takes even j with alternating signs, Q the odd ones
        match j % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let c = (0.5 * m as f64 + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sc, cc) = c.sin_cos();
    let cos_chi = cx * cc + sx * sc;
    let sin_chi = sx * cc - cx * sc;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

fn miller(m: u32, x: f64) -> f64 {
    let top = (m as f64).max(x);
    let mut n = (top + 30.0 + (50.0 * top).sqrt()) as usize;
    n += n % 2;
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut norm = 0.0;
    let mut target = 0.0;
    for k in (1..=n).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds the unnormalised J_{k-1}
        if k - 1 == m as usize {
            target = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            jp1 *= 1e-250;
            j *= 1e-250;
            norm *= 1e-250;
            target *= 1e-250;
        }
    }
    norm += j;
    target / norm
}

/// `(1/pi) int_0^pi cos(m tau - x sin tau) d tau` by adaptive quadrature; an
/// independent check on [`bessel_j`].
pub fn bessel_j_integral(m: u32, x: f64) -> f64 {
    let spec = QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_subdivisions: 20_000,
    };
    let f = |tau: f64| (m as f64 * tau - x * tau.sin()).cos();
    integrate(f, 0.0, Upper::Finite(PI), &spec)
        .map(|r| r.value / PI)
        .unwrap_or(f64::NAN)
}
