//! Complex log-gamma.
//!
//! [`log_gamma`] uses Stirling's series after an upward shift of the argument
//! and the reflection formula in the left half-plane. [`log_gamma_lanczos`] is
//! an independent Lanczos (g = 7, n = 9) evaluation used to cross-check it.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2j} / (2j (2j - 1)) for j = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const STIRLING_MIN_ABS: f64 = 15.0;

fn check_pole(s: Complex64) -> Result<()> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round() {
        return Err(Error::GammaPole(s.re));
    }
    Ok(())
}

/// Analytic continuation of `ln Gamma(s)` from the positive reals, with the
/// branch cut on the negative real axis (approached from above).
///
/// `exp(log_gamma(s)) == Gamma(s)`; the imaginary part is continuous in the
/// upper and lower half-planes separately.
pub fn log_gamma(s: Complex64) -> Result<Complex64> {
    check_pole(s)?;
    if s.re < 0.5 {
        return reflection(s);
    }
    Ok(stirling_shifted(s))
}

fn stirling_shifted(s: Complex64) -> Complex64 {
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < STIRLING_MIN_ABS {
        shift += z.ln();
        z += 1.0;
    }
    stirling(z) - shift
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series
}

/// Reflection `ln Gamma(s) = ln pi - ln sin(pi s) - ln Gamma(1 - s)`, with the
/// logarithm of the sine continued analytically through the upper half-plane.
fn reflection(s: Complex64) -> Result<Complex64> {
    if s.im < 0.0 {
        return reflection(s.conj()).map(|v| v.conj());
    }
    // For Im s >= 0: sin(pi s) = (i/2) e^{-i pi s} (1 - e^{2 pi i s}), and
    // |e^{2 pi i s}| <= 1 keeps the principal log of the last factor analytic.
    let i = Complex64::new(0.0, 1.0);
    let e = (i * 2.0 * PI * s).exp();
    let ln_sin = Complex64::new(-(2.0f64).ln(), PI / 2.0) - i * PI * s + (1.0 - e).ln();
    let reflected = stirling_shifted(1.0 - s);
    Ok(Complex64::new(PI.ln(), 0.0) - ln_sin - reflected)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation of `ln Gamma(s)` for `Re s >= 1/2`; the left
/// half-plane goes through the same reflection as [`log_gamma`].
pub fn log_gamma_lanczos(s: Complex64) -> Result<Complex64> {
    check_pole(s)?;
    if s.re < 0.5 {
        if s.im < 0.0 {
            return log_gamma_lanczos(s.conj()).map(|v| v.conj());
        }
        let i = Complex64::new(0.0, 1.0);
        let e = (i * 2.0 * PI * s).exp();
        let ln_sin = Complex64::new(-(2.0f64).ln(), PI / 2.0) - i * PI * s + (1.0 - e).ln();
        let reflected = log_gamma_lanczos(1.0 - s)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin - reflected);
    }
    let z = s - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(HALF_LN_2PI + (z + 0.5) * t.ln() - t + x.ln())
}

/// `Gamma(s)` through the Lanczos sum.
pub fn gamma_lanczos(s: Complex64) -> Result<Complex64> {
    log_gamma_lanczos(s).map(|v| v.exp())
}
