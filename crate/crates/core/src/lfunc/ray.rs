//! Second evaluator: Mellin integrals of the theta series along rotated rays.
//!
//! `Lambda(s) = e^{i phi w} int_lambda^inf Theta(rho e^{i phi}) rho^{w-1} d rho
//!   + theta e^{-i phi w'} int_{1/lambda}^inf conj-Theta(rho e^{-i phi}) rho^{w'-1} d rho`
//! with `Theta(x) = sum a(n) e^{-c n x}`. No incomplete gamma values are used.

use super::afe::rotation;
use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::specfun::quad::{integrate_complex, QuadratureSpec, Upper};
use num_complex::Complex64;

/// `sum a(n) e^{-c n x}` (or with conjugated coefficients), cut where the
/// `tau(n) n^{(k-1)/2}`-majorised tail is below `1e-18` of the running max.
fn theta_series(table: &CoeffTable, c: f64, x: Complex64, conjugate: bool) -> Result<Complex64> {
    let k = table.weight() as f64;
    let step = (-c * x).exp();
    let decay = c * x.re;
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut largest = 0.0f64;
    for n in 1..=table.n_max {
        z *= step;
        let nf = n as f64;
        let a = if conjugate { table.a[n].conj() } else { table.a[n] };
        let term = a * z;
        acc += term;
        largest = largest.max(term.norm());
        let bound = 2.0 * nf.powf(0.5 + (k - 1.0) / 2.0) * (-decay * nf).exp();
        if nf * decay > 1.0 + (k - 1.0) && bound / (1.0 - (-decay).exp()) < 1e-18 * largest {
            return Ok(acc);
        }
    }
    Err(Error::Coverage {
        required: (table.n_max as f64 * 2.0) as u64,
        available: table.n_max as u64,
    })
}

/// `exp(-shift) Lambda(s)` by quadrature, at relative tolerance `rel_tol`.
pub(crate) fn completed_ray(
    table: &CoeffTable,
    theta: Complex64,
    s: Complex64,
    shift: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    let k = table.weight() as f64;
    let c = 2.0 * std::f64::consts::PI / (table.level() as f64).sqrt();
    let half = (k - 1.0) / 2.0;
    let phi = rotation(s.im);
    let lambda = 1.0;
    let side = |a: Complex64, rho0: f64, psi: f64, conjugate: bool| -> Result<Complex64> {
        let rot = Complex64::from_polar(1.0, psi);
        let pref = Complex64::new(0.0, psi) * a - shift;
        let integrand = |rho: f64| -> Complex64 {
            let th = theta_series(table, c, rot * rho, conjugate).unwrap_or(Complex64::new(f64::NAN, 0.0));
            th * ((a - 1.0) * rho.ln() + pref).exp()
        };
        let scale = integrand(rho0).norm().max(1e-300) / (c * psi.cos());
        let spec = QuadratureSpec {
            abs_tol: rel_tol * 1e-3 * scale,
            rel_tol,
            max_subdivisions: 20_000,
        };
        let r = integrate_complex(
            integrand,
            rho0,
            Upper::Infinite {
                decay_rate: c * psi.cos(),
            },
            &spec,
        )?;
        if !r.value.re.is_finite() {
            return Err(Error::LFunction("theta series needs more coefficients".into()));
        }
        Ok(r.value)
    };
    let first = side(s + half, lambda, phi, false)?;
    let second = side(1.0 - s + half, 1.0 / lambda, -phi, true)?;
    Ok(first + theta * second)
}
