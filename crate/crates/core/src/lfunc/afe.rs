//! Smoothed approximate functional equation with a rotated split.
//!
//! With `c = 2 pi / sqrt(D)`, `w = s + (k-1)/2`, `w' = 1 - s + (k-1)/2` and
//! any `lambda > 0`, `|phi| < pi/2`,
//!
//! ```text
//! Lambda(s) = c^{-w}  sum r(n) n^{-s}      Gamma(w,  c n lambda e^{i phi})
//!           + theta c^{-w'} sum conj(r(n)) n^{s-1} Gamma(w', c n e^{-i phi} / lambda)
//! ```
//!
//! exactly. Choosing `phi` close to `sign(t) pi/2` keeps the individual
//! terms within a factor `exp(PHI_MARGIN)` of `|Lambda|`.

use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::specfun::summation::NeumaierComplex;
use crate::specfun::upper_incomplete_gamma;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// `pi/2 - |phi|` is at least `PHI_MARGIN / |t|`.
const PHI_MARGIN: f64 = 4.5;
/// Relative size of the certified tail at which a sum is cut.
const TAIL_EPS: f64 = 1e-17;
/// Rounding allowance per unit of absolute term mass.
const ROUNDING: f64 = 2e-15;

pub(crate) fn rotation(t: f64) -> f64 {
    let phi = (FRAC_PI_2 - PHI_MARGIN / t.abs()).max(0.0);
    phi.copysign(t)
}

/// One side of the split: `sum coeff(n) n^{-u} Gamma(a, c n rho e^{i psi})`
/// multiplied by `c^{-a} exp(-shift)`.
pub(crate) struct SideSum {
    pub value: Complex64,
    /// Certified tail plus rounding, same scaling as `value`.
    pub error: f64,
    pub terms: usize,
}

pub(crate) struct SideSpec {
    pub a: Complex64,
    pub u: Complex64,
    pub rho: f64,
    pub psi: f64,
    pub conjugate: bool,
    pub shift: f64,
}

pub(crate) fn side_sum(table: &CoeffTable, c: f64, spec: &SideSpec) -> Result<SideSum> {
    let (a, u) = (spec.a, spec.u);
    let cos_psi = spec.psi.cos();
    let rot = Complex64::from_polar(1.0, spec.psi);
    let ln_c = c.ln();
    // log of |c^{-a}| e^{-Im(a) psi} e^{-shift}: common factor of the bounds
    let ln_common = -a.re * ln_c - a.im * spec.psi - spec.shift;
    // |Gamma(a, R e^{i psi})| <= 2 R^{Re a - 1} e^{-a_im psi} e^{-R cos psi} / cos psi
    // once R >= 2 (Re a - 1) / cos psi; combined with |r(n)| <= tau(n) <= 2 sqrt(n)
    let r_min = (2.0 * (a.re - 1.0) / cos_psi).max(0.0);
    let ln_bound = |n: f64| {
        let big_r = c * n * spec.rho;
        (4.0f64 / cos_psi).ln() + 0.5 * n.ln() - u.re * n.ln() + (a.re - 1.0) * big_r.ln()
            - big_r * cos_psi
            + ln_common
    };
    let decay = (-c * spec.rho * cos_psi).exp();
    let pow = 0.5 - u.re + a.re - 1.0;
    let mut acc = NeumaierComplex::new();
    let mut mass = 0.0f64;
    let mut largest = 0.0f64;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        if c * nf * spec.rho >= r_min && largest > 0.0 {
            let q = decay * (1.0 + 1.0 / nf).powf(pow).max(1.0);
            if q < 1.0 {
                let tail = ln_bound(nf).exp() / (1.0 - q);
                if tail <= TAIL_EPS * largest {
                    return Ok(SideSum {
                        value: acc.value(),
                        error: tail + ROUNDING * mass,
                        terms: n - 1,
                    });
                }
            }
        }
        if n > table.n_max {
            let mut need = n;
            while need < 50 * table.n_max.max(1000) {
                let nf = need as f64;
                if ln_bound(nf).exp() <= TAIL_EPS * largest.max(f64::MIN_POSITIVE) {
                    break;
                }
                need += 1;
            }
            return Err(Error::Coverage {
                required: need as u64,
                available: table.n_max as u64,
            });
        }
        let r = if spec.conjugate { table.r[n].conj() } else { table.r[n] };
        if r != Complex64::new(0.0, 0.0) {
            let z = rot * (c * nf * spec.rho);
            let g = upper_incomplete_gamma(a, z)?;
            let ln_pref = -a * ln_c - u * nf.ln();
            let term = r * g.value * (ln_pref + g.log_scale - spec.shift).exp();
            if !term.re.is_finite() || !term.im.is_finite() {
                return Err(Error::LFunction(format!("non-finite term at n = {n}")));
            }
            acc.add(term);
            mass += term.norm();
            largest = largest.max(term.norm());
        }
        n += 1;
    }
}

/// Both sides of the split at `lambda`, returned separately so the root
/// number can be solved for.
pub(crate) fn split_sums(
    table: &CoeffTable,
    s: Complex64,
    lambda: f64,
    shift: f64,
) -> Result<(SideSum, SideSum)> {
    let k = table.weight() as f64;
    let c = 2.0 * std::f64::consts::PI / (table.level() as f64).sqrt();
    let half = (k - 1.0) / 2.0;
    let phi = rotation(s.im);
    let first = side_sum(
        table,
        c,
        &SideSpec {
            a: s + half,
            u: s,
            rho: lambda,
            psi: phi,
            conjugate: false,
            shift,
        },
    )?;
    let second = side_sum(
        table,
        c,
        &SideSpec {
            a: 1.0 - s + half,
            u: 1.0 - s,
            rho: 1.0 / lambda,
            psi: -phi,
            conjugate: true,
            shift,
        },
    )?;
    Ok((first, second))
}
