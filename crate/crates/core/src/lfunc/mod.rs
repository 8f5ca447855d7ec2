//! The completed L-function `Lambda(s) = c^{-s-(k-1)/2} Gamma(s + (k-1)/2) L(s)`,
//! `c = 2 pi / sqrt(D)`, its root number, the rotated critical-line function
//! and zero counting.
//!
//! Values of `Lambda` are returned as [`LogComplex`] so the exponential decay
//! along vertical lines never underflows.

mod afe;
mod ray;
mod zeros;

pub use zeros::{ZeroRecord, ZeroReport, ZERO_CSV_HEADER};

use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::specfun::{log_gamma, LogComplex};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Default probe for the root number.
const PROBE: Complex64 = Complex64::new(0.6, 1.3);
const PROBE_TOL: f64 = 1e-8;

/// A value of `Lambda` with its estimated relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletedValue {
    pub value: LogComplex,
    pub rel_error: f64,
    pub terms: usize,
}

/// `L(s)` with an absolute error bound and the route taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LValue {
    pub value: Complex64,
    pub error: f64,
    pub method: LMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LMethod {
    /// Plain partial sum of the Dirichlet series with a certified tail.
    Direct { terms: usize },
    /// Smoothed approximate functional equation.
    Smoothed { terms: usize },
}

/// One point of the rotated critical-line function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSample {
    pub t: f64,
    pub lambda_log: LogComplex,
    /// `Re(theta^{-1/2} Lambda(1/2 + it)) e^{pi |t| / 2}`.
    pub z: f64,
    /// Bound on `|Im(theta^{-1/2} Lambda)| / |Lambda|` and on the relative
    /// evaluation error.
    pub eval_error: f64,
}

/// An L-function ready for evaluation: coefficients plus root number.
#[derive(Debug, Clone)]
pub struct LFunction {
    table: Arc<CoeffTable>,
    theta: Complex64,
    theta_inv_sqrt: Complex64,
}

fn shift_for(s: Complex64) -> f64 {
    -PI / 2.0 * s.im.abs()
}

impl LFunction {
    /// Computes the root number from the coefficients, then builds the
    /// evaluator.
    pub fn new(table: CoeffTable) -> Result<Self> {
        let theta = root_number(&table)?;
        Self::with_root_number(table, theta)
    }

    pub fn with_root_number(table: CoeffTable, theta: Complex64) -> Result<Self> {
        let table = table.with_root_number(theta)?;
        Ok(Self {
            table: Arc::new(table),
            theta,
            theta_inv_sqrt: theta.inv().sqrt(),
        })
    }

    pub fn table(&self) -> &CoeffTable {
        &self.table
    }

    pub fn root_number(&self) -> Complex64 {
        self.theta
    }

    /// `c = 2 pi / sqrt(D)`.
    pub fn scale(&self) -> f64 {
        2.0 * PI / (self.table.level() as f64).sqrt()
    }

    /// `Lambda(s) e^{pi |Im s| / 2}` with its absolute error in that scaling.
    fn completed_scaled(&self, s: Complex64) -> Result<(Complex64, f64, usize)> {
        let (a, b) = afe::split_sums(&self.table, s, 1.0, shift_for(s))?;
        let v = a.value + self.theta * b.value;
        Ok((v, a.error + b.error, a.terms + b.terms))
    }

    /// `Lambda(s)` by the smoothed approximate functional equation.
    pub fn completed(&self, s: Complex64) -> Result<CompletedValue> {
        let (v, err, terms) = self.completed_scaled(s)?;
        Ok(CompletedValue {
            value: LogComplex::from_scaled(shift_for(s), v),
            rel_error: err / v.norm(),
            terms,
        })
    }

    /// `Lambda(s)` by quadrature of the theta series along rotated rays, an
    /// evaluation route independent of [`LFunction::completed`].
    pub fn completed_by_quadrature(&self, s: Complex64, rel_tol: f64) -> Result<LogComplex> {
        let v = ray::completed_ray(&self.table, self.theta, s, shift_for(s), rel_tol)?;
        Ok(LogComplex::from_scaled(shift_for(s), v))
    }

    /// `ln(c^{-w} Gamma(w))`, `w = s + (k-1)/2`.
    pub fn ln_gamma_factor(&self, s: Complex64) -> Result<Complex64> {
        let w = s + (self.table.weight() as f64 - 1.0) / 2.0;
        Ok(log_gamma(w)? - w * self.scale().ln())
    }

    /// `L(s)`. For `Re s > 1` the plain partial sum over the first
    /// `min(max_terms, n_max)` coefficients is used when its certified tail
    /// is below `tol`; otherwise `Lambda(s)` is divided by its gamma factor.
    pub fn l_value(&self, s: Complex64, max_terms: usize, tol: f64) -> Result<LValue> {
        if s.re > 1.0 {
            let n = max_terms.min(self.table.n_max);
            let tail = divisor_tail(n as f64, s.re);
            if tail <= tol {
                let mut acc = crate::specfun::summation::NeumaierComplex::new();
                for m in 1..=n {
                    acc.add(self.table.r[m] * (-s * (m as f64).ln()).exp());
                }
                return Ok(LValue {
                    value: acc.value(),
                    error: tail,
                    method: LMethod::Direct { terms: n },
                });
            }
        }
        let lam = self.completed(s)?;
        let ln_g = self.ln_gamma_factor(s)?;
        let ln_l = Complex64::new(lam.value.ln_abs, lam.value.arg) - ln_g;
        let value = ln_l.exp();
        let error = lam.rel_error * value.norm() + 1e-14 * value.norm();
        if error > tol {
            return Err(Error::LFunction(format!(
                "L({s}) error estimate {error:e} exceeds tolerance {tol:e}"
            )));
        }
        Ok(LValue {
            value,
            error,
            method: LMethod::Smoothed { terms: lam.terms },
        })
    }

    /// Rotated critical-line function at height `t`.
    pub fn hardy_z(&self, t: f64) -> Result<LineSample> {
        let s = Complex64::new(0.5, t);
        let (v, err, _) = self.completed_scaled(s)?;
        let rotated = self.theta_inv_sqrt * v;
        let imag_ratio = rotated.im.abs() / v.norm();
        Ok(LineSample {
            t,
            lambda_log: LogComplex::from_scaled(shift_for(s), v),
            z: rotated.re,
            eval_error: imag_ratio.max(err / v.norm()),
        })
    }

    /// Rotated critical-line function from the quadrature evaluator.
    pub fn hardy_z_by_quadrature(&self, t: f64, rel_tol: f64) -> Result<f64> {
        let s = Complex64::new(0.5, t);
        let v = ray::completed_ray(&self.table, self.theta, s, shift_for(s), rel_tol)?;
        Ok((self.theta_inv_sqrt * v).re)
    }
}

/// Certified bound on `sum_{n > N} tau(n) n^{-sigma}` for `sigma > 1`, from
/// `sum_{n <= x} tau(n) <= x (ln x + 1)` and partial summation.
pub fn divisor_tail(n: f64, sigma: f64) -> f64 {
    let n = n.max(1.0);
    let e = sigma - 1.0;
    sigma * n.powf(-e) * ((n.ln() + 1.0) / e + 1.0 / (e * e))
}

/// Root number `theta` of `Lambda(s) = theta conj(Lambda(1 - conj s))`.
///
/// The split identity holds for every `lambda`, so two splits give
/// `theta = (A(lambda_1) - A(lambda_2)) / (B(lambda_2) - B(lambda_1))`.
/// The value is confirmed at three probes and against the functional
/// equation itself.
pub fn root_number(table: &CoeffTable) -> Result<Complex64> {
    let mut last_err = None;
    for shift in [0.0, 0.37, 0.91] {
        match root_number_at(table, PROBE + Complex64::new(0.0, shift)) {
            Ok(theta) => return Ok(theta),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::LFunction("root number probes failed".into())))
}

fn theta_from_splits(table: &CoeffTable, s: Complex64) -> Result<Complex64> {
    let shift = shift_for(s);
    let (a1, b1) = afe::split_sums(table, s, 1.0, shift)?;
    let (a2, b2) = afe::split_sums(table, s, 1.35, shift)?;
    let den = b2.value - b1.value;
    if den.norm() < 1e-6 * (b1.value.norm() + b2.value.norm()) {
        return Err(Error::LFunction(format!("degenerate root-number probe at {s}")));
    }
    Ok((a1.value - a2.value) / den)
}

fn root_number_at(table: &CoeffTable, s0: Complex64) -> Result<Complex64> {
    let probes = [s0, s0 + Complex64::new(0.0, 1.0), s0 + Complex64::new(0.0, 2.0)];
    let mut thetas = Vec::with_capacity(3);
    for s in probes {
        thetas.push(theta_from_splits(table, s)?);
    }
    let theta = thetas[0];
    for t in &thetas[1..] {
        if (t - theta).norm() > PROBE_TOL {
            return Err(Error::LFunction(format!(
                "root number unstable across probes: {theta} vs {t}"
            )));
        }
    }
    if (theta.norm() - 1.0).abs() > PROBE_TOL {
        return Err(Error::LFunction(format!("root number {theta} is not unimodular")));
    }
    // functional-equation confirmation at the first probe
    let lf = LFunction::with_root_number(table.clone(), theta)?;
    let a = lf.completed(s0)?;
    let b = lf.completed(Complex64::new(1.0 - s0.re, s0.im))?;
    if a.value.abs() < 1e-6 * (-PI / 2.0 * s0.im.abs()).exp() {
        return Err(Error::LFunction(format!("probe {s0} too close to a zero")));
    }
    let ratio = a.value.mul(&b.value.conj().recip()).to_complex();
    if (ratio - theta).norm() > PROBE_TOL {
        return Err(Error::LFunction(format!(
            "functional equation ratio {ratio} disagrees with root number {theta}"
        )));
    }
    Ok(theta)
}
