//! Mollifier coefficients `alpha`, `beta`, the mollifier `phi(s)` and the
//! weighted critical-line function `F(t)` built from them.

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::lfunc::LFunction;
use crate::specfun::summation::NeumaierComplex;
use crate::specfun::LogComplex;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

/// `alpha` lives on squarefree integers whose prime factors all exceed this.
pub const SUPPORT_PRIME_FLOOR: u64 = 256;
/// Exclusive upper bound on `delta`.
pub const DELTA_MAX: f64 = 0.1;
/// Default for the free constant `A` in `h1 = A / ln X`.
pub const DEFAULT_SCHEDULE_A: f64 = 10.0;

pub const MOLLIFIER_CSV_HEADER: &str = "nu,alpha_re,alpha_im,beta_re,beta_im";

#[derive(Debug, Clone, PartialEq)]
pub struct MollifierTable {
    pub x: f64,
    /// Ascending; `support[0] == 1`.
    pub support: Vec<u64>,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
}

impl MollifierTable {
    fn index(&self, nu: u64) -> Option<usize> {
        self.support.binary_search(&nu).ok()
    }

    pub fn alpha(&self, nu: u64) -> Complex64 {
        self.index(nu).map_or(Complex64::new(0.0, 0.0), |i| self.alpha[i])
    }

    pub fn beta(&self, nu: u64) -> Complex64 {
        self.index(nu).map_or(Complex64::new(0.0, 0.0), |i| self.beta[i])
    }

    /// True when only `nu = 1` carries weight.
    pub fn is_trivial(&self) -> bool {
        self.support.len() == 1
    }

    /// Entries `(nu, beta(nu))` with `beta(nu) != 0`.
    pub fn beta_support(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.support
            .iter()
            .zip(&self.beta)
            .filter(|(_, b)| b.norm() > 0.0)
            .map(|(&n, &b)| (n, b))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(MOLLIFIER_CSV_HEADER.split(','))?;
        for i in 0..self.support.len() {
            out.write_record([
                self.support[i].to_string(),
                format!("{:.17e}", self.alpha[i].re),
                format!("{:.17e}", self.alpha[i].im),
                format!("{:.17e}", self.beta[i].re),
                format!("{:.17e}", self.beta[i].im),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `(1 - ln nu / ln X)^+`.
fn taper(nu: u64, x: f64) -> f64 {
    (1.0 - (nu as f64).ln() / x.ln()).max(0.0)
}

/// Enumerates `alpha` on `nu <= X` by depth-first products of the primes in
/// `(256, X]`, then tapers to `beta`.
pub fn build_mollifier(table: &CoeffTable, x: f64) -> Result<MollifierTable> {
    if !(x >= 3.0) || !x.is_finite() {
        return Err(Error::Mollifier(format!("X = {x} must be a finite real >= 3")));
    }
    let limit = x.floor() as u64;
    if limit as usize > table.n_max {
        return Err(Error::Coverage {
            required: limit,
            available: table.n_max as u64,
        });
    }
    let primes: Vec<(u64, Complex64)> = primes_up_to(limit)
        .into_iter()
        .filter(|&p| p > SUPPORT_PRIME_FLOOR)
        .map(|p| (p, -table.r[p as usize] / 2.0))
        .filter(|(_, a)| a.norm() > 0.0)
        .collect();
    let mut entries = vec![(1u64, Complex64::new(1.0, 0.0))];
    let mut stack: Vec<(u64, Complex64, usize)> = vec![(1, Complex64::new(1.0, 0.0), 0)];
    while let Some((nu, a, start)) = stack.pop() {
        for (i, &(p, ap)) in primes.iter().enumerate().skip(start) {
            let Some(next) = nu.checked_mul(p).filter(|&v| v <= limit) else {
                break;
            };
            let an = a * ap;
            entries.push((next, an));
            stack.push((next, an, i + 1));
        }
    }
    entries.sort_by_key(|e| e.0);
    Ok(MollifierTable {
        x,
        support: entries.iter().map(|e| e.0).collect(),
        alpha: entries.iter().map(|e| e.1).collect(),
        beta: entries.iter().map(|e| e.1 * taper(e.0, x)).collect(),
    })
}

/// `phi(s) = sum beta(nu) nu^{-s}`.
pub fn phi(s: Complex64, m: &MollifierTable) -> Complex64 {
    let mut acc = NeumaierComplex::new();
    for (nu, b) in m.beta_support() {
        acc.add(b * (-s * (nu as f64).ln()).exp());
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub delta: f64,
    pub h1: f64,
    pub x: f64,
}

impl DetectorParams {
    pub fn new(delta: f64, h1: f64, x: f64) -> Result<Self> {
        let p = Self { delta, h1, x };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < DELTA_MAX) {
            return Err(Error::Mollifier(format!("delta = {} must lie in (0, {DELTA_MAX})", self.delta)));
        }
        if !(self.h1 > 0.0 && self.h1 < 1.0) {
            return Err(Error::Mollifier(format!("h1 = {} must lie in (0, 1)", self.h1)));
        }
        if !(self.x >= 3.0) || !self.x.is_finite() {
            return Err(Error::Mollifier(format!("X = {} must be a finite real >= 3", self.x)));
        }
        Ok(())
    }

    /// `ln(delta X^86 e^{1/h1})`.
    pub fn regime_log(&self) -> f64 {
        self.delta.ln() + 86.0 * self.x.ln() + 1.0 / self.h1
    }

    /// Set when `delta X^86 e^{1/h1} > 1`: allowed, but outside the regime in
    /// which the asymptotic bounds are stated.
    pub fn advisory(&self) -> bool {
        self.regime_log() > 0.0
    }
}

/// Parameters suggested by the asymptotic schedule for a height `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub t: f64,
    pub a: f64,
    pub delta: f64,
    pub x: f64,
    pub h1: f64,
    /// `X <= 256`: no primes in the support, so `phi == 1`.
    pub trivial_mollifier: bool,
    /// `delta < 1/10` and `h1 < 1` both hold.
    pub legal: bool,
}

/// `delta = 1/T`, `X = T^{1/100}`, `h1 = A / ln X`.
pub fn advisory_schedule(t: f64, a: f64) -> Result<Schedule> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("T = {t} must be a finite real > 1")));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("A = {a} must be positive")));
    }
    let x = t.powf(0.01);
    let h1 = a / x.ln();
    let delta = 1.0 / t;
    Ok(Schedule {
        t,
        a,
        delta,
        x,
        h1,
        trivial_mollifier: x < (SUPPORT_PRIME_FLOOR + 1) as f64,
        legal: delta < DELTA_MAX && h1 < 1.0,
    })
}

/// `F(t)` in log form together with the real rotated value
/// `theta^{-1/2} F(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorValue {
    pub t: f64,
    pub value: LogComplex,
    pub rotated: f64,
    /// Relative evaluation error inherited from `Lambda`.
    pub rel_error: f64,
}

/// `F(t) = (2 pi)^{-1/2} Lambda(1/2 + it) |phi(1/2 + it)|^2 e^{(pi/2 - delta) t}`.
pub fn frak_f(lf: &LFunction, m: &MollifierTable, p: &DetectorParams, t: f64) -> Result<DetectorValue> {
    let sample = lf.hardy_z(t)?;
    let ph = phi(Complex64::new(0.5, t), m).norm_sqr();
    // sample.z carries the factor e^{pi |t| / 2}
    let ln_factor = -0.5 * (2.0 * PI).ln() + (FRAC_PI_2 - p.delta) * t;
    let rotated = if ph == 0.0 {
        0.0
    } else {
        sample.z * (ln_factor - FRAC_PI_2 * t.abs() + ph.ln()).exp()
    };
    let value = if ph == 0.0 {
        LogComplex::ZERO
    } else {
        LogComplex::new(sample.lambda_log.ln_abs + ph.ln() + ln_factor, sample.lambda_log.arg)
    };
    Ok(DetectorValue {
        t,
        value,
        rotated,
        rel_error: sample.eval_error,
    })
}
