//! Sign-change detection through window integrals of the weighted
//! critical-line function, the lower bound on the number of odd-order zeros,
//! and the mean-square machinery `G(y)`, `J(x, theta)`.
//!
//! Window integrals are assembled from per-cell adaptive integrals of
//! `(F, |F|)` over a grid aligned with the detection grid; every zero
//! ordinate found by the critical-line scan is a breakpoint, so `|F|` is
//! smooth on each quadrature panel.

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::lfunc::LFunction;
use crate::mollifier::{frak_f, DetectorParams, MollifierTable};
use crate::specfun::quad::{integrate_complex_with, integrate_with, QuadratureSpec, Upper};
use crate::specfun::summation::{Neumaier, NeumaierComplex};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

pub const DETECTION_CSV_HEADER: &str = "t,I1,I2,flag,confirmations";
pub const G_PROFILE_CSV_HEADER: &str = "y,G,majorant,tail_bound";

/// Relative strictness margin for `I1 > I2`.
pub const EPS_DET: f64 = 1e-6;
/// Half-width of the bracket used to re-verify a sign change of `F`.
const BRACKET: f64 = 1e-8;

fn cell_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-10,
        max_subdivisions: 400,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    E1,
    E2,
    /// Quadrature failed; excluded from the measure of `E1`.
    Indeterminate,
}

impl Flag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::E1 => "E1",
            Flag::E2 => "E2",
            Flag::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRecord {
    pub t: f64,
    pub i1: f64,
    pub i2: f64,
    /// Summed quadrature error of both window integrals.
    pub quad_error: f64,
    pub flag: Flag,
    /// Verified sign changes of the rotated `F` in `(t - h1, t + h1)`.
    pub confirmations: usize,
}

/// Truncated quantities of the chain `I3 <= I1(E1) + I2` and its two
/// Cauchy-Schwarz steps, all as Riemann sums over the detection grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetReport {
    pub i3: f64,
    pub i1_on_e1: f64,
    pub i2_total: f64,
    pub i1_square: f64,
    pub i2_square: f64,
    /// `mu(E1)^{1/2} (sum I1^2)^{1/2}`, an upper bound for `i1_on_e1`.
    pub cs_e1: f64,
    /// `(T - 1)^{1/2} (sum I2^2)^{1/2}`, an upper bound for `i2_total`.
    pub cs_i2: f64,
}

impl BudgetReport {
    /// `I3 <= I1(E1) + I2` up to the strictness margin of the flags.
    pub fn split_holds(&self, margin: f64) -> bool {
        self.i3 <= self.i1_on_e1 + self.i2_total + margin
    }

    pub fn cauchy_schwarz_holds(&self) -> bool {
        let slack = 1e-12 * (self.cs_e1 + self.cs_i2);
        self.i1_on_e1 <= self.cs_e1 + slack && self.i2_total <= self.cs_i2 + slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub params: DetectorParams,
    pub t_max: f64,
    pub step: f64,
    pub records: Vec<DetectionRecord>,
    pub mu_e1: f64,
    pub n0_bound: f64,
    /// Sign changes of `Z` on `(0, T)` from the critical-line scan.
    pub direct_sign_changes: usize,
    pub budget: BudgetReport,
}

impl DetectionReport {
    pub fn e1_points(&self) -> impl Iterator<Item = &DetectionRecord> {
        self.records.iter().filter(|r| r.flag == Flag::E1)
    }

    pub fn all_e1_confirmed(&self) -> bool {
        self.e1_points().all(|r| r.confirmations >= 1)
    }

    /// Direct count minus the lower bound.
    pub fn slack(&self) -> f64 {
        self.direct_sign_changes as f64 - self.n0_bound
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(DETECTION_CSV_HEADER.split(','))?;
        for r in &self.records {
            out.write_record([
                format!("{:.17e}", r.t),
                format!("{:.17e}", r.i1),
                format!("{:.17e}", r.i2),
                r.flag.as_str().to_string(),
                r.confirmations.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Cumulative integrals of `(F, |F|)` over consecutive cells of a uniform
/// grid starting at `origin`.
struct CellIntegrals {
    /// `(integral of F, integral of |F|, error)` per cell, `None` on failure.
    cells: Vec<Option<(f64, f64, f64)>>,
}

impl CellIntegrals {
    fn build(
        lf: &LFunction,
        m: &MollifierTable,
        p: &DetectorParams,
        origin: f64,
        width: f64,
        count: usize,
        zeros: &[f64],
    ) -> Self {
        let f = |t: f64| frak_f(lf, m, p, t).map_or(Complex64::new(f64::NAN, f64::NAN), |v| {
            Complex64::new(v.rotated, v.rotated.abs())
        });
        let spec = cell_spec();
        let cells = (0..count)
            .map(|i| {
                let a = origin + i as f64 * width;
                let b = a + width;
                let breaks: Vec<f64> = zeros.iter().copied().filter(|&z| z > a && z < b).collect();
                integrate_complex_with(&f, a, Upper::Finite(b), &breaks, &spec)
                    .ok()
                    .map(|r| (r.value.re, r.value.im, r.error))
            })
            .collect();
        Self { cells }
    }

    /// `(I1, I2, error)` over cells `[first, first + n)`.
    fn window(&self, first: usize, n: usize) -> Option<(f64, f64, f64)> {
        let mut signed = Neumaier::new();
        let mut absolute = Neumaier::new();
        let mut err = 0.0;
        for c in &self.cells[first..first + n] {
            let (v, a, e) = (*c)?;
            signed.add(v);
            absolute.add(a);
            err += e;
        }
        Some((absolute.value(), signed.value().abs(), 2.0 * err))
    }
}

/// Zero ordinates of `Z` in `(lo, hi)`, mirrored for negative heights.
fn ordinates(lf: &LFunction, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let top = hi.abs().max(lo.abs());
    let pos: Vec<f64> = lf.scan_sign_changes(0.0, top)?.iter().map(|r| r.refined).collect();
    let mut all: Vec<f64> = pos.iter().map(|g| -g).chain(pos.iter().copied()).collect();
    all.retain(|&g| g > lo && g < hi);
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// Classifies the grid `t = 1 + j * step < T` into `E1` and `E2`.
pub fn detect_intervals(
    lf: &LFunction,
    m: &MollifierTable,
    p: &DetectorParams,
    t_max: f64,
    step: f64,
) -> Result<DetectionReport> {
    p.validate()?;
    if !(t_max > 1.0) {
        return Err(Error::Detector(format!("T = {t_max} must exceed 1")));
    }
    if !(step > 0.0 && step <= p.h1 / 4.0 * (1.0 + 1e-12)) {
        return Err(Error::Detector(format!(
            "grid step {step} must be positive and at most h1/4 = {}",
            p.h1 / 4.0
        )));
    }
    let half = (p.h1 / step).round() as usize;
    if half == 0 || (half as f64 * step - p.h1).abs() > 1e-9 * p.h1 {
        return Err(Error::Detector(format!(
            "h1 = {} must be a whole multiple of the grid step {step}",
            p.h1
        )));
    }
    let n_points = (((t_max - 1.0) / step).ceil() as usize).saturating_sub(1);
    if n_points == 0 {
        return Err(Error::Detector(format!("no grid points in (1, {t_max}) at step {step}")));
    }
    let origin = 1.0 + step - p.h1;
    let count = n_points - 1 + 2 * half;
    let zeros = ordinates(lf, 0.0, t_max + 2.0 * p.h1)?;
    let cells = CellIntegrals::build(lf, m, p, origin, step, count, &zeros);

    // direct verification of each sign change of the rotated F
    let verified: Vec<f64> = zeros
        .iter()
        .copied()
        .filter(|&g| {
            let lo = frak_f(lf, m, p, g - BRACKET).map(|v| v.rotated);
            let hi = frak_f(lf, m, p, g + BRACKET).map(|v| v.rotated);
            matches!((lo, hi), (Ok(a), Ok(b)) if a * b < 0.0)
        })
        .collect();

    let mut records = Vec::with_capacity(n_points);
    for j in 0..n_points {
        let t = 1.0 + (j + 1) as f64 * step;
        let (i1, i2, quad_error, flag) = match cells.window(j, 2 * half) {
            Some((i1, i2, e)) => {
                let flag = if i1 > i2 * (1.0 + EPS_DET) + e { Flag::E1 } else { Flag::E2 };
                (i1, i2, e, flag)
            }
            None => (f64::NAN, f64::NAN, f64::INFINITY, Flag::Indeterminate),
        };
        let confirmations = verified.iter().filter(|&&g| g > t - p.h1 && g < t + p.h1).count();
        records.push(DetectionRecord {
            t,
            i1,
            i2,
            quad_error,
            flag,
            confirmations,
        });
    }
    let e1 = records.iter().filter(|r| r.flag == Flag::E1).count();
    let mu_e1 = e1 as f64 * step;
    let direct = zeros.iter().filter(|&&g| g > 0.0 && g < t_max).count();
    let budget = budget(&records, step, mu_e1, t_max);
    Ok(DetectionReport {
        params: *p,
        t_max,
        step,
        records,
        mu_e1,
        n0_bound: mu_e1 / (2.0 * p.h1) - 1.0,
        direct_sign_changes: direct,
        budget,
    })
}

fn budget(records: &[DetectionRecord], step: f64, mu_e1: f64, t_max: f64) -> BudgetReport {
    let mut i3 = Neumaier::new();
    let mut i1e1 = Neumaier::new();
    let mut i2 = Neumaier::new();
    let mut i1sq = Neumaier::new();
    let mut i2sq = Neumaier::new();
    for r in records.iter().filter(|r| r.flag != Flag::Indeterminate) {
        i3.add(step * r.i1);
        i2.add(step * r.i2);
        i1sq.add(step * r.i1 * r.i1);
        i2sq.add(step * r.i2 * r.i2);
        if r.flag == Flag::E1 {
            i1e1.add(step * r.i1);
        }
    }
    BudgetReport {
        i3: i3.value(),
        i1_on_e1: i1e1.value(),
        i2_total: i2.value(),
        i1_square: i1sq.value(),
        i2_square: i2sq.value(),
        cs_e1: (mu_e1 * i1sq.value()).sqrt(),
        cs_i2: ((t_max - 1.0) * i2sq.value()).sqrt(),
    }
}

/// Which mean-square kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GKernel {
    /// `|sum r(n) beta(nu1) conj(beta(nu2)) / nu2 exp(-c n nu1 y (sin d + i cos d) / nu2)|^2`
    /// with the normalized coefficients `r(n)`.
    Printed,
    /// The Plancherel kernel for weight `k`: each term carries
    /// `(n nu1 / nu2)^{(k-1)/2}` and the square carries `y^{k-1}`, so that
    /// `int_0^inf G = int |F|^2`. Equal to `Printed` for `k = 1`.
    WeightCorrected,
}

impl GKernel {
    pub fn as_str(&self) -> &'static str {
        match self {
            GKernel::Printed => "printed",
            GKernel::WeightCorrected => "weight-corrected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValue {
    pub y: f64,
    pub g: f64,
    /// Triangle-inequality majorant with `|r(n)| <= tau(n)`.
    pub majorant: f64,
    /// Bound on `|g - G(y)|` from truncating the `n` sums.
    pub tail_bound: f64,
    /// Largest `n` used over all ratio groups.
    pub n_cut: usize,
}

/// Terms sharing the same reduced ratio `nu1 / nu2`.
#[derive(Debug, Clone)]
struct RatioGroup {
    rho: f64,
    weight: Complex64,
    abs_weight: f64,
}

/// Precomputed data for repeated `G(y)` evaluations.
pub struct GContext<'a> {
    table: &'a CoeffTable,
    tau: Vec<f64>,
    /// `n^kappa`; empty when `kappa == 0`.
    n_pow: Vec<f64>,
    groups: Vec<RatioGroup>,
    c: f64,
    delta: f64,
    kappa: f64,
    kernel: GKernel,
}

impl<'a> GContext<'a> {
    pub fn new(table: &'a CoeffTable, m: &MollifierTable, p: &DetectorParams, kernel: GKernel) -> Result<Self> {
        p.validate()?;
        let mut map: BTreeMap<(u64, u64), (Complex64, f64)> = BTreeMap::new();
        let support: Vec<(u64, Complex64)> = m.beta_support().collect();
        for &(n1, b1) in &support {
            for &(n2, b2) in &support {
                let g = gcd(n1, n2);
                let w = b1 * b2.conj() / n2 as f64;
                let e = map.entry((n1 / g, n2 / g)).or_insert((Complex64::new(0.0, 0.0), 0.0));
                e.0 += w;
                e.1 += w.norm();
            }
        }
        let groups = map
            .into_iter()
            .map(|((a, b), (w, aw))| RatioGroup {
                rho: a as f64 / b as f64,
                weight: w,
                abs_weight: aw,
            })
            .collect();
        let cache = crate::arith::ArithCache::new(table.n_max);
        let tau = (0..=table.n_max).map(|n| if n == 0 { 0.0 } else { cache.tau(n) as f64 }).collect();
        let kappa = match kernel {
            GKernel::Printed => 0.0,
            GKernel::WeightCorrected => (table.weight() as f64 - 1.0) / 2.0,
        };
        let n_pow = if kappa == 0.0 {
            Vec::new()
        } else {
            (0..=table.n_max).map(|n| (n as f64).powf(kappa)).collect()
        };
        Ok(Self {
            table,
            tau,
            n_pow,
            groups,
            c: 2.0 * PI / (table.level() as f64).sqrt(),
            delta: p.delta,
            kappa,
            kernel,
        })
    }

    pub fn kernel(&self) -> GKernel {
        self.kernel
    }

    /// Smallest per-unit-`y` exponential decay rate of any group.
    fn min_rate(&self) -> f64 {
        let rho = self.groups.iter().map(|g| g.rho).fold(f64::INFINITY, f64::min);
        self.c * rho * self.delta.sin()
    }

    fn y_power(&self, y: f64) -> f64 {
        y.powf(2.0 * self.kappa)
    }

    /// `G(y)` with its majorant; the `n` sums stop once the
    /// `2 sqrt(n)`-majorised tail of every group is below `tol / groups`.
    pub fn eval(&self, y: f64, tol: f64) -> Result<GValue> {
        if !(y > 0.0) {
            return Err(Error::Detector(format!("G(y) needs y > 0, got {y}")));
        }
        let per_group = tol / self.groups.len() as f64;
        let rot = Complex64::new(self.delta.sin(), self.delta.cos());
        let mut total = NeumaierComplex::new();
        let mut majorant = 0.0;
        let mut tail_total = 0.0;
        let mut n_cut = 0;
        for g in &self.groups {
            let x = self.c * g.rho * y;
            let eps = x * self.delta.sin();
            let step = (-rot * x).exp();
            let decay = (-eps).exp();
            let pow = 0.5 + self.kappa;
            let rho_pow = g.rho.powf(self.kappa);
            let mut acc = NeumaierComplex::new();
            let mut maj = Neumaier::new();
            let mut z = Complex64::new(1.0, 0.0);
            let mut e = 1.0;
            let mut n = 1usize;
            let tail = loop {
                if n > self.table.n_max {
                    let need = ((pow.max(1.0) * (1.0 / eps).ln().max(1.0) + (1.0 / per_group).ln().max(0.0) + 50.0)
                        / eps) as u64;
                    return Err(Error::Coverage {
                        required: need.max(self.table.n_max as u64 + 1),
                        available: self.table.n_max as u64,
                    });
                }
                let nf = n as f64;
                if n % 256 == 1 {
                    z = (-rot * (x * nf)).exp();
                    e = (-eps * nf).exp();
                } else {
                    z *= step;
                    e *= decay;
                }
                let amp = if self.n_pow.is_empty() { 1.0 } else { self.n_pow[n] * rho_pow };
                acc.add(self.table.r[n] * amp * z);
                maj.add(self.tau[n] * amp * e);
                // tail beyond n with tau(m) <= 2 sqrt(m), tested every 32 terms
                if n % 32 == 0 {
                    let m = nf + 1.0;
                    let q = decay * (1.0 + 1.0 / m).powf(pow);
                    if m * eps > pow && q < 1.0 {
                        let head = 2.0 * m.powf(pow) * rho_pow * (-eps * m).exp();
                        let t = g.abs_weight * head / (1.0 - q);
                        if t <= per_group {
                            break t;
                        }
                    }
                }
                n += 1;
            };
            n_cut = n_cut.max(n);
            total.add(g.weight * acc.value());
            majorant += g.abs_weight * (maj.value() + tail / g.abs_weight.max(f64::MIN_POSITIVE));
            tail_total += tail;
        }
        let s = total.value();
        let yp = self.y_power(y);
        Ok(GValue {
            y,
            g: s.norm_sqr() * yp,
            majorant: majorant * majorant * yp,
            tail_bound: (2.0 * s.norm() * tail_total + tail_total * tail_total) * yp,
            n_cut,
        })
    }

    /// Certified bound on `int_Y^inf G(y) dy` through the majorant's
    /// exponential decay; valid once `Y >= (k - 1) / rate`.
    pub fn tail_beyond(&self, y: f64, tol: f64) -> Result<f64> {
        let rate = self.min_rate();
        if self.kappa > 0.0 && y < 2.0 * self.kappa / rate {
            return Ok(f64::INFINITY);
        }
        let v = self.eval(y, tol)?;
        Ok(if self.kappa > 0.0 { v.majorant / rate } else { v.majorant / (2.0 * rate) })
    }

    /// Smallest `Y` on a doubling ladder from `start` with certified tail
    /// below `tol`.
    pub fn cutoff(&self, start: f64, tol: f64) -> Result<(f64, f64)> {
        let mut y = start.max(1.0);
        for _ in 0..60 {
            let t = self.tail_beyond(y, tol * 1e-3)?;
            if t <= tol {
                return Ok((y, t));
            }
            y *= 2.0;
        }
        Err(Error::Detector(format!("no cutoff with tail below {tol:e} found")))
    }

    /// `int_a^b w(y) G(y) dy` on a geometric grid of breakpoints, plus the
    /// accumulated truncation error of the `n` sums.
    fn integral<W: Fn(f64) -> f64>(&self, a: f64, b: f64, w: W, tol: f64) -> Result<(f64, f64)> {
        if b <= a {
            return Ok((0.0, 0.0));
        }
        let mut breaks = Vec::new();
        let mut u = a;
        while u * 1.25 < b {
            u *= 1.25;
            breaks.push(u);
        }
        let spec = QuadratureSpec {
            abs_tol: tol,
            rel_tol: 1e-9,
            max_subdivisions: 20_000,
        };
        let pointwise = tol * 1e-3 / (b - a);
        // the first evaluation error, reported in place of the NaN it causes
        let failure = std::cell::RefCell::new(None);
        let r = integrate_with(
            |y| match self.eval(y, pointwise) {
                Ok(v) => v.g * w(y),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            a,
            Upper::Finite(b),
            &breaks,
            &spec,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let r = r?;
        Ok((r.value, r.error + tol * 1e-3))
    }
}

/// `G(y)` for one `y`.
pub fn g_of_y(
    table: &CoeffTable,
    m: &MollifierTable,
    p: &DetectorParams,
    y: f64,
    tol: f64,
    kernel: GKernel,
) -> Result<GValue> {
    if !(y >= 1.0) {
        return Err(Error::Detector(format!("G(y) is defined here for y >= 1, got {y}")));
    }
    GContext::new(table, m, p, kernel)?.eval(y, tol)
}

/// Writes `y,G,majorant,tail_bound` rows.
pub fn write_g_profile<W: Write>(values: &[GValue], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(G_PROFILE_CSV_HEADER.split(','))?;
    for v in values {
        out.write_record([
            format!("{:.17e}", v.y),
            format!("{:.17e}", v.g),
            format!("{:.17e}", v.majorant),
            format!("{:.3e}", v.tail_bound),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JValue {
    pub x: f64,
    pub vartheta: f64,
    pub value: f64,
    pub quad_error: f64,
    /// Upper limit of the numerical integral.
    pub upper: f64,
    /// Certified bound on the integral beyond `upper`.
    pub tail_bound: f64,
}

/// `J(x, theta) = int_x^inf G(u) u^{-theta} du`.
pub fn j_integral(ctx: &GContext<'_>, x: f64, vartheta: f64, tol: f64) -> Result<JValue> {
    if !(vartheta > 0.0 && vartheta <= 0.25) {
        return Err(Error::Detector(format!("theta = {vartheta} must lie in (0, 1/4]")));
    }
    if !(x >= 1.0) {
        return Err(Error::Detector(format!("x = {x} must be at least 1")));
    }
    let (upper, tail) = ctx.cutoff(x, tol)?;
    let (value, quad_error) = ctx.integral(x, upper, |u| u.powf(-vartheta), tol)?;
    Ok(JValue {
        x,
        vartheta,
        value,
        quad_error,
        upper,
        tail_bound: tail * x.powf(-vartheta),
    })
}

/// Both sides of the two mean-square inequalities for one kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Sides {
    pub kernel: GKernel,
    /// `8 h1^2 int_1^Y G`.
    pub rhs1: f64,
    /// `8 h1^2 int_1^H G + 8 int_H^Y G / ln^2 y`.
    pub rhs2: f64,
    pub y_max: f64,
    /// Certified tails beyond `Y` for the two right-hand sides.
    pub tail1: f64,
    pub tail2: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Report {
    pub t0: f64,
    pub h: f64,
    /// `int_{-T0}^{T0} I1(t)^2 dt`.
    pub lhs1: f64,
    /// `int_{-T0}^{T0} I2(t)^2 dt`.
    pub lhs2: f64,
    pub lhs_error: f64,
    pub printed: Lemma1Sides,
    pub corrected: Lemma1Sides,
}

impl Lemma1Sides {
    /// The truncated left side can only be smaller than the full one, and the
    /// full right side is at most the truncated one plus its tail.
    pub fn holds(&self, lhs: f64, lhs_error: f64, which: u8) -> bool {
        let (rhs, tail) = if which == 1 { (self.rhs1, self.tail1) } else { (self.rhs2, self.tail2) };
        lhs - lhs_error <= rhs + tail + self.quad_error
    }
}

impl Lemma1Report {
    pub fn holds(&self, sides: &Lemma1Sides) -> (bool, bool) {
        (
            sides.holds(self.lhs1, self.lhs_error, 1),
            sides.holds(self.lhs2, self.lhs_error, 2),
        )
    }
}

/// Truncated check of the two mean-square inequalities: the left sides over
/// `|t| <= T0`, the right sides over `1 <= y <= Y` (`Y = y_max` when given,
/// otherwise chosen by the tail rule) with certified tails.
pub fn lemma1_truncated_check(
    lf: &LFunction,
    m: &MollifierTable,
    p: &DetectorParams,
    t0: f64,
    y_max: Option<f64>,
    tol: f64,
) -> Result<Lemma1Report> {
    p.validate()?;
    if !(t0 > 0.0) {
        return Err(Error::Detector(format!("T0 = {t0} must be positive")));
    }
    let (lhs1, lhs2, lhs_error) = window_mean_squares(lf, m, p, t0)?;
    let h = (1.0 / p.h1).exp();
    let sides = |kernel: GKernel| -> Result<Lemma1Sides> {
        let ctx = GContext::new(lf.table(), m, p, kernel)?;
        let (y, tail) = match y_max {
            Some(y) => (y, ctx.tail_beyond(y, tol * 1e-3)?),
            None => ctx.cutoff(h, tol)?,
        };
        let y = y.max(h);
        let (g_all, e1) = ctx.integral(1.0, y, |_| 1.0, tol)?;
        let (g_low, e2) = ctx.integral(1.0, h, |_| 1.0, tol)?;
        let (g_high, e3) = ctx.integral(h, y, |u| u.ln().powi(-2), tol)?;
        let c = 8.0 * p.h1 * p.h1;
        Ok(Lemma1Sides {
            kernel,
            rhs1: c * g_all,
            rhs2: c * g_low + 8.0 * g_high,
            y_max: y,
            tail1: c * tail,
            tail2: 8.0 * tail / h.ln().powi(2),
            quad_error: c * (e1 + e2) + 8.0 * e3,
        })
    };
    Ok(Lemma1Report {
        t0,
        h,
        lhs1,
        lhs2,
        lhs_error,
        printed: sides(GKernel::Printed)?,
        corrected: sides(GKernel::WeightCorrected)?,
    })
}

/// `int_{-T0}^{T0} I1^2` and `int I2^2` by composite Simpson over window
/// integrals on a grid of spacing `h1 / 20`; the error estimate is the
/// Simpson-trapezoid difference.
fn window_mean_squares(lf: &LFunction, m: &MollifierTable, p: &DetectorParams, t0: f64) -> Result<(f64, f64, f64)> {
    let per_h1 = 20usize;
    let width = p.h1 / per_h1 as f64;
    let n = 2 * ((t0 / width).ceil() as usize).max(1);
    let span = n as f64 * width;
    let origin = -span / 2.0 - p.h1;
    let count = n + 2 * per_h1;
    let zeros = ordinates(lf, origin, origin + count as f64 * width)?;
    let cells = CellIntegrals::build(lf, m, p, origin, width, count, &zeros);
    let mut sq1 = Vec::with_capacity(n + 1);
    let mut sq2 = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (i1, i2, _) = cells
            .window(j, 2 * per_h1)
            .ok_or_else(|| Error::Detector(format!("window quadrature failed near t = {}", -span / 2.0 + j as f64 * width)))?;
        sq1.push(i1 * i1);
        sq2.push(i2 * i2);
    }
    let simpson = |v: &[f64]| {
        let mut acc = Neumaier::new();
        for (i, x) in v.iter().enumerate() {
            let w = if i == 0 || i == v.len() - 1 { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc.add(w * x);
        }
        acc.value() * width / 3.0
    };
    let trapezoid = |v: &[f64]| {
        let mut acc = Neumaier::new();
        for (i, x) in v.iter().enumerate() {
            acc.add(if i == 0 || i == v.len() - 1 { 0.5 * x } else { *x });
        }
        acc.value() * width
    };
    let (s1, s2) = (simpson(&sq1), simpson(&sq2));
    let err = (s1 - trapezoid(&sq1)).abs() + (s2 - trapezoid(&sq2)).abs();
    Ok((s1, s2, err))
}
