//! Zero location on the critical line and the rectangle count `N(T)`.

use super::LFunction;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

pub const ZERO_CSV_HEADER: &str = "t,z_left,z_right,refined,err";

/// Scan step on the critical line.
const SCAN_STEP: f64 = 0.05;
/// Bisection stops at this bracket width.
const BISECT_WIDTH: f64 = 1e-8;
/// Half-width of the verification bracket around a refined ordinate.
const VERIFY: f64 = 1e-8;
/// `T` is moved until it is at least this far from every ordinate.
const T_CLEARANCE: f64 = 1e-3;
/// Contour edges: `Re s` in `[SIGMA_LEFT, SIGMA_RIGHT]`.
const SIGMA_LEFT: f64 = -0.5;
const SIGMA_RIGHT: f64 = 1.5;
const MAX_PHASE_JUMP: f64 = FRAC_PI_2;

/// One located sign change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord {
    /// Left grid point of the bracketing scan interval.
    pub t: f64,
    pub z_left: f64,
    pub z_right: f64,
    pub refined: f64,
    /// Bound on `|refined - gamma|`.
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroReport {
    /// Upper limit actually used, after clearance from nearby ordinates.
    pub t_max: f64,
    /// Strictly increasing.
    pub ordinates: Vec<f64>,
    pub count_argument: i64,
    pub count_signs: usize,
    pub records: Vec<ZeroRecord>,
}

impl ZeroReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(ZERO_CSV_HEADER.split(','))?;
        for r in &self.records {
            out.write_record([
                format!("{:.17e}", r.t),
                format!("{:.17e}", r.z_left),
                format!("{:.17e}", r.z_right),
                format!("{:.17e}", r.refined),
                format!("{:.3e}", r.err),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

impl LFunction {
    /// `Z(t)` and its absolute noise floor.
    fn z_with_noise(&self, t: f64) -> Result<(f64, f64)> {
        let s = self.hardy_z(t)?;
        let mag = s.lambda_log.to_complex_scaled(-PI / 2.0 * t.abs()).norm();
        Ok((s.z, s.eval_error * mag))
    }

    /// Sign changes of `Z` on `(t0, t1]`, each refined and verified.
    pub fn scan_sign_changes(&self, t0: f64, t1: f64) -> Result<Vec<ZeroRecord>> {
        if !(t1 > t0) {
            return Err(Error::InvalidArgument(format!("empty scan range ({t0}, {t1}]")));
        }
        let steps = ((t1 - t0) / SCAN_STEP).ceil() as usize;
        let h = (t1 - t0) / steps as f64;
        let mut records = Vec::new();
        let mut left = t0;
        let mut z_left = self.settled_z(left, h)?.1;
        for i in 1..=steps {
            let (right, z_right) = self.settled_z(t0 + i as f64 * h, h)?;
            if z_left * z_right < 0.0 {
                records.push(self.refine(left, right, z_left, z_right)?);
            }
            left = right;
            z_left = z_right;
        }
        Ok(records)
    }

    /// `Z` at `t`, moved by fractions of the step while `|Z|` is inside the
    /// noise floor.
    fn settled_z(&self, t: f64, h: f64) -> Result<(f64, f64)> {
        let mut u = t;
        for j in 0..8 {
            let (z, noise) = self.z_with_noise(u)?;
            if z.abs() > 10.0 * noise {
                return Ok((u, z));
            }
            u = t - h * (j + 1) as f64 / 17.0;
        }
        Err(Error::LFunction(format!("Z stays within its noise floor near t = {t}")))
    }

    fn refine(&self, a: f64, b: f64, za: f64, zb: f64) -> Result<ZeroRecord> {
        let (mut lo, mut hi, mut zlo) = (a, b, za);
        while hi - lo > BISECT_WIDTH {
            let mid = 0.5 * (lo + hi);
            let zm = self.hardy_z(mid)?.z;
            if zm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (zm < 0.0) == (zlo < 0.0) {
                lo = mid;
                zlo = zm;
            } else {
                hi = mid;
            }
        }
        let mid = 0.5 * (lo + hi);
        let mut refined = mid;
        let mut err = 0.5 * (hi - lo);
        // one Newton step with a centred difference
        let d = 1e-6;
        let slope = (self.hardy_z(mid + d)?.z - self.hardy_z(mid - d)?.z) / (2.0 * d);
        let zm = self.hardy_z(mid)?.z;
        if slope != 0.0 {
            let step = zm / slope;
            let cand = mid - step;
            if step.abs() <= err && self.brackets(cand)? {
                refined = cand;
                err = step.abs().max(1e-12 * cand.abs());
            }
        }
        if !self.brackets(refined)? {
            return Err(Error::LFunction(format!(
                "sign change near t = {refined} not confirmed at +-{VERIFY:e}"
            )));
        }
        Ok(ZeroRecord {
            t: a,
            z_left: za,
            z_right: zb,
            refined,
            err: err.max(VERIFY * 1e-3),
        })
    }

    fn brackets(&self, g: f64) -> Result<bool> {
        Ok(self.hardy_z(g - VERIFY)?.z * self.hardy_z(g + VERIFY)?.z < 0.0)
    }

    /// Winding number of `Lambda` around the rectangle
    /// `SIGMA_LEFT <= Re s <= SIGMA_RIGHT`, `0 <= Im s <= t_max`.
    pub fn argument_count(&self, t_max: f64) -> Result<i64> {
        let corners = [
            Complex64::new(SIGMA_RIGHT, 0.0),
            Complex64::new(SIGMA_RIGHT, t_max),
            Complex64::new(SIGMA_LEFT, t_max),
            Complex64::new(SIGMA_LEFT, 0.0),
            Complex64::new(SIGMA_RIGHT, 0.0),
        ];
        let arg = |s: Complex64| -> Result<f64> { Ok(self.completed(s)?.value.arg) };
        let mut total = 0.0;
        for edge in corners.windows(2) {
            let (p, q) = (edge[0], edge[1]);
            let len = (q - p).norm();
            let mut u = 0.0;
            let mut h = 0.1f64.min(len);
            let mut prev = arg(p)?;
            while u < len {
                let step = h.min(len - u);
                let next = arg(p + (q - p) * ((u + step) / len))?;
                let jump = super::super::specfun::wrap_phase(next - prev);
                if jump.abs() > MAX_PHASE_JUMP {
                    h *= 0.5;
                    if h < 1e-9 {
                        return Err(Error::LFunction(format!(
                            "phase tracking stalled near {}",
                            p + (q - p) * (u / len)
                        )));
                    }
                    continue;
                }
                total += jump;
                prev = next;
                u += step;
                h = (h * 1.5).min(0.25);
            }
        }
        let winding = total / (2.0 * PI);
        let n = winding.round();
        if (winding - n).abs() > 0.1 {
            return Err(Error::LFunction(format!("winding {winding} is not near an integer")));
        }
        Ok(n as i64)
    }

    /// `N(T)` by the argument principle alongside the sign-change scan.
    pub fn count_zeros(&self, t_max: f64) -> Result<ZeroReport> {
        if !(t_max > 0.0) {
            return Err(Error::InvalidArgument(format!("T = {t_max} must be positive")));
        }
        let mut t = t_max;
        let mut records = self.scan_sign_changes(0.0, t + 2.0 * T_CLEARANCE + SCAN_STEP)?;
        for _ in 0..20 {
            if records.iter().all(|r| (r.refined - t).abs() >= T_CLEARANCE) {
                break;
            }
            t += 2.0 * T_CLEARANCE;
        }
        if records.iter().any(|r| (r.refined - t).abs() < T_CLEARANCE) {
            return Err(Error::LFunction(format!("could not clear T = {t_max} of zeros")));
        }
        if t + T_CLEARANCE > t_max + 2.0 * T_CLEARANCE + SCAN_STEP {
            records = self.scan_sign_changes(0.0, t + 2.0 * T_CLEARANCE)?;
        }
        records.retain(|r| r.refined <= t);
        let ordinates: Vec<f64> = records.iter().map(|r| r.refined).collect();
        if ordinates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::LFunction("refined ordinates are not strictly increasing".into()));
        }
        let count_argument = self.argument_count(t)?;
        Ok(ZeroReport {
            t_max: t,
            count_signs: ordinates.len(),
            ordinates,
            count_argument,
            records,
        })
    }

    /// Refines `gamma` against the quadrature evaluator by regula falsi
    /// (Illinois) inside `gamma +- width`.
    pub fn refine_by_quadrature(&self, gamma: f64, width: f64, rel_tol: f64) -> Result<f64> {
        let f = |t: f64| self.hardy_z_by_quadrature(t, rel_tol);
        let (mut a, mut b) = (gamma - width, gamma + width);
        let (mut fa, mut fb) = (f(a)?, f(b)?);
        if fa * fb > 0.0 {
            return Err(Error::LFunction(format!(
                "quadrature evaluator shows no sign change in {gamma} +- {width}"
            )));
        }
        let mut side = 0i8;
        for _ in 0..100 {
            let c = (a * fb - b * fa) / (fb - fa);
            if (b - a).abs() < 1e-12 * gamma.abs().max(1.0) {
                return Ok(c);
            }
            let fc = f(c)?;
            if fc == 0.0 {
                return Ok(c);
            }
            if (fc < 0.0) == (fa < 0.0) {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
            if (b - a).abs() < 1e-12 * gamma.abs().max(1.0) {
                return Ok(0.5 * (a + b));
            }
        }
        Ok(0.5 * (a + b))
    }
}
