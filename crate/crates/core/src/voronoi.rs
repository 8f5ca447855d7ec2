//! Numerical checks of the additively twisted summation formula
//!
//! `sum r(n) k(n) e(a n / q) = conj(chi(a)) sum r(n) e(-a* n / q) k~(n)`,
//!
//! with `k~(n) = (2 pi i^k / q) int k(t) J_{k-1}(4 pi sqrt(n t) / q) dt`, and
//! of the Bessel-Mellin contour identity behind it.

use crate::arith::{gcd, mod_inverse};
use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::specfun::quad::{integrate_complex_with, integrate_with, QuadratureSpec, Upper};
use crate::specfun::summation::{Neumaier, NeumaierComplex};
use crate::specfun::bessel_j;
use crate::sums::SumReport;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::Write;

pub const VORONOI_CSV_HEADER: &str = "form,a,q,kernel,u0,u1,lhs_re,lhs_im,rhs_re,rhs_im,residual";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelShape {
    /// `sin^2(pi (t - u0) / (u1 - u0))`: C^1, with jumps of `k''` at the ends.
    RaisedCosine,
    /// `exp(1 - 1 / (1 - y^2))` in the centred coordinate `y`: C^infinity.
    ExpBump,
}

impl KernelShape {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelShape::RaisedCosine => "raised-cosine",
            KernelShape::ExpBump => "exp-bump",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "raised-cosine" => Ok(KernelShape::RaisedCosine),
            "exp-bump" => Ok(KernelShape::ExpBump),
            _ => Err(Error::Voronoi(format!("unknown kernel shape {s:?}"))),
        }
    }
}

/// Non-negative bump supported on `[u0, u1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestKernel {
    pub shape: KernelShape,
    pub u0: f64,
    pub u1: f64,
    pub amplitude: f64,
}

impl TestKernel {
    pub fn new(shape: KernelShape, u0: f64, u1: f64) -> Result<Self> {
        if !(u0 > 0.0 && u1 > u0 && u1.is_finite()) {
            return Err(Error::Voronoi(format!("kernel support [{u0}, {u1}] must satisfy 0 < u0 < u1")));
        }
        Ok(Self {
            shape,
            u0,
            u1,
            amplitude: 1.0,
        })
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    /// `k^{(order)}(t)` for `order <= 2`; zero outside `(u0, u1)`.
    pub fn derivative(&self, t: f64, order: u32) -> f64 {
        if !(t > self.u0 && t < self.u1) {
            return 0.0;
        }
        let len = self.u1 - self.u0;
        let v = match self.shape {
            KernelShape::RaisedCosine => {
                let w = 2.0 * PI / len;
                let x = w * (t - self.u0);
                match order {
                    0 => 0.5 * (1.0 - x.cos()),
                    1 => 0.5 * w * x.sin(),
                    2 => 0.5 * w * w * x.cos(),
                    _ => panic!("only two derivatives are available"),
                }
            }
            KernelShape::ExpBump => {
                let dy = 2.0 / len;
                let y = (2.0 * t - self.u0 - self.u1) / len;
                let g = 1.0 - y * y;
                let k = (1.0 - 1.0 / g).exp();
                let h1 = -2.0 * y / (g * g);
                let h2 = -2.0 / (g * g) - 8.0 * y * y / (g * g * g);
                match order {
                    0 => k,
                    1 => k * h1 * dy,
                    2 => k * (h2 + h1 * h1) * dy * dy,
                    _ => panic!("only two derivatives are available"),
                }
            }
        };
        self.amplitude * v
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// `int k(t) dt`.
    pub fn mass(&self) -> f64 {
        match self.shape {
            KernelShape::RaisedCosine => 0.5 * (self.u1 - self.u0) * self.amplitude,
            KernelShape::ExpBump => {
                let spec = QuadratureSpec::new(1e-15, 1e-13, 200).expect("valid spec");
                integrate_with(|t| self.eval(t), self.u0, Upper::Finite(self.u1), &[], &spec)
                    .map_or(f64::NAN, |r| r.value)
            }
        }
    }
}

/// `k~(n)` with its quadrature error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KTilde {
    pub value: Complex64,
    pub error: f64,
}

/// `i^k`.
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Breakpoints at every half-oscillation of `J(4 pi sqrt(n t) / q)` in
/// `(u0, u1)`.
fn oscillation_breaks(n: u64, q: u64, u0: f64, u1: f64) -> Vec<f64> {
    let w = 4.0 * PI * (n as f64).sqrt() / q as f64;
    let j0 = (w * u0.sqrt() / PI).floor() as u64 + 1;
    let j1 = (w * u1.sqrt() / PI).ceil() as u64;
    (j0..j1)
        .map(|j| (j as f64 * PI / w).powi(2))
        .filter(|&t| t > u0 && t < u1)
        .collect()
}

pub fn k_tilde(n: u64, q: u64, kernel: &TestKernel, weight: u32, abs_tol: f64) -> Result<KTilde> {
    if n == 0 || q == 0 || weight == 0 {
        return Err(Error::Voronoi("k~(n) needs n, q and the weight to be positive".into()));
    }
    let w = 4.0 * PI * (n as f64).sqrt() / q as f64;
    let breaks = oscillation_breaks(n, q, kernel.u0, kernel.u1);
    let spec = QuadratureSpec::new(abs_tol, 1e-14, 20 * (breaks.len() + 10)).expect("valid spec");
    let order = weight - 1;
    let r = integrate_with(
        |t| kernel.eval(t) * bessel_j(order, w * t.sqrt()),
        kernel.u0,
        Upper::Finite(kernel.u1),
        &breaks,
        &spec,
    )?;
    let pre = i_pow(weight) * (2.0 * PI / q as f64);
    Ok(KTilde {
        value: pre * r.value,
        error: pre.norm() * r.error,
    })
}

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// One run of the twisted summation formula.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiCheck {
    pub form: String,
    pub a: i64,
    pub q: u64,
    pub kernel: TestKernel,
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `sum |r(n) k(n)| + sum |r(n) k~(n)|`, the scale of the terms.
    pub term_scale: f64,
    pub rhs_terms: u64,
    /// Estimated size of the omitted right-hand tail plus quadrature errors.
    pub rhs_error: f64,
}

impl VoronoiCheck {
    pub fn absolute_residual(&self) -> f64 {
        (self.lhs - self.rhs).norm()
    }

    /// Residual relative to the larger of `|LHS|` and the term scale.
    pub fn residual(&self) -> f64 {
        self.absolute_residual() / self.lhs.norm().max(self.term_scale).max(f64::MIN_POSITIVE)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.residual() < tol
    }

    pub fn report(&self) -> SumReport {
        SumReport::new(
            "voronoi",
            format!(
                "form={};a={};q={};kernel={};u0={};u1={}",
                self.form,
                self.a,
                self.q,
                self.kernel.shape.as_str(),
                self.kernel.u0,
                self.kernel.u1
            ),
            self.lhs,
            self.rhs_error,
        )
        .with_oracle(self.rhs)
    }
}

/// Right-hand terms are added until `|k~(n)|` has stayed below
/// `tol * scale / (100 n)` over the last `n/2` values of `n`, where `scale` is
/// the larger of the two absolute term sums so far. The cut follows the
/// observed decay and is not a certified bound.
pub fn twisted_identity_check(a: i64, q: u64, kernel: &TestKernel, table: &CoeffTable, tol: f64) -> Result<VoronoiCheck> {
    let level = table.level();
    if q == 0 || q % level != 0 {
        return Err(Error::Voronoi(format!("q = {q} must be a positive multiple of the level {level}")));
    }
    let a_mod = a.rem_euclid(q as i64) as u64;
    if gcd(a_mod, q) != 1 && q != 1 {
        return Err(Error::Voronoi(format!("gcd({a}, {q}) must be 1")));
    }
    let a_star = if q == 1 {
        0
    } else {
        mod_inverse(a_mod as i64, q as i64).ok_or_else(|| Error::Voronoi(format!("{a} is not invertible mod {q}")))? as u64
    };
    let top = kernel.u1.floor() as u64;
    if top as usize > table.n_max {
        return Err(Error::Coverage {
            required: top,
            available: table.n_max as u64,
        });
    }
    let mut lhs = NeumaierComplex::new();
    let mut lhs_abs = Neumaier::new();
    for n in (kernel.u0.ceil() as u64).max(1)..=top {
        let t = table.r[n as usize] * kernel.eval(n as f64) * e((a_mod * n % q) as f64 / q as f64);
        lhs.add(t);
        lhs_abs.add(t.norm());
    }
    let lhs = lhs.value();

    let chi = table.chi(a_mod).conj();
    let scale = lhs.norm().max(lhs_abs.value()).max(kernel.mass() * 1e-3);
    let quad_tol = tol * scale * 1e-4;
    let mut rhs = NeumaierComplex::new();
    let mut rhs_abs = Neumaier::new();
    let mut quad_err = 0.0;
    let mut window_max: f64 = 0.0;
    let mut window_start = 1u64;
    let mut n = 1u64;
    let tail = loop {
        if n as usize > table.n_max {
            return Err(Error::Coverage {
                required: n,
                available: table.n_max as u64,
            });
        }
        let kt = k_tilde(n, q, kernel, table.weight(), quad_tol / 16.0)?;
        let term = table.r[n as usize] * e(-((a_star * n % q) as f64) / q as f64) * kt.value;
        rhs.add(term);
        rhs_abs.add(term.norm());
        quad_err += kt.error * table.r[n as usize].norm();
        window_max = window_max.max(kt.value.norm());
        if n >= 2 * window_start {
            // a whole window of small values past the Bessel transition
            let est = window_max * n as f64;
            if n > 64 && est < tol * scale.max(rhs_abs.value()) * 1e-2 {
                break est;
            }
            window_start = n;
            window_max = 0.0;
        }
        n += 1;
    };
    let rhs = chi * rhs.value();
    Ok(VoronoiCheck {
        form: table.form.id.clone(),
        a,
        q,
        kernel: *kernel,
        lhs,
        rhs,
        term_scale: lhs_abs.value().max(rhs_abs.value()),
        rhs_terms: n,
        rhs_error: tail + quad_err,
    })
}

pub fn write_voronoi_csv<W: Write>(checks: &[VoronoiCheck], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(VORONOI_CSV_HEADER.split(','))?;
    for c in checks {
        out.write_record([
            c.form.clone(),
            c.a.to_string(),
            c.q.to_string(),
            c.kernel.shape.as_str().to_string(),
            c.kernel.u0.to_string(),
            c.kernel.u1.to_string(),
            format!("{:.17e}", c.lhs.re),
            format!("{:.17e}", c.lhs.im),
            format!("{:.17e}", c.rhs.re),
            format!("{:.17e}", c.rhs.im),
            format!("{:.3e}", c.residual()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `(1/2 pi i) int_{c - iH}^{c + iH} e^{a s - b / s} s^{-k} ds` against
/// `(a/b)^{(k-1)/2} J_{k-1}(2 sqrt(ab))`.
///
/// The two ends beyond `H` are replaced by two integration-by-parts terms;
/// `tail_bound` bounds what remains.
pub fn bessel_mellin_check(a: f64, b: f64, k: u32, c: f64, height: f64, tol: f64) -> Result<SumReport> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) || k == 0 {
        return Err(Error::Voronoi(format!("need a, b, c > 0 and k >= 1, got a={a}, b={b}, c={c}, k={k}")));
    }
    let kf = k as f64;
    let amp = (a * c).exp() / (2.0 * PI);
    let tail_at = |h: f64| {
        let cst = (b / h + kf).powi(2) + 2.0 * b / h + kf;
        2.0 * amp * cst * h.powf(-kf - 1.0) / ((kf + 1.0) * a * a)
    };
    if tail_at(height) > tol {
        let mut need = height;
        while tail_at(need) > tol {
            need *= 1.5;
        }
        return Err(Error::Voronoi(format!(
            "contour height {height} leaves a tail above {tol:e}; need about {need:.0}"
        )));
    }
    let f = |y: f64| {
        let s = Complex64::new(c, y);
        (a * s - b / s - kf * s.ln()).exp() / (2.0 * PI)
    };
    // half-periods of e^{i a y}
    let breaks: Vec<f64> = (1..)
        .map(|j| j as f64 * PI / a)
        .take_while(|&x| x < height)
        .collect();
    let spec = QuadratureSpec::new(tol * 1e-2, 1e-13, 40 * (breaks.len() + 10)).expect("valid spec");
    let r = integrate_complex_with(f, 0.0, Upper::Finite(height), &breaks, &spec)?;

    // int_H^inf f ~ -f(H)/(i a') + f'(H)/(i a')^2 with the phase kept inside f
    let s = Complex64::new(c, height);
    let g = |s: Complex64| (-b / s - kf * s.ln()).exp() * (a * c).exp() / (2.0 * PI);
    let g0 = g(s);
    let g1 = g0 * (b / (s * s) - kf / s) * Complex64::i();
    let ia = Complex64::new(0.0, a);
    let phase = Complex64::from_polar(1.0, a * height);
    let end = phase * (-g0 / ia + g1 / (ia * ia));
    // the integrand at -y is the conjugate of the integrand at y
    let value = 2.0 * (r.value + end).re;
    let oracle = (a / b).powf((kf - 1.0) / 2.0) * bessel_j(k - 1, 2.0 * (a * b).sqrt());
    Ok(SumReport::new(
        "bessel_mellin",
        format!("a={a};b={b};k={k};c={c};H={height}"),
        Complex64::new(value, 0.0),
        tail_at(height) + 2.0 * r.error,
    )
    .with_oracle(Complex64::new(oracle, 0.0)))
}
