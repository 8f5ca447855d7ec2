use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::specfun::summation::{Neumaier, NeumaierComplex};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms: usize,
    /// Certified bound on the omitted tail.
    pub tail_bound: f64,
}

/// Bound on `sum_{n > N} tau_4(n) n^{-sigma}` for `sigma > 1`, from
/// `sum_{n <= x} tau_4(n) <= x (1 + ln x)^3` and partial summation.
pub fn divisor4_tail(n: f64, sigma: f64) -> f64 {
    if !(sigma > 1.0) {
        return f64::INFINITY;
    }
    let n = n.max(1.0);
    let e = sigma - 1.0;
    let l = 1.0 + n.ln();
    let mut poly = 0.0;
    let mut fall = 1.0;
    for j in 0..=3 {
        poly += fall * l.powi(3 - j) / e.powi(j + 1);
        fall *= (3 - j) as f64;
    }
    sigma * n.powf(-e) * poly
}

/// Partial sum of `D(s) = sum |r(n)|^2 n^{-s}` over `n <= N`; the tail uses
/// `|r(n)|^2 <= tau(n)^2 <= tau_4(n)`.
pub fn rankin_series(table: &CoeffTable, s: Complex64, n: usize) -> Result<SeriesValue> {
    if !(s.re > 1.0) {
        return Err(Error::Sums(format!("D(s) needs Re s > 1, got {s}")));
    }
    if n > table.n_max {
        return Err(Error::Coverage {
            required: n as u64,
            available: table.n_max as u64,
        });
    }
    let mut acc = NeumaierComplex::new();
    for k in 1..=n {
        acc.add(table.r[k].norm_sqr() * (-s * (k as f64).ln()).exp());
    }
    Ok(SeriesValue {
        value: acc.value(),
        terms: n,
        tail_bound: divisor4_tail(n as f64, s.re),
    })
}

/// `(1/x) sum_{n <= x} |r(n)|^2`.
pub fn rankin_mean(table: &CoeffTable, x: usize) -> Result<f64> {
    if x == 0 {
        return Err(Error::Sums("the mean needs x >= 1".into()));
    }
    if x > table.n_max {
        return Err(Error::Coverage {
            required: x as u64,
            available: table.n_max as u64,
        });
    }
    let mut acc = Neumaier::new();
    for k in 1..=x {
        acc.add(table.r[k].norm_sqr());
    }
    Ok(acc.value() / x as f64)
}

/// Means along a doubling ladder ending at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankinDrift {
    /// `(x_i, mean(x_i))`, ascending.
    pub ladder: Vec<(usize, f64)>,
    /// `|mean(x/2) - mean(x)| / mean(x)`.
    pub last_drift: f64,
}

pub fn rankin_drift(table: &CoeffTable, x: usize, steps: usize) -> Result<RankinDrift> {
    if x < 2usize.pow(steps as u32) {
        return Err(Error::Sums(format!("x = {x} too small for {steps} halvings")));
    }
    let mut ladder = Vec::with_capacity(steps + 1);
    for i in (0..=steps).rev() {
        let xi = x >> i;
        ladder.push((xi, rankin_mean(table, xi)?));
    }
    let n = ladder.len();
    let last = ladder[n - 1].1;
    let prev = if n >= 2 { ladder[n - 2].1 } else { last };
    Ok(RankinDrift {
        ladder,
        last_drift: (prev - last).abs() / last,
    })
}
