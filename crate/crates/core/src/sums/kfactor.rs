use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::mollifier::SUPPORT_PRIME_FLOOR;
use crate::specfun::summation::NeumaierComplex;
use num_complex::Complex64;
use std::collections::HashMap;

/// Per-prime series are cut once their majorant tail drops below this.
pub const K_TAIL_TOL: f64 = 1e-14;
/// Default cap on the number of terms per prime.
pub const K_MAX_TERMS: usize = 64;

/// `K(m, s)` by the per-prime quotient (`method_a`) and by the ratio of two
/// sums over the box of `k` built from the primes of `m` (`method_b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KFactor {
    pub m: u64,
    pub s: Complex64,
    pub method_a: Complex64,
    pub method_b: Complex64,
    /// Terms kept per prime.
    pub terms: usize,
    /// Bound on the truncation error of either method.
    pub tail_bound: f64,
}

impl KFactor {
    pub fn discrepancy(&self) -> f64 {
        (self.method_a - self.method_b).norm()
    }
}

/// `r(p^e)`: from the table when `p^e <= n_max`, otherwise by the Hecke
/// recurrence.
pub fn r_power(table: &CoeffTable, p: u64, e: u32) -> Result<Complex64> {
    match p.checked_pow(e) {
        Some(pe) if pe as usize <= table.n_max => Ok(table.r[pe as usize]),
        _ => Ok(table.prime_power_series(p, e as usize)?[e as usize]),
    }
}

/// `r(n)` for `n` given by its factorization.
fn r_factored(table: &CoeffTable, factors: &[(u64, u32)]) -> Result<Complex64> {
    let mut n = 1u64;
    for &(p, e) in factors {
        match p.checked_pow(e).and_then(|pe| n.checked_mul(pe)) {
            Some(v) => n = v,
            None => {
                n = u64::MAX;
                break;
            }
        }
    }
    if (n as usize) <= table.n_max {
        return Ok(table.r[n as usize]);
    }
    let mut out = Complex64::new(1.0, 0.0);
    for &(p, e) in factors {
        out *= r_power(table, p, e)?;
    }
    Ok(out)
}

/// Terms needed at prime `p`, exponent `alpha`, `sigma = Re s`, and the
/// resulting tails `(numerator, denominator)`. The majorant of term `j` is
/// `(alpha + j + 1)(j + 1) p^{-j sigma}` resp. `(j + 1)^2 p^{-j sigma}`.
fn terms_for(p: u64, alpha: u32, sigma: f64, max_terms: usize) -> Option<(usize, f64, f64)> {
    let x = (p as f64).powf(-sigma);
    let a = alpha as f64;
    let tail = |j: usize, shift: f64| {
        let jf = j as f64;
        let term = (shift + jf + 1.0) * (jf + 1.0) * x.powi(j as i32);
        let q = (shift + jf + 2.0) * (jf + 2.0) / ((shift + jf + 1.0) * (jf + 1.0)) * x;
        if q < 1.0 {
            term / (1.0 - q)
        } else {
            f64::INFINITY
        }
    };
    (1..=max_terms).find_map(|j| {
        let (tn, td) = (tail(j, a), tail(j, 0.0));
        (tn.max(td) < K_TAIL_TOL).then_some((j, tn, td))
    })
}

/// Computes `K(m, s)` by both methods with automatic per-prime truncation.
pub fn k_factor(table: &CoeffTable, m: u64, s: Complex64, max_terms: usize) -> Result<KFactor> {
    if m == 0 {
        return Err(Error::Sums("K(m, s) needs m >= 1".into()));
    }
    if s.re < 0.5 {
        return Err(Error::Sums(format!("K(m, s) is only analytic for Re s >= 1/2, got {s}")));
    }
    let factors = factorize(m);
    if let Some(&(p, _)) = factors.iter().find(|&&(p, _)| p <= SUPPORT_PRIME_FLOOR) {
        return Err(Error::Sums(format!(
            "m = {m} has the prime factor {p} <= {SUPPORT_PRIME_FLOOR}, outside the mollifier support"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut a = one;
    let mut bound_abs = 1.0;
    let mut bound_exact = 1.0;
    let mut terms = 0;
    let mut per_prime = Vec::with_capacity(factors.len());
    for &(p, alpha) in &factors {
        let (j_max, tn, td) = terms_for(p, alpha, s.re, max_terms).ok_or_else(|| {
            Error::Sums(format!("K-series at p = {p} needs more than {max_terms} terms"))
        })?;
        terms = terms.max(j_max);
        let series = table.prime_power_series(p, alpha as usize + j_max)?;
        let ps = (-s * (p as f64).ln()).exp();
        let mut num = NeumaierComplex::new();
        let mut den = NeumaierComplex::new();
        let mut w = one;
        for j in 0..j_max {
            num.add(series[alpha as usize + j].conj() * series[j] * w);
            den.add(series[j].norm_sqr() * w);
            w *= ps;
        }
        let (n, d) = (num.value(), den.value());
        if d.norm() <= td {
            return Err(Error::Sums(format!("K-series denominator at p = {p} is not bounded away from 0")));
        }
        let q = n / d;
        let err = (tn + q.norm() * td) / (d.norm() - td);
        a *= q;
        bound_abs *= q.norm() + err;
        bound_exact *= q.norm();
        per_prime.push((p, alpha, j_max));
    }

    // method B: expanded sums over the exponent box
    let mut num = NeumaierComplex::new();
    let mut den = NeumaierComplex::new();
    let mut idx = vec![0usize; per_prime.len()];
    loop {
        let k_f: Vec<(u64, u32)> = per_prime.iter().zip(&idx).map(|(&(p, _, _), &j)| (p, j as u32)).collect();
        let mk_f: Vec<(u64, u32)> = per_prime
            .iter()
            .zip(&idx)
            .map(|(&(p, alpha, _), &j)| (p, alpha + j as u32))
            .collect();
        let ln_k: f64 = k_f.iter().map(|&(p, j)| j as f64 * (p as f64).ln()).sum();
        let w = (-s * ln_k).exp();
        let rk = r_factored(table, &k_f)?;
        num.add(r_factored(table, &mk_f)?.conj() * rk * w);
        den.add(rk.norm_sqr() * w);
        let mut i = 0;
        loop {
            if i == idx.len() {
                break;
            }
            idx[i] += 1;
            if idx[i] < per_prime[i].2 {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            break;
        }
    }
    Ok(KFactor {
        m,
        s,
        method_a: a,
        method_b: num.value() / den.value(),
        terms,
        tail_bound: bound_abs - bound_exact,
    })
}

/// Memoized `K(m, s)` (method A) at a fixed `s`.
pub struct KCache<'a> {
    table: &'a CoeffTable,
    s: Complex64,
    values: HashMap<u64, Complex64>,
    /// Largest truncation bound seen so far.
    pub max_tail: f64,
}

impl<'a> KCache<'a> {
    pub fn new(table: &'a CoeffTable, s: Complex64) -> Self {
        let mut values = HashMap::new();
        values.insert(1, Complex64::new(1.0, 0.0));
        Self {
            table,
            s,
            values,
            max_tail: 0.0,
        }
    }

    pub fn get(&mut self, m: u64) -> Result<Complex64> {
        if let Some(v) = self.values.get(&m) {
            return Ok(*v);
        }
        let k = k_factor(self.table, m, self.s, K_MAX_TERMS)?;
        self.max_tail = self.max_tail.max(k.tail_bound);
        self.values.insert(m, k.method_a);
        Ok(k.method_a)
    }
}
