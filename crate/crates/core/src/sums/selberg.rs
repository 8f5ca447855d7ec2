use super::kfactor::{k_factor, KCache, K_MAX_TERMS};
use super::SumReport;
use crate::arith::{divisors_from_factors, factorize, gcd, mobius_from_factors};
use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::mollifier::MollifierTable;
use crate::specfun::summation::NeumaierComplex;
use num_complex::Complex64;
use std::collections::{BTreeMap, BTreeSet};

/// Largest `beta` support accepted by the quadruple sums.
pub const SELBERG_SUPPORT_CAP: usize = 200;

fn check_theta(vartheta: f64) -> Result<()> {
    if !(0.0..=0.25).contains(&vartheta) {
        return Err(Error::Sums(format!("theta = {vartheta} must lie in [0, 1/4]")));
    }
    Ok(())
}

fn support(m: &MollifierTable) -> Result<Vec<(u64, Complex64)>> {
    let s: Vec<_> = m.beta_support().collect();
    if s.len() > SELBERG_SUPPORT_CAP {
        return Err(Error::Sums(format!(
            "beta support has {} entries, above the cap of {SELBERG_SUPPORT_CAP}",
            s.len()
        )));
    }
    Ok(s)
}

fn params(vartheta: f64, m: &MollifierTable) -> String {
    format!("theta={vartheta};X={}", m.x)
}

/// `S(theta)` as the literal quadruple sum over the `beta` support with
/// `q = gcd(nu1 nu4, nu2 nu3)`.
pub fn selberg_sum(vartheta: f64, table: &CoeffTable, m: &MollifierTable) -> Result<SumReport> {
    check_theta(vartheta)?;
    let sup = support(m)?;
    let e = 1.0 - vartheta;
    let mut k = KCache::new(table, Complex64::new(e, 0.0));
    let mut acc = NeumaierComplex::new();
    let mut abs_sum = 0.0;
    let mut k_max: f64 = 1.0;
    for &(n1, b1) in &sup {
        for &(n4, b4) in &sup {
            let p = n1 * n4;
            let w14 = b1 * b4 / ((n1 as f64).powf(e) * n4 as f64);
            for &(n2, b2) in &sup {
                for &(n3, b3) in &sup {
                    let qn = n2 * n3;
                    let g = gcd(p, qn);
                    let w23 = (b2 * b3).conj() / (n2 as f64 * (n3 as f64).powf(e));
                    let (k1, k2) = (k.get(p / g)?, k.get(qn / g)?);
                    let scale = (g as f64).powf(e);
                    acc.add(w14 * w23 * scale * k1 * k2.conj());
                    abs_sum += (w14 * w23).norm() * scale;
                    k_max = k_max.max(k1.norm()).max(k2.norm());
                }
            }
        }
    }
    let et = k.max_tail;
    Ok(SumReport::new(
        "selberg_direct",
        params(vartheta, m),
        acc.value(),
        abs_sum * (2.0 * k_max * et + et * et),
    ))
}

/// `S(theta) = sum_d sum_{m | d} mu(m) (d/m)^{1-theta} |g(d, m)|^2` with
/// `g(d, m) = sum_{d | nu1 nu4} beta(nu1) beta(nu4) / (nu1^{1-theta} nu4) K(nu1 nu4 m / d, 1 - theta)`.
pub fn selberg_sum_decomposed(vartheta: f64, table: &CoeffTable, m: &MollifierTable) -> Result<SumReport> {
    check_theta(vartheta)?;
    let sup = support(m)?;
    let e = 1.0 - vartheta;
    let mut k = KCache::new(table, Complex64::new(e, 0.0));
    let mut pairs: Vec<(u64, Complex64)> = Vec::with_capacity(sup.len() * sup.len());
    for &(n1, b1) in &sup {
        for &(n4, b4) in &sup {
            pairs.push((n1 * n4, b1 * b4 / ((n1 as f64).powf(e) * n4 as f64)));
        }
    }
    // the weight of each product, so each d scans distinct products only
    let mut by_product: BTreeMap<u64, Complex64> = BTreeMap::new();
    for &(p, w) in &pairs {
        *by_product.entry(p).or_insert(Complex64::new(0.0, 0.0)) += w;
    }
    let mut ds: BTreeSet<u64> = BTreeSet::new();
    for &p in by_product.keys() {
        ds.extend(divisors_from_factors(&factorize(p)));
    }
    let mut acc = NeumaierComplex::new();
    let mut abs_w = 0.0;
    for &(_, w) in &pairs {
        abs_w += w.norm();
    }
    for &d in &ds {
        let members: Vec<(u64, Complex64)> = by_product
            .iter()
            .filter(|(&p, _)| p % d == 0)
            .map(|(&p, &w)| (p, w))
            .collect();
        let d_f = factorize(d);
        for mm in divisors_from_factors(&d_f) {
            let mu = mobius_from_factors(&factorize(mm));
            if mu == 0 {
                continue;
            }
            let mut g = NeumaierComplex::new();
            for &(p, w) in &members {
                g.add(w * k.get(p / d * mm)?);
            }
            acc.add(Complex64::new(mu as f64 * ((d / mm) as f64).powf(e) * g.value().norm_sqr(), 0.0));
        }
    }
    let et = k.max_tail;
    Ok(SumReport::new(
        "selberg_decomposed",
        params(vartheta, m),
        acc.value(),
        abs_w * abs_w * (2.0 * et + et * et) * ds.len() as f64,
    ))
}

/// Both sides of `f(q) = sum_{d | q} sum_{m | d} mu(m) f(d/m)` for an
/// integer-valued `f`.
pub fn moebius_inversion_check<F: Fn(u64) -> i64>(q: u64, f: F) -> Result<(i64, i64)> {
    if q == 0 {
        return Err(Error::Sums("q must be positive".into()));
    }
    let mut total: i64 = 0;
    for d in divisors_from_factors(&factorize(q)) {
        for mm in divisors_from_factors(&factorize(d)) {
            let mu = mobius_from_factors(&factorize(mm)) as i64;
            total = total
                .checked_add(mu * f(d / mm))
                .ok_or_else(|| Error::Sums("Moebius check overflowed i64".into()))?;
        }
    }
    Ok((total, f(q)))
}

/// `b(n) = sum_{n1 n2 = n} |alpha(n1) alpha(n2)|`.
pub fn b_function(n: u64, m: &MollifierTable) -> f64 {
    if n == 0 {
        return 0.0;
    }
    divisors_from_factors(&factorize(n))
        .into_iter()
        .map(|d| (m.alpha(d) * m.alpha(n / d)).norm())
        .sum()
}

fn check_estimate13(x1: f64, gamma: f64, vartheta: f64, n: u64, m: &MollifierTable) -> Result<()> {
    check_theta(vartheta)?;
    if !(0.0..=0.25).contains(&gamma) {
        return Err(Error::Sums(format!("gamma = {gamma} must lie in [0, 1/4]")));
    }
    if !(x1 >= 1.0) || n == 0 {
        return Err(Error::Sums(format!("need X1 >= 1 and N >= 1, got X1 = {x1}, N = {n}")));
    }
    if x1 > m.x {
        return Err(Error::Sums(format!("X1 = {x1} exceeds the mollifier length {}", m.x)));
    }
    Ok(())
}

/// `sum_{lambda <= X1, (lambda, N) = 1} alpha(lambda) K(lambda, 1 - theta) lambda^{gamma - 1} ln(X1 / lambda)`,
/// with the oracle taken from the second K method.
pub fn estimate13_sum(
    x1: f64,
    gamma: f64,
    vartheta: f64,
    n: u64,
    table: &CoeffTable,
    m: &MollifierTable,
) -> Result<SumReport> {
    check_estimate13(x1, gamma, vartheta, n, m)?;
    let s = Complex64::new(1.0 - vartheta, 0.0);
    let mut a = NeumaierComplex::new();
    let mut b = NeumaierComplex::new();
    let mut tail: f64 = 0.0;
    for (&lambda, &al) in m.support.iter().zip(&m.alpha) {
        let lf = lambda as f64;
        if lf > x1 || gcd(lambda, n) != 1 || al.norm() == 0.0 {
            continue;
        }
        let k = k_factor(table, lambda, s, K_MAX_TERMS)?;
        let w = al * lf.powf(gamma - 1.0) * (x1 / lf).ln();
        a.add(w * k.method_a);
        b.add(w * k.method_b);
        tail += w.norm() * k.tail_bound;
    }
    Ok(SumReport::new(
        "estimate13",
        format!("X1={x1};gamma={gamma};theta={vartheta};N={n};X={}", m.x),
        a.value(),
        tail,
    )
    .with_oracle(b.value()))
}

/// `X1^gamma sqrt(ln(X1 + 2)) prod_{p | N} (1 + 1/p)^2`.
pub fn estimate13_bound_shape(x1: f64, gamma: f64, n: u64) -> f64 {
    let local: f64 = factorize(n).iter().map(|&(p, _)| (1.0 + 1.0 / p as f64).powi(2)).product();
    x1.powf(gamma) * (x1 + 2.0).ln().sqrt() * local
}
