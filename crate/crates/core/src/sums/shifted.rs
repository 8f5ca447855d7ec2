use super::kfactor::{k_factor, K_MAX_TERMS};
use super::rankin::divisor4_tail;
use super::SumReport;
use crate::arith::{factorize, gcd, mod_inverse};
use crate::error::{Error, Result};
use crate::forms::CoeffTable;
use crate::specfun::summation::{ExactSumComplex, NeumaierComplex};
use num_complex::Complex64;

/// `sum_{n < N} r(n) conj(r((m1 n + l) / m2))` by two loop orders.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedSum {
    pub n: u64,
    pub m1: u64,
    pub m2: u64,
    pub l: u64,
    /// Loop over every `n`, skipping non-integral arguments.
    pub forward: Complex64,
    /// Loop over the residue class `m1 n + l = 0 (mod m2)` only.
    pub bucketed: Complex64,
    /// `sum |terms|`.
    pub abs_sum: f64,
    pub terms: usize,
}

impl ShiftedSum {
    /// `|S| / sum |terms|`, zero for an empty sum.
    pub fn cancellation_ratio(&self) -> f64 {
        if self.abs_sum == 0.0 {
            0.0
        } else {
            self.forward.norm() / self.abs_sum
        }
    }

    pub fn report(&self) -> SumReport {
        SumReport::new(
            "shifted_convolution",
            format!("N={};m1={};m2={};l={}", self.n, self.m1, self.m2, self.l),
            self.forward,
            0.0,
        )
        .with_oracle(self.bucketed)
    }
}

fn check_shift(m1: u64, m2: u64) -> Result<()> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::Sums("m1 and m2 must be positive".into()));
    }
    if gcd(m1, m2) != 1 {
        return Err(Error::Sums(format!("gcd({m1}, {m2}) must be 1")));
    }
    Ok(())
}

pub fn shifted_convolution(n: u64, m1: u64, m2: u64, l: u64, table: &CoeffTable) -> Result<ShiftedSum> {
    check_shift(m1, m2)?;
    if n < 1 {
        return Err(Error::Sums("N must be positive".into()));
    }
    let top = m1
        .checked_mul(n - 1)
        .and_then(|v| v.checked_add(l))
        .ok_or_else(|| Error::Sums("m1 N + l overflows".into()))?
        / m2;
    if top as usize > table.n_max || (n - 1) as usize > table.n_max {
        return Err(Error::Coverage {
            required: top.max(n - 1),
            available: table.n_max as u64,
        });
    }
    let mut forward = ExactSumComplex::new();
    let mut abs_sum = ExactSumComplex::new();
    let mut terms = 0;
    for k in 1..n {
        let num = m1 * k + l;
        if num % m2 != 0 {
            continue;
        }
        let t = table.r[k as usize] * table.r[(num / m2) as usize].conj();
        forward.add(t);
        abs_sum.add(Complex64::new(t.norm(), 0.0));
        terms += 1;
    }

    // first k >= 1 with m1 k + l = 0 (mod m2)
    let start = if m2 == 1 {
        1
    } else {
        let inv = mod_inverse((m1 % m2) as i64, m2 as i64)
            .ok_or_else(|| Error::Sums(format!("{m1} has no inverse modulo {m2}")))? as u64;
        let r0 = ((m2 - l % m2) % m2) * inv % m2;
        if r0 == 0 {
            m2
        } else {
            r0
        }
    };
    let mut bucketed = ExactSumComplex::new();
    let mut k = start;
    while k < n {
        let t = table.r[k as usize] * table.r[((m1 * k + l) / m2) as usize].conj();
        bucketed.add(t);
        k += m2;
    }
    Ok(ShiftedSum {
        n,
        m1,
        m2,
        l,
        forward: forward.value(),
        bucketed: bucketed.value(),
        abs_sum: abs_sum.value().re,
        terms,
    })
}

/// Partial sum of `D_{m1,m2}(s, l) = sum r(n) conj(r((m1 n + l) / m2)) / (m1 n + l/2)^s`
/// over `n <= N`. The tail bound is finite only for `Re s > 1`; elsewhere the
/// value is a plain partial sum.
pub fn shifted_dirichlet(
    s: Complex64,
    l: u64,
    m1: u64,
    m2: u64,
    table: &CoeffTable,
    n: u64,
) -> Result<SumReport> {
    check_shift(m1, m2)?;
    let mut acc = NeumaierComplex::new();
    for k in 1..=n {
        let num = m1 * k + l;
        if num % m2 != 0 {
            continue;
        }
        let base = m1 as f64 * k as f64 + l as f64 / 2.0;
        let t = table.r_extended(k)? * table.r_extended(num / m2)?.conj();
        acc.add(t * (-s * base.ln()).exp());
    }
    // Cauchy-Schwarz over the two tau^2 <= tau_4 tails
    let sigma = s.re;
    let tail = if sigma > 1.0 {
        let n_shift = (m1 as f64 * n as f64 + l as f64) / m2 as f64;
        let first = (m1 as f64).powf(-sigma) * divisor4_tail(n as f64, sigma);
        let second = if m2 as f64 * n_shift >= l as f64 {
            (2.0 / m2 as f64).powf(sigma) * divisor4_tail(n_shift.floor(), sigma)
        } else {
            f64::INFINITY
        };
        (first * second).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(SumReport::new(
        "shifted_dirichlet",
        format!("s={}{:+}i;l={l};m1={m1};m2={m2};N={n}", s.re, s.im),
        acc.value(),
        tail,
    ))
}

/// Truncation-matched check of
/// `D_{m1,m2}(s, 0) = (m1 m2)^{-s} K(m1, s) conj(K(m2, conj s)) D(s)`.
///
/// Both sides are summed over the same box `k = delta k'`, with `delta`
/// built from the primes of `m1 m2` (exponents below the K truncation) and
/// `k' <= N` coprime to `m1 m2`. The left side is the brute-force sum; the
/// right side multiplies the K-factors by the box sum of `|r(k)|^2 k^{-s}`.
pub fn shifted_l0_box_check(table: &CoeffTable, m1: u64, m2: u64, s: Complex64, n: u64) -> Result<SumReport> {
    check_shift(m1, m2)?;
    let k1 = k_factor(table, m1, s, K_MAX_TERMS)?;
    let k2 = k_factor(table, m2, s.conj(), K_MAX_TERMS)?;
    let j_max = k1.terms.max(k2.terms).max(1);
    let mm = m1 * m2;
    let primes: Vec<u64> = factorize(mm).into_iter().map(|(p, _)| p).collect();

    // factorizations of every delta in the exponent box
    let mut deltas: Vec<Vec<(u64, u32)>> = vec![Vec::new()];
    for &p in &primes {
        let mut next = Vec::with_capacity(deltas.len() * j_max);
        for d in &deltas {
            for j in 0..j_max as u32 {
                let mut e = d.clone();
                e.push((p, j));
                next.push(e);
            }
        }
        deltas = next;
    }
    let coprime: Vec<u64> = (1..=n).filter(|&k| gcd(k, mm) == 1).collect();
    let m1_f = factorize(m1);
    let m2_f = factorize(m2);
    let r_of = |base: &[(u64, u32)], extra: &[(u64, u32)], kp: u64| -> Result<Complex64> {
        let mut out = table.r_extended(kp)?;
        for &(p, j) in base {
            let a = extra.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e);
            out *= super::kfactor::r_power(table, p, j + a)?;
        }
        Ok(out)
    };
    let mut lhs = NeumaierComplex::new();
    let mut dbox = NeumaierComplex::new();
    for d in &deltas {
        let ln_d: f64 = d.iter().map(|&(p, j)| j as f64 * (p as f64).ln()).sum();
        for &kp in &coprime {
            let ln_k = ln_d + (kp as f64).ln();
            let w = (-s * ln_k).exp();
            let rk = r_of(d, &[], kp)?;
            lhs.add(r_of(d, &m2_f, kp)? * r_of(d, &m1_f, kp)?.conj() * w);
            dbox.add(rk.norm_sqr() * w);
        }
    }
    let pre = (-s * (mm as f64).ln()).exp();
    let rhs = pre * k1.method_a * k2.method_a.conj() * dbox.value();
    let tail = pre.norm()
        * dbox.value().norm()
        * ((k1.method_a.norm() + k1.tail_bound) * (k2.method_a.norm() + k2.tail_bound)
            - k1.method_a.norm() * k2.method_a.norm());
    Ok(SumReport::new(
        "shifted_l0_box",
        format!("s={}{:+}i;m1={m1};m2={m2};N={n};J={j_max}", s.re, s.im),
        pre * lhs.value(),
        tail,
    )
    .with_oracle(rhs))
}
