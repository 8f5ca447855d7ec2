//! Hecke recurrence: reconstruction from prime eigenvalues and verification.

use super::{Character, CoeffTable, FormSpec};
use crate::arith::ArithCache;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

/// Absolute tolerance for Hecke relations in normalised (floating) form.
const HECKE_TOL: f64 = 1e-12;

/// Splits `n >= 2` as `p^alpha * m` with `p` its smallest prime factor.
fn split(cache: &ArithCache, n: usize) -> (usize, u32, usize, usize) {
    let p = cache.smallest_prime_factor(n);
    let mut m = n;
    let mut alpha = 0;
    let mut pa = 1;
    while m % p == 0 {
        m /= p;
        pa *= p;
        alpha += 1;
    }
    (p, alpha, pa, m)
}

fn missing(p: usize) -> Error {
    Error::Forms(format!("prime table has no eigenvalue for p = {p}"))
}

/// Integer coefficients `a(1..=n_max)` from exact prime eigenvalues `a(p)`,
/// via `a(p^{j+1}) = a(p) a(p^j) - chi(p) p^{k-1} a(p^{j-1})` and
/// multiplicativity. Requires a real character.
pub fn reconstruct_exact(primes: &[(u64, i128)], form: &FormSpec, n_max: usize) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let ap: HashMap<u64, i128> = primes.iter().copied().collect();
    let cache = ArithCache::new(n_max);
    let overflow = |n: usize| Error::CoefficientCheck {
        n: n as u64,
        relation: "coefficient exceeds 128-bit range".into(),
    };
    let mut a = vec![0i128; n_max + 1];
    a[1] = 1;
    for n in 2..=n_max {
        let (p, alpha, pa, m) = split(&cache, n);
        a[n] = if m > 1 {
            a[pa].checked_mul(a[m]).ok_or_else(|| overflow(n))?
        } else if alpha == 1 {
            *ap.get(&(p as u64)).ok_or_else(|| missing(p))?
        } else {
            let w = form.hecke_weight_exact(p as u64).ok_or_else(|| {
                Error::Forms("exact reconstruction needs a real character".into())
            })?;
            let lhs = a[p].checked_mul(a[pa / p]).ok_or_else(|| overflow(n))?;
            let rhs = w.checked_mul(a[pa / p / p]).ok_or_else(|| overflow(n))?;
            lhs.checked_sub(rhs).ok_or_else(|| overflow(n))?
        };
    }
    Ok(a)
}

/// Normalised coefficients `r(1..=n_max)` from `r(p)` via
/// `r(p^{j+1}) = r(p) r(p^j) - chi(p) r(p^{j-1})`.
pub(crate) fn reconstruct_normalized(
    primes: &[(u64, Complex64)],
    chi: &Character,
    n_max: usize,
) -> Result<Vec<Complex64>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let rp: HashMap<u64, Complex64> = primes.iter().copied().collect();
    let cache = ArithCache::new(n_max);
    let mut r = vec![Complex64::new(0.0, 0.0); n_max + 1];
    r[1] = Complex64::new(1.0, 0.0);
    for n in 2..=n_max {
        let (p, alpha, pa, m) = split(&cache, n);
        r[n] = if m > 1 {
            r[pa] * r[m]
        } else if alpha == 1 {
            *rp.get(&(p as u64)).ok_or_else(|| missing(p))?
        } else {
            r[p] * r[pa / p] - chi.value(p as u64) * r[pa / p / p]
        };
    }
    Ok(r)
}

/// Coefficient table rebuilt from prime eigenvalues `r(p)` alone.
pub fn reconstruct_from_primes(
    primes: &[(u64, Complex64)],
    form: &FormSpec,
    n_max: usize,
) -> Result<CoeffTable> {
    let r = reconstruct_normalized(primes, &form.character, n_max)?;
    Ok(CoeffTable::from_normalized(Arc::new(form.clone()), r))
}

/// Exact Hecke structure of integer coefficients: `a(1) = 1`,
/// multiplicativity on coprime parts and the prime-power recurrence.
pub fn verify_exact(form: &FormSpec, a: &[i128]) -> Result<()> {
    let n_max = a.len() - 1;
    if a[1] != 1 {
        return Err(Error::CoefficientCheck {
            n: 1,
            relation: format!("a(1) = {} instead of 1", a[1]),
        });
    }
    let cache = ArithCache::new(n_max);
    for n in 2..=n_max {
        let (p, alpha, pa, m) = split(&cache, n);
        let ok = if m > 1 {
            a[pa].checked_mul(a[m]) == Some(a[n])
        } else if alpha >= 2 {
            let w = match form.hecke_weight_exact(p as u64) {
                Some(w) => w,
                None => continue,
            };
            let expect = a[p]
                .checked_mul(a[pa / p])
                .zip(w.checked_mul(a[pa / p / p]))
                .and_then(|(x, y)| x.checked_sub(y));
            expect == Some(a[n])
        } else {
            true
        };
        if !ok {
            let relation = if m > 1 {
                format!("a({n}) != a({pa}) a({m})")
            } else {
                format!("Hecke recurrence fails at {p}^{alpha}")
            };
            return Err(Error::CoefficientCheck { n: n as u64, relation });
        }
    }
    Ok(())
}

/// Floating Hecke relations (absolute `1e-12`) and Deligne's bound
/// `|r(n)| <= tau(n)` on the normalised coefficients.
pub fn verify_normalized(table: &CoeffTable) -> Result<()> {
    let r = &table.r;
    if (r[1] - 1.0).norm() > HECKE_TOL {
        return Err(Error::CoefficientCheck {
            n: 1,
            relation: "r(1) != 1".into(),
        });
    }
    let cache = ArithCache::new(table.n_max);
    for n in 2..=table.n_max {
        let (p, alpha, pa, m) = split(&cache, n);
        let expect = if m > 1 {
            Some(r[pa] * r[m])
        } else if alpha >= 2 {
            Some(r[p] * r[pa / p] - table.chi(p as u64) * r[pa / p / p])
        } else {
            None
        };
        if let Some(e) = expect {
            if (r[n] - e).norm() > HECKE_TOL * e.norm().max(1.0) {
                return Err(Error::CoefficientCheck {
                    n: n as u64,
                    relation: format!("Hecke relation off by {:e}", (r[n] - e).norm()),
                });
            }
        }
        let tau = cache.tau(n) as f64;
        if r[n].norm() > tau * (1.0 + HECKE_TOL) {
            return Err(Error::CoefficientCheck {
                n: n as u64,
                relation: format!("|r(n)| = {} exceeds tau(n) = {tau}", r[n].norm()),
            });
        }
    }
    Ok(())
}
