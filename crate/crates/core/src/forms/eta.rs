//! Exact q-expansions of eta quotients.

use crate::error::{Error, Result};

/// Generalised pentagonal numbers `j(3j - 1)/2`, `j = 0, 1, -1, 2, -2, ...`,
/// with the sign `(-1)^j` of their coefficient in `prod (1 - q^n)`.
fn pentagonal_terms(limit: usize) -> Vec<(usize, i128)> {
    let mut out = vec![(0usize, 1i128)];
    let mut j = 1i64;
    loop {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let a = (j * (3 * j - 1) / 2) as usize;
        let b = (j * (3 * j + 1) / 2) as usize;
        if a > limit {
            break;
        }
        out.push((a, sign));
        if b <= limit {
            out.push((b, sign));
        }
        j += 1;
    }
    out
}

fn overflow() -> Error {
    Error::Forms("eta-product coefficient exceeds 128-bit range".into())
}

/// Coefficients `c_0..=c_len` of `prod_{n >= 1} (1 - q^{scale n})^exponent`.
///
/// Uses `P F' = e P' F` for `F = P^e`, giving
/// `n c_n = sum_{j >= 1} p_j (e j - (n - j)) c_{n - j}` over the sparse
/// pentagonal coefficients `p_j` of `P`.
fn power_of_euler_product(scale: usize, exponent: i32, len: usize) -> Result<Vec<i128>> {
    let sparse: Vec<(usize, i128)> = pentagonal_terms(len / scale)
        .into_iter()
        .skip(1)
        .map(|(j, s)| (j * scale, s))
        .collect();
    let e = exponent as i128;
    let mut c = vec![0i128; len + 1];
    c[0] = 1;
    for n in 1..=len {
        let mut acc = 0i128;
        for &(j, p) in &sparse {
            if j > n {
                break;
            }
            let weight = e * j as i128 - (n - j) as i128;
            let term = c[n - j]
                .checked_mul(weight * p)
                .ok_or_else(overflow)?;
            acc = acc.checked_add(term).ok_or_else(overflow)?;
        }
        if acc % n as i128 != 0 {
            return Err(Error::Forms(format!(
                "non-integral coefficient at q^{n} in eta power"
            )));
        }
        c[n] = acc / n as i128;
    }
    Ok(c)
}

fn multiply_truncated(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let len = a.len().min(b.len());
    let nz: Vec<(usize, i128)> = b.iter().copied().enumerate().filter(|&(_, v)| v != 0).collect();
    let mut out = vec![0i128; len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == 0 {
            continue;
        }
        for &(j, bj) in &nz {
            if i + j >= len {
                break;
            }
            let t = ai.checked_mul(bj).ok_or_else(overflow)?;
            out[i + j] = out[i + j].checked_add(t).ok_or_else(overflow)?;
        }
    }
    Ok(out)
}

/// Leading power `w = sum scale_i e_i / 24` of an eta quotient, if integral.
pub fn leading_power(factors: &[(u64, i32)]) -> Result<i64> {
    let total: i64 = factors.iter().map(|&(m, e)| m as i64 * e as i64).sum();
    if total % 24 != 0 {
        return Err(Error::Forms(format!(
            "eta quotient has non-integral leading power {total}/24"
        )));
    }
    Ok(total / 24)
}

/// q-expansion coefficients of `q^w prod_i prod_{m >= 1} (1 - q^{scale_i m})^{e_i}`.
///
/// The returned vector is indexed by `n` (entry 0 is unused and zero); the
/// series is shifted so the leading coefficient sits at `n = 1`, which is
/// the identity shift for every genuine newform quotient (`w = 1`).
pub fn expand_eta_product(factors: &[(u64, i32)], n_max: usize) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if factors.is_empty() || factors.iter().any(|&(m, e)| m == 0 || e == 0) {
        return Err(Error::Forms("eta factors need positive scales and non-zero exponents".into()));
    }
    let w = leading_power(factors)?;
    if w < 1 || w as usize > n_max {
        return Err(Error::Forms(format!(
            "leading q-power {w} outside 1..={n_max}"
        )));
    }
    // series in q, coefficients of q^0..q^{n_max - 1}
    let len = n_max - 1;
    let mut series: Option<Vec<i128>> = None;
    for &(m, e) in factors {
        let f = power_of_euler_product(m as usize, e, len)?;
        series = Some(match series {
            None => f,
            Some(s) => multiply_truncated(&s, &f)?,
        });
    }
    let series = series.expect("at least one factor");
    let mut a = vec![0i128; n_max + 1];
    a[1..].copy_from_slice(&series);
    Ok(a)
}
