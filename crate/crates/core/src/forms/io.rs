//! Coefficient cache files and external prime tables.

use super::{build_coeff_table, CoeffTable, Character, FormSource, FormSpec};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::path::Path;
use std::sync::Arc;

pub const COEFF_CACHE_HEADER: [&str; 6] = ["form_id", "k", "D", "n", "a_re", "a_im"];

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Writes one row per `n`: exact integers when available, otherwise the
/// shortest round-tripping decimal form of each `f64`.
pub fn write_coeff_cache<W: std::io::Write>(table: &CoeffTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COEFF_CACHE_HEADER)?;
    let f = &table.form;
    let (k, d) = (f.weight.to_string(), f.level.to_string());
    for n in 1..=table.n_max {
        let (re, im) = match &table.a_exact {
            Some(a) => (a[n].to_string(), "0".to_string()),
            None => (table.a[n].re.to_string(), table.a[n].im.to_string()),
        };
        w.write_record([f.id.as_str(), &k, &d, &n.to_string(), &re, &im])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a cache written by [`write_coeff_cache`] for `form`, re-running all
/// table invariants.
pub fn read_coeff_cache<R: std::io::Read>(form: &FormSpec, input: R) -> Result<CoeffTable> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != COEFF_CACHE_HEADER {
        return Err(parse_err(format!("unexpected cache header {header:?}")));
    }
    let mut exact: Vec<i128> = vec![0];
    let mut float: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    let mut all_exact = true;
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let n: usize = rec[3].parse().map_err(|_| parse_err(format!("bad n in row {}", i + 1)))?;
        if rec[0] != form.id || rec[1] != form.weight.to_string() || rec[2] != form.level.to_string() {
            return Err(parse_err(format!("row {} belongs to a different form", i + 1)));
        }
        if n != i + 1 {
            return Err(parse_err(format!("rows out of order at n = {n}")));
        }
        let im: f64 = rec[5].parse().map_err(|_| parse_err(format!("bad a_im at n = {n}")))?;
        match rec[4].parse::<i128>() {
            Ok(v) if im == 0.0 => {
                exact.push(v);
                float.push(Complex64::new(v as f64, 0.0));
            }
            _ => {
                all_exact = false;
                let re: f64 = rec[4].parse().map_err(|_| parse_err(format!("bad a_re at n = {n}")))?;
                exact.push(0);
                float.push(Complex64::new(re, im));
            }
        }
    }
    if exact.len() < 2 {
        return Err(parse_err("empty coefficient cache"));
    }
    let form = Arc::new(form.clone());
    let table = if all_exact {
        super::verify_exact(&form, &exact)?;
        CoeffTable::from_exact(form, exact)
    } else {
        let k = form.weight as f64;
        let r = float
            .iter()
            .enumerate()
            .map(|(n, &a)| if n == 0 { a } else { a * (n as f64).powf((1.0 - k) / 2.0) })
            .collect();
        let mut t = CoeffTable::from_normalized(form, r);
        t.a = float;
        t
    };
    super::verify_normalized(&table)?;
    Ok(table)
}

/// Loads a custom form from a prime-eigenvalue table.
///
/// Format: `key = value` lines for `form_id`, `k`, `D` and `character`
/// (`principal` or `quadratic`), then a CSV block with header
/// `p,a_re,a_im` listing the unnormalised eigenvalues `a(p)`. Lines starting
/// with `#` are ignored. Integral real eigenvalues give an exact table.
pub fn load_prime_table(path: &Path) -> Result<FormSpec> {
    let text = std::fs::read_to_string(path)?;
    let mut meta = std::collections::BTreeMap::new();
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let mut body_start = None;
    for (i, line) in lines.by_ref() {
        if line.trim() == "p,a_re,a_im" {
            body_start = Some(i);
            break;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("line {}: expected key = value", i + 1)))?;
        meta.insert(k.trim().to_string(), v.trim().to_string());
    }
    let start = body_start.ok_or_else(|| parse_err("missing 'p,a_re,a_im' block"))?;
    let get = |key: &str| meta.get(key).ok_or_else(|| parse_err(format!("missing key '{key}'")));
    let weight: u32 = get("k")?.parse().map_err(|_| parse_err("bad k"))?;
    let level: u64 = get("D")?.parse().map_err(|_| parse_err("bad D"))?;
    let character = match get("character")?.as_str() {
        "principal" => Character::Principal { modulus: level },
        "quadratic" => Character::Quadratic { modulus: level },
        other => return Err(parse_err(format!("unknown character '{other}'"))),
    };
    let body: String = text.lines().skip(start).collect::<Vec<_>>().join("\n");
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    let mut exact = Vec::new();
    let mut normalized = Vec::new();
    let mut integral = true;
    for rec in rd.records() {
        let rec = rec?;
        let p: u64 = rec[0].trim().parse().map_err(|_| parse_err("bad prime"))?;
        if !crate::arith::is_prime(p) {
            return Err(parse_err(format!("{p} is not prime")));
        }
        let im: f64 = rec[2].trim().parse().map_err(|_| parse_err("bad a_im"))?;
        let re_text = rec[1].trim();
        let re: f64 = re_text.parse().map_err(|_| parse_err("bad a_re"))?;
        match re_text.parse::<i128>() {
            Ok(v) if im == 0.0 => exact.push((p, v)),
            _ => integral = false,
        }
        let scale = (p as f64).powf((1.0 - weight as f64) / 2.0);
        normalized.push((p, Complex64::new(re, im) * scale));
    }
    let source = if integral && character.is_real() {
        FormSource::IntegerPrimeTable(exact)
    } else {
        FormSource::PrimeTable(normalized)
    };
    let form = FormSpec {
        id: get("form_id")?.clone(),
        weight,
        level,
        character,
        root_number: None,
        source,
    };
    form.validate()?;
    Ok(form)
}

/// Largest `n_max` a prime table supports: every prime up to it is listed.
pub fn prime_table_coverage(form: &FormSpec) -> usize {
    let mut primes: Vec<u64> = match &form.source {
        FormSource::IntegerPrimeTable(v) => v.iter().map(|x| x.0).collect(),
        FormSource::PrimeTable(v) => v.iter().map(|x| x.0).collect(),
        FormSource::EtaProduct(_) => return usize::MAX,
    };
    primes.sort_unstable();
    let mut expected = crate::arith::primes_up_to(primes.last().copied().unwrap_or(1)).into_iter();
    let mut covered = 1usize;
    for p in primes {
        match expected.next() {
            Some(q) if q == p => covered = p as usize,
            Some(q) => return q as usize - 1,
            None => break,
        }
    }
    // every integer below the next prime is covered
    let next = crate::arith::primes_up_to(2 * covered as u64 + 2)
        .into_iter()
        .find(|&q| q as usize > covered)
        .unwrap_or(covered as u64 + 1);
    next as usize - 1
}

/// Convenience: build a table for a loaded prime-table form at its coverage.
pub fn build_from_prime_table(form: &FormSpec, n_max: usize) -> Result<CoeffTable> {
    let cover = prime_table_coverage(form);
    if n_max > cover {
        return Err(Error::Coverage {
            required: n_max as u64,
            available: cover as u64,
        });
    }
    build_coeff_table(form, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_round_trip_is_exact() {
        for form in [FormSpec::delta(), FormSpec::f23()] {
            let t = build_coeff_table(&form, 500).unwrap();
            let mut buf = Vec::new();
            write_coeff_cache(&t, &mut buf).unwrap();
            let back = read_coeff_cache(&form, buf.as_slice()).unwrap();
            assert_eq!(back.a_exact, t.a_exact);
            assert_eq!(back.r, t.r);
            let text = String::from_utf8(buf).unwrap();
            assert!(text.starts_with("form_id,k,D,n,a_re,a_im\n"));
        }
    }

    #[test]
    fn cache_rejects_other_form() {
        let t = build_coeff_table(&FormSpec::delta(), 20).unwrap();
        let mut buf = Vec::new();
        write_coeff_cache(&t, &mut buf).unwrap();
        assert!(read_coeff_cache(&FormSpec::f23(), buf.as_slice()).is_err());
    }

    #[test]
    fn prime_table_loads_and_rebuilds() {
        let t = build_coeff_table(&FormSpec::delta(), 200).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("delta_primes.txt");
        let mut text = String::from("# Ramanujan tau at primes\nform_id = tau\nk = 12\nD = 1\ncharacter = principal\np,a_re,a_im\n");
        for (p, a) in t.exact_prime_values().unwrap() {
            text.push_str(&format!("{p},{a},0\n"));
        }
        std::fs::write(&path, text).unwrap();
        let form = load_prime_table(&path).unwrap();
        assert_eq!(prime_table_coverage(&form), 210);
        let rebuilt = build_from_prime_table(&form, 200).unwrap();
        assert_eq!(rebuilt.a_exact, t.a_exact);
        assert!(build_from_prime_table(&form, 300).is_err());
    }
}
