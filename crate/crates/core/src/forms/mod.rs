//! Hecke eigenforms and their Fourier coefficients.
//!
//! A [`FormSpec`] names a form by weight, level and nebentypus together with
//! a coefficient source: either an eta quotient (expanded exactly in
//! integers) or an explicit table of prime eigenvalues (extended by the
//! Hecke recurrence). [`build_coeff_table`] produces a [`CoeffTable`] holding
//! both `a(n)` and the normalised `r(n) = a(n) n^{(1-k)/2}`, and rejects any
//! table that breaks multiplicativity, the Hecke recurrence or Deligne's
//! bound.

mod eta;
mod hecke;
mod io;

pub use eta::{expand_eta_product, leading_power};
pub use hecke::{reconstruct_exact, reconstruct_from_primes, verify_exact, verify_normalized};
pub use io::{
    build_from_prime_table, load_prime_table, prime_table_coverage, read_coeff_cache,
    write_coeff_cache, COEFF_CACHE_HEADER,
};

use crate::arith::{factorize, gcd, legendre};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// A Dirichlet character modulo `D`.
#[derive(Debug, Clone, PartialEq)]
pub enum Character {
    /// `chi(n) = 1` if `gcd(n, D) = 1`, else 0.
    Principal { modulus: u64 },
    /// Legendre symbol modulo an odd prime.
    Quadratic { modulus: u64 },
    /// Explicit values on the residues `0..modulus`.
    Table { modulus: u64, values: Vec<Complex64> },
}

impl Character {
    pub fn modulus(&self) -> u64 {
        match self {
            Character::Principal { modulus }
            | Character::Quadratic { modulus }
            | Character::Table { modulus, .. } => *modulus,
        }
    }

    /// Integer value for real characters, `None` for a complex table.
    pub fn integer_value(&self, n: u64) -> Option<i64> {
        match self {
            Character::Principal { modulus } => Some(i64::from(gcd(n, *modulus) == 1)),
            Character::Quadratic { modulus } => Some(legendre(n as i64, *modulus) as i64),
            Character::Table { modulus, values } => {
                let v = values[(n % modulus) as usize];
                (v.im == 0.0 && v.re == v.re.round()).then_some(v.re as i64)
            }
        }
    }

    pub fn value(&self, n: u64) -> Complex64 {
        match self {
            Character::Table { modulus, values } => values[(n % modulus) as usize],
            _ => Complex64::new(self.integer_value(n).unwrap_or(0) as f64, 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Character::Table { values, .. } => values.iter().all(|v| v.im == 0.0),
            _ => true,
        }
    }

    /// Checks `chi(1) = 1`, the zero set, unit modulus on units and complete
    /// multiplicativity modulo `D`.
    pub fn validate(&self) -> Result<()> {
        let d = self.modulus();
        if d == 0 {
            return Err(Error::Forms("character modulus must be positive".into()));
        }
        if let Character::Quadratic { modulus } = self {
            if *modulus < 3 || !crate::arith::is_prime(*modulus) {
                return Err(Error::Forms(format!("quadratic character needs an odd prime modulus, got {modulus}")));
            }
        }
        if let Character::Table { values, .. } = self {
            if values.len() as u64 != d {
                return Err(Error::Forms("character table length differs from modulus".into()));
            }
        }
        const TOL: f64 = 1e-12;
        if (self.value(1) - 1.0).norm() > TOL {
            return Err(Error::Forms("character must satisfy chi(1) = 1".into()));
        }
        for a in 0..d {
            let va = self.value(a);
            let unit = gcd(a, d) == 1;
            if unit && (va.norm() - 1.0).abs() > TOL {
                return Err(Error::Forms(format!("chi({a}) is not on the unit circle")));
            }
            if !unit && va.norm() > TOL {
                return Err(Error::Forms(format!("chi({a}) must vanish since gcd({a}, {d}) > 1")));
            }
            if d <= 1000 {
                for b in 0..d {
                    if (self.value(a * b) - va * self.value(b)).norm() > TOL {
                        return Err(Error::Forms(format!("character not multiplicative at ({a}, {b})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Where the Fourier coefficients come from.
#[derive(Debug, Clone, PartialEq)]
pub enum FormSource {
    /// `prod_i eta(scale_i z)^{exponent_i}`.
    EtaProduct(Vec<(u64, i32)>),
    /// Normalised eigenvalues `r(p)` for every prime `p` up to some bound.
    PrimeTable(Vec<(u64, Complex64)>),
    /// Exact integer eigenvalues `a(p)` for every prime `p` up to some bound.
    IntegerPrimeTable(Vec<(u64, i128)>),
}

/// Arithmetic identity of a cusp form.
#[derive(Debug, Clone, PartialEq)]
pub struct FormSpec {
    pub id: String,
    pub weight: u32,
    pub level: u64,
    pub character: Character,
    /// Root number of the functional equation, once computed.
    pub root_number: Option<Complex64>,
    pub source: FormSource,
}

impl FormSpec {
    /// The discriminant function, weight 12 and level 1.
    pub fn delta() -> Self {
        Self {
            id: "delta".into(),
            weight: 12,
            level: 1,
            character: Character::Principal { modulus: 1 },
            root_number: None,
            source: FormSource::EtaProduct(vec![(1, 24)]),
        }
    }

    /// `eta(z) eta(23 z)`, weight 1, level 23, quadratic nebentypus.
    pub fn f23() -> Self {
        Self {
            id: "f23".into(),
            weight: 1,
            level: 23,
            character: Character::Quadratic { modulus: 23 },
            root_number: None,
            source: FormSource::EtaProduct(vec![(1, 1), (23, 1)]),
        }
    }

    pub fn builtin(id: &str) -> Result<Self> {
        match id {
            "delta" => Ok(Self::delta()),
            "f23" => Ok(Self::f23()),
            other => Err(Error::InvalidArgument(format!(
                "unknown built-in form '{other}' (expected delta or f23)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.weight == 0 || self.level == 0 {
            return Err(Error::Forms("weight and level must be positive".into()));
        }
        if self.character.modulus() != self.level {
            return Err(Error::Forms(format!(
                "character modulus {} differs from level {}",
                self.character.modulus(),
                self.level
            )));
        }
        self.character.validate()?;
        if let Some(theta) = self.root_number {
            if (theta.norm() - 1.0).abs() > 1e-8 {
                return Err(Error::Forms(format!("root number {theta} is not unimodular")));
            }
        }
        Ok(())
    }

    /// `chi(p) p^{k-1}` as an exact integer, when the character is real.
    pub(crate) fn hecke_weight_exact(&self, p: u64) -> Option<i128> {
        let chi = self.character.integer_value(p)? as i128;
        let mut pk = 1i128;
        for _ in 1..self.weight {
            pk = pk.checked_mul(p as i128)?;
        }
        Some(chi * pk)
    }
}

/// Coefficients of a form up to `n_max`.
///
/// All vectors are indexed by `n`; entry 0 is zero and unused.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    pub form: Arc<FormSpec>,
    pub n_max: usize,
    /// Exact integer coefficients, when the source provides them.
    pub a_exact: Option<Vec<i128>>,
    pub a: Vec<Complex64>,
    pub r: Vec<Complex64>,
}

impl CoeffTable {
    pub(crate) fn from_exact(form: Arc<FormSpec>, a_exact: Vec<i128>) -> Self {
        let n_max = a_exact.len() - 1;
        let k = form.weight as f64;
        let mut a = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut r = a.clone();
        for n in 1..=n_max {
            a[n] = Complex64::new(a_exact[n] as f64, 0.0);
            r[n] = a[n] * (n as f64).powf((1.0 - k) / 2.0);
        }
        Self {
            form,
            n_max,
            a_exact: Some(a_exact),
            a,
            r,
        }
    }

    pub(crate) fn from_normalized(form: Arc<FormSpec>, r: Vec<Complex64>) -> Self {
        let n_max = r.len() - 1;
        let k = form.weight as f64;
        let mut a = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for n in 1..=n_max {
            a[n] = r[n] * (n as f64).powf((k - 1.0) / 2.0);
        }
        Self {
            form,
            n_max,
            a_exact: None,
            a,
            r,
        }
    }

    pub fn weight(&self) -> u32 {
        self.form.weight
    }

    pub fn level(&self) -> u64 {
        self.form.level
    }

    pub fn chi(&self, n: u64) -> Complex64 {
        self.form.character.value(n)
    }

    /// True when every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.r.iter().all(|z| z.im == 0.0)
    }

    /// `r(n)` for `n <= n_max`, zero for `n = 0`.
    pub fn r_at(&self, n: u64) -> Result<Complex64> {
        if n as usize > self.n_max {
            return Err(Error::Coverage {
                required: n,
                available: self.n_max as u64,
            });
        }
        Ok(self.r[n as usize])
    }

    /// `r(p^j)` for `j = 0..=max_j` by the Hecke recurrence, for a prime
    /// `p <= n_max`.
    pub fn prime_power_series(&self, p: u64, max_j: usize) -> Result<Vec<Complex64>> {
        let rp = self.r_at(p)?;
        let chi = self.chi(p);
        let mut out = Vec::with_capacity(max_j + 1);
        out.push(Complex64::new(1.0, 0.0));
        if max_j >= 1 {
            out.push(rp);
        }
        for j in 2..=max_j {
            let next = rp * out[j - 1] - chi * out[j - 2];
            out.push(next);
        }
        Ok(out)
    }

    /// `r(n)` for arbitrary `n`, through factorization, the Hecke recurrence
    /// and multiplicativity. Every prime factor of `n` must be `<= n_max`.
    pub fn r_extended(&self, n: u64) -> Result<Complex64> {
        if n == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if (n as usize) <= self.n_max {
            return Ok(self.r[n as usize]);
        }
        let mut out = Complex64::new(1.0, 0.0);
        for (p, e) in factorize(n) {
            let pe = p.checked_pow(e).unwrap_or(u64::MAX);
            if (pe as usize) <= self.n_max {
                out *= self.r[pe as usize];
            } else {
                out *= self.prime_power_series(p, e as usize)?[e as usize];
            }
        }
        Ok(out)
    }

    /// Returns a copy whose form carries the given root number.
    pub fn with_root_number(&self, theta: Complex64) -> Result<Self> {
        let mut form = (*self.form).clone();
        form.root_number = Some(theta);
        form.validate()?;
        let mut out = self.clone();
        out.form = Arc::new(form);
        Ok(out)
    }

    /// Prime eigenvalues `(p, r(p))` for primes up to `n_max`.
    pub fn prime_values(&self) -> Vec<(u64, Complex64)> {
        crate::arith::primes_up_to(self.n_max as u64)
            .into_iter()
            .map(|p| (p, self.r[p as usize]))
            .collect()
    }

    /// Exact `(p, a(p))` for primes up to `n_max`, when available.
    pub fn exact_prime_values(&self) -> Option<Vec<(u64, i128)>> {
        let a = self.a_exact.as_ref()?;
        Some(
            crate::arith::primes_up_to(self.n_max as u64)
                .into_iter()
                .map(|p| (p, a[p as usize]))
                .collect(),
        )
    }
}

/// Builds and validates the coefficient table of `form` up to `n_max`.
pub fn build_coeff_table(form: &FormSpec, n_max: usize) -> Result<CoeffTable> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    form.validate()?;
    let form = Arc::new(form.clone());
    let table = match &form.source {
        FormSource::EtaProduct(factors) => {
            let a = expand_eta_product(factors, n_max)?;
            CoeffTable::from_exact(form.clone(), a)
        }
        FormSource::IntegerPrimeTable(primes) => {
            let a = reconstruct_exact(primes, &form, n_max)?;
            CoeffTable::from_exact(form.clone(), a)
        }
        FormSource::PrimeTable(primes) => {
            let r = hecke::reconstruct_normalized(primes, &form.character, n_max)?;
            CoeffTable::from_normalized(form.clone(), r)
        }
    };
    if let Some(a) = &table.a_exact {
        verify_exact(&table.form, a)?;
    }
    verify_normalized(&table)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_specs_validate() {
        FormSpec::delta().validate().unwrap();
        FormSpec::f23().validate().unwrap();
        assert!(FormSpec::builtin("nope").is_err());
        let mut bad = FormSpec::f23();
        bad.level = 22;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn character_periodicity() {
        let chi = FormSpec::f23().character;
        for n in 0..200u64 {
            assert_eq!(chi.value(n), chi.value(n + 23));
        }
        assert_eq!(chi.integer_value(2), Some(1));
        assert_eq!(chi.integer_value(46), Some(0));
    }

    #[test]
    fn small_tables() {
        let t = build_coeff_table(&FormSpec::delta(), 6).unwrap();
        assert!((t.r[6] - t.r[2] * t.r[3]).norm() < 1e-15);
        let t = build_coeff_table(&FormSpec::delta(), 2).unwrap();
        assert!((t.r[2].re - (-24.0 * 2f64.powf(-5.5))).abs() < 1e-15);
        assert!((t.r[2].re + 0.530_330_085_889_910_6).abs() < 1e-12);
        let t = build_coeff_table(&FormSpec::f23(), 4).unwrap();
        assert_eq!(t.r[4], t.r[2] * t.r[2] - t.chi(2) * t.r[1]);
        assert_eq!(t.r[4].re, 0.0);
    }

    #[test]
    fn extended_values_match_table() {
        let t = build_coeff_table(&FormSpec::delta(), 2000).unwrap();
        let small = CoeffTable {
            r: t.r[..=100].to_vec(),
            a: t.a[..=100].to_vec(),
            a_exact: None,
            n_max: 100,
            form: t.form.clone(),
        };
        for n in [128u64, 243, 360, 1024, 1331, 1500, 1997] {
            if factorize(n).iter().all(|&(p, _)| p <= 100) {
                let v = small.r_extended(n).unwrap();
                assert!((v - t.r[n as usize]).norm() < 1e-12, "n = {n}");
            }
        }
        assert!(small.r_extended(101 * 2).is_err());
    }
}
