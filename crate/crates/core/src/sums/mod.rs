//! Arithmetic sums behind the mollifier bounds: K-factors, Selberg sums,
//! Rankin-Selberg series and shifted convolutions.
//!
//! Every sum is reported through [`SumReport`], which carries an independent
//! oracle value whenever one exists.

mod kfactor;
mod rankin;
mod selberg;
mod shifted;

pub use kfactor::{k_factor, r_power, KCache, KFactor, K_MAX_TERMS, K_TAIL_TOL};
pub use rankin::{divisor4_tail, rankin_drift, rankin_mean, rankin_series, RankinDrift, SeriesValue};
pub use selberg::{
    b_function, estimate13_bound_shape, estimate13_sum, moebius_inversion_check, selberg_sum,
    selberg_sum_decomposed, SELBERG_SUPPORT_CAP,
};
pub use shifted::{shifted_convolution, shifted_dirichlet, shifted_l0_box_check, ShiftedSum};

use crate::error::Result;
use num_complex::Complex64;
use std::io::Write;

pub const SUM_CSV_HEADER: &str = "name,params,value_re,value_im,oracle_re,oracle_im,discrepancy,tail_bound";

#[derive(Debug, Clone, PartialEq)]
pub struct SumReport {
    pub name: String,
    /// `key=value` pairs separated by `;`.
    pub params: String,
    pub value: Complex64,
    pub oracle: Option<Complex64>,
    /// `|value - oracle|` when an oracle exists.
    pub discrepancy: Option<f64>,
    pub tail_bound: f64,
}

impl SumReport {
    pub fn new(name: &str, params: String, value: Complex64, tail_bound: f64) -> Self {
        Self {
            name: name.to_string(),
            params,
            value,
            oracle: None,
            discrepancy: None,
            tail_bound,
        }
    }

    pub fn with_oracle(mut self, oracle: Complex64) -> Self {
        self.oracle = Some(oracle);
        self.discrepancy = Some((self.value - oracle).norm());
        self
    }

    /// Discrepancy relative to `max(|oracle|, floor)`.
    pub fn relative_discrepancy(&self, floor: f64) -> Option<f64> {
        let o = self.oracle?;
        Some(self.discrepancy? / o.norm().max(floor))
    }
}

pub fn write_sum_reports<W: Write>(reports: &[SumReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUM_CSV_HEADER.split(','))?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.17e}"));
    for r in reports {
        out.write_record([
            r.name.clone(),
            r.params.clone(),
            format!("{:.17e}", r.value.re),
            format!("{:.17e}", r.value.im),
            opt(r.oracle.map(|o| o.re)),
            opt(r.oracle.map(|o| o.im)),
            opt(r.discrepancy),
            format!("{:.3e}", r.tail_bound),
        ])?;
    }
    out.flush()?;
    Ok(())
}
