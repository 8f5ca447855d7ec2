//! Run configuration: defaults, a flat `key = value` file, and flag overrides.

use crate::error::{CliError, CliResult};
use critline::detector::GKernel;
use critline::mollifier::{DetectorParams, DEFAULT_SCHEDULE_A};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Every tunable of a run. Keys in the config file are the field names.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Built-in form id (`delta`, `f23`); ignored when `table` is set.
    pub form: String,
    /// Prime-eigenvalue table of a custom form.
    pub table: Option<PathBuf>,
    pub n_max: usize,
    /// Mollifier length `X`.
    pub x: f64,
    pub delta: f64,
    pub h1: f64,
    /// Height `T`.
    pub t: f64,
    /// Detection grid step.
    pub step: f64,
    pub tol: f64,
    pub out_dir: PathBuf,
    /// Print the advisory schedule for `t` before running.
    pub schedule: bool,
    /// Constant `A` of the advisory schedule.
    pub a: f64,
    /// Half-length of the mean-square window.
    pub t0: f64,
    pub g_kernel: GKernel,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            form: "delta".into(),
            table: None,
            n_max: 100_000,
            x: 300.0,
            delta: 0.05,
            h1: 0.3,
            t: 40.0,
            step: 0.075,
            tol: 1e-6,
            out_dir: PathBuf::from("critline-out"),
            schedule: false,
            a: DEFAULT_SCHEDULE_A,
            t0: 20.0,
            g_kernel: GKernel::Printed,
        }
    }
}

pub const CONFIG_KEYS: [&str; 14] = [
    "form", "table", "n_max", "x", "delta", "h1", "t", "step", "tol", "out_dir", "schedule", "a", "t0", "g_kernel",
];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| usage(format!("{key}: cannot parse {v:?}")))
}

pub fn parse_g_kernel(v: &str) -> CliResult<GKernel> {
    match v {
        "printed" => Ok(GKernel::Printed),
        "weight-corrected" => Ok(GKernel::WeightCorrected),
        _ => Err(usage(format!("g_kernel: expected printed or weight-corrected, got {v:?}"))),
    }
}

impl RunConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, v: &str) -> CliResult<()> {
        match key {
            "form" => self.form = v.to_string(),
            "table" => self.table = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "n_max" => self.n_max = parse_num(key, v)?,
            "x" => self.x = parse_num(key, v)?,
            "delta" => self.delta = parse_num(key, v)?,
            "h1" => self.h1 = parse_num(key, v)?,
            "t" => self.t = parse_num(key, v)?,
            "step" => self.step = parse_num(key, v)?,
            "tol" => self.tol = parse_num(key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "schedule" => self.schedule = parse_num(key, v)?,
            "a" => self.a = parse_num(key, v)?,
            "t0" => self.t0 = parse_num(key, v)?,
            "g_kernel" => self.g_kernel = parse_g_kernel(v)?,
            _ => return Err(usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Applies a config file body over `self`. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> CliResult<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut c = Self::default();
        c.apply_text(&text)?;
        Ok(c)
    }

    /// The file form; floats use the shortest round-tripping decimal, so
    /// `apply_text(to_text())` reproduces `self` exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let table = self.table.as_ref().map_or(String::new(), |p| p.display().to_string());
        let kernel = self.g_kernel.as_str();
        let pairs: [(&str, String); 14] = [
            ("form", self.form.clone()),
            ("table", table),
            ("n_max", self.n_max.to_string()),
            ("x", self.x.to_string()),
            ("delta", self.delta.to_string()),
            ("h1", self.h1.to_string()),
            ("t", self.t.to_string()),
            ("step", self.step.to_string()),
            ("tol", self.tol.to_string()),
            ("out_dir", self.out_dir.display().to_string()),
            ("schedule", self.schedule.to_string()),
            ("a", self.a.to_string()),
            ("t0", self.t0.to_string()),
            ("g_kernel", kernel.to_string()),
        ];
        for (k, v) in pairs {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn detector_params(&self) -> CliResult<DetectorParams> {
        Ok(DetectorParams::new(self.delta, self.h1, self.x)?)
    }

    /// Range checks shared by every subcommand.
    pub fn validate(&self) -> CliResult<()> {
        if self.n_max == 0 {
            return Err(usage("n_max must be positive"));
        }
        if !(self.t > 1.0 && self.t.is_finite()) {
            return Err(usage(format!("t = {} must be a finite real > 1", self.t)));
        }
        if !(self.step > 0.0) {
            return Err(usage(format!("step = {} must be positive", self.step)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(usage(format!("tol = {} must lie in (0, 1)", self.tol)));
        }
        if !(self.a > 0.0) {
            return Err(usage(format!("a = {} must be positive", self.a)));
        }
        if !(self.t0 > 0.0) {
            return Err(usage(format!("t0 = {} must be positive", self.t0)));
        }
        if self.table.is_none() && !["delta", "f23"].contains(&self.form.as_str()) {
            return Err(usage(format!("unknown form {:?} (expected delta or f23, or set table)", self.form)));
        }
        self.detector_params().map_err(|e| usage(e.to_string()))?;
        Ok(())
    }
}
