//! Command-line front end: argument parsing, configuration, the coefficient
//! cache and the subcommands that drive `critline`.

pub mod cache;
pub mod commands;
pub mod config;
pub mod context;
pub mod error;
pub mod verify;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use error::CliResult;
use std::ffi::OsString;
use std::path::PathBuf;
use verify::Target;

#[derive(Debug, Parser)]
#[command(name = "critline", version, about = "Zeros and mollified sign changes of degree-two L-functions")]
pub struct Cli {
    #[command(flatten)]
    pub opts: ConfigArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags that override the config file; all are global.
#[derive(Debug, Args, Default)]
pub struct ConfigArgs {
    /// Flat `key = value` config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Built-in form: delta or f23
    #[arg(long, global = true)]
    pub form: Option<String>,
    /// Prime-eigenvalue table of a custom form
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    /// Mollifier length X
    #[arg(long = "X", visible_alias = "x", global = true)]
    pub x: Option<f64>,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub h1: Option<f64>,
    /// Height T
    #[arg(long = "T", visible_alias = "t", global = true)]
    pub t: Option<f64>,
    /// Detection grid step
    #[arg(long, global = true)]
    pub step: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "out-dir", global = true)]
    pub out_dir: Option<PathBuf>,
    /// Print the advisory parameter schedule for T first
    #[arg(long, global = true)]
    pub schedule: bool,
    /// Constant A of the advisory schedule
    #[arg(long = "A", global = true)]
    pub a: Option<f64>,
    /// Half-length T0 of the mean-square window
    #[arg(long = "T0", global = true)]
    pub t0: Option<f64>,
    /// printed or weight-corrected
    #[arg(long = "g-kernel", global = true)]
    pub g_kernel: Option<String>,
    /// Also write two-column CSVs for plotting
    #[arg(long = "emit-plot-data", global = true)]
    pub emit_plot_data: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or load the coefficient table and store it in the cache
    Coeffs,
    /// Locate zeros on the critical line up to T and count them
    Zeros,
    /// Write the mollifier coefficients alpha and beta
    Mollifier,
    /// Classify the detection grid and bound the number of sign changes
    Detect,
    /// Tabulate the mean-square kernel G(y)
    Gprofile {
        #[arg(long = "y-min", default_value_t = 1.0)]
        y_min: f64,
        #[arg(long = "y-max", default_value_t = 3.0)]
        y_max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// Run identity checks and write their reports
    Verify {
        #[arg(value_enum, default_value_t = Target::All)]
        target: Target,
    },
    /// Print the advisory parameters for a height T
    Schedule,
    /// Print the effective configuration in config-file form
    Config,
}

impl ConfigArgs {
    /// Config file (if any) with the flags applied on top.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.form {
            c.form = v.clone();
        }
        if let Some(v) = &self.table {
            c.table = Some(v.clone());
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(n_max, x, delta, h1, t, step, tol, a, t0);
        if let Some(v) = &self.out_dir {
            c.out_dir = v.clone();
        }
        if self.schedule {
            c.schedule = true;
        }
        if let Some(v) = &self.g_kernel {
            c.g_kernel = config::parse_g_kernel(v)?;
        }
        Ok(c)
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let cfg = cli.opts.resolve()?;
    if let Command::Config = cli.command {
        cfg.validate()?;
        print!("{}", cfg.to_text());
        return Ok(());
    }
    if let Command::Schedule = cli.command {
        return commands::schedule(&cfg);
    }
    if cfg.schedule {
        commands::schedule(&cfg)?;
    }
    let ctx = context::Ctx::new(cfg)?;
    std::fs::create_dir_all(&ctx.cfg.out_dir)?;
    let plot = cli.opts.emit_plot_data;
    match &cli.command {
        Command::Coeffs => commands::coeffs(&ctx),
        Command::Zeros => commands::zeros(&ctx, plot),
        Command::Mollifier => commands::mollifier(&ctx),
        Command::Detect => commands::detect(&ctx, plot),
        Command::Gprofile { y_min, y_max, points } => commands::gprofile(&ctx, *y_min, *y_max, *points, plot),
        Command::Verify { target } => commands::verify(&ctx, *target),
        Command::Schedule | Command::Config => unreachable!("handled before the cache is opened"),
    }
}
