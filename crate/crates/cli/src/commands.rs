use crate::config::RunConfig;
use crate::context::Ctx;
use crate::error::{CliError, CliResult};
use crate::verify::{self, Status, Target};
use critline::detector::{detect_intervals, write_g_profile, GContext};
use critline::lfunc::LFunction;
use critline::mollifier::{advisory_schedule, build_mollifier};
use critline::sums::write_sum_reports;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Writes `name` under the output directory in one piece.
fn write_file(dir: &Path, name: &str, f: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    f(&mut w)?;
    w.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Two-column CSV for plotting.
fn write_pairs(dir: &Path, name: &str, header: [&str; 2], rows: &[(f64, f64)]) -> CliResult<()> {
    write_file(dir, name, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(header)?;
        for (a, b) in rows {
            out.write_record([format!("{a:.17e}"), format!("{b:.17e}")])?;
        }
        out.flush()?;
        Ok(())
    })
}

pub fn schedule(cfg: &RunConfig) -> CliResult<()> {
    let s = advisory_schedule(cfg.t, cfg.a)?;
    println!("T     = {:e}", s.t);
    println!("A     = {}", s.a);
    println!("delta = {:e}", s.delta);
    println!("X     = {} (= T^0.01 = 10^{:.4})", s.x, s.x.log10());
    println!("h1    = {}", s.h1);
    if s.trivial_mollifier {
        println!("warning: X < 257, so the mollifier support is {{1}} and phi = 1");
    }
    if !s.legal {
        println!("warning: the schedule leaves the legal range (needs delta < 0.1 and h1 < 1)");
    }
    Ok(())
}

pub fn coeffs(ctx: &Ctx) -> CliResult<()> {
    let table = ctx.table(ctx.cfg.n_max)?;
    if ctx.cfg.table.is_some() {
        let name = format!("{}-n{}.csv", table.form.id, table.n_max);
        return write_file(&ctx.cfg.out_dir, &name, |w| Ok(critline::forms::write_coeff_cache(&table, w)?));
    }
    println!("{}", ctx.cache.table_path(&ctx.form, ctx.cfg.n_max).display());
    Ok(())
}

pub fn zeros(ctx: &Ctx, plot: bool) -> CliResult<()> {
    let lf = LFunction::new(ctx.table(ctx.cfg.n_max)?)?;
    let rep = lf.count_zeros(ctx.cfg.t)?;
    write_file(&ctx.cfg.out_dir, "zeros.csv", |w| Ok(rep.write_csv(w)?))?;
    println!(
        "T = {}: {} sign changes, argument principle N(T) = {}",
        rep.t_max, rep.count_signs, rep.count_argument
    );
    if plot {
        let n = (rep.t_max / 0.05).floor() as usize;
        let mut rows = Vec::with_capacity(n);
        for j in 1..=n {
            let t = j as f64 * 0.05;
            rows.push((t, lf.hardy_z(t)?.z));
        }
        write_pairs(&ctx.cfg.out_dir, "zeros-z.csv", ["t", "Z"], &rows)?;
    }
    if rep.count_signs as i64 != rep.count_argument {
        return Err(CliError::Verification(format!(
            "{} sign changes but N(T) = {}",
            rep.count_signs, rep.count_argument
        )));
    }
    Ok(())
}

pub fn mollifier(ctx: &Ctx) -> CliResult<()> {
    let table = ctx.table(ctx.cfg.n_max)?;
    let m = build_mollifier(&table, ctx.cfg.x)?;
    write_file(&ctx.cfg.out_dir, "mollifier.csv", |w| Ok(m.write_csv(w)?))?;
    println!("support size {}", m.support.len());
    Ok(())
}

pub fn detect(ctx: &Ctx, plot: bool) -> CliResult<()> {
    let cfg = &ctx.cfg;
    let p = cfg.detector_params()?;
    if p.advisory() {
        println!("note: delta X^86 e^(1/h1) > 1; outside the asymptotic regime");
    }
    let lf = LFunction::new(ctx.table(cfg.n_max)?)?;
    let m = build_mollifier(lf.table(), cfg.x)?;
    let rep = detect_intervals(&lf, &m, &p, cfg.t, cfg.step)?;
    write_file(&cfg.out_dir, "detection.csv", |w| Ok(rep.write_csv(w)?))?;
    let e1 = rep.e1_points().count();
    println!(
        "E1 points {e1}, mu(E1) = {}, N0 >= {}, direct sign changes {}",
        rep.mu_e1, rep.n0_bound, rep.direct_sign_changes
    );
    if plot {
        let i1: Vec<(f64, f64)> = rep.records.iter().map(|r| (r.t, r.i1)).collect();
        let i2: Vec<(f64, f64)> = rep.records.iter().map(|r| (r.t, r.i2)).collect();
        write_pairs(&cfg.out_dir, "detection-i1.csv", ["t", "I1"], &i1)?;
        write_pairs(&cfg.out_dir, "detection-i2.csv", ["t", "I2"], &i2)?;
    }
    if !rep.all_e1_confirmed() || rep.n0_bound > rep.direct_sign_changes as f64 {
        return Err(CliError::Verification(
            "an E1 window lacks a verified sign change or the lower bound exceeds the direct count".into(),
        ));
    }
    Ok(())
}

pub fn gprofile(ctx: &Ctx, y_min: f64, y_max: f64, points: usize, plot: bool) -> CliResult<()> {
    if points < 2 || !(y_max > y_min) || !(y_min >= 1.0) {
        return Err(CliError::Usage("gprofile needs 1 <= y-min < y-max and at least 2 points".into()));
    }
    let cfg = &ctx.cfg;
    let p = cfg.detector_params()?;
    let table = ctx.table(cfg.n_max)?;
    let m = build_mollifier(&table, cfg.x)?;
    let g = GContext::new(&table, &m, &p, cfg.g_kernel)?;
    let values = (0..points)
        .map(|j| g.eval(y_min + (y_max - y_min) * j as f64 / (points - 1) as f64, cfg.tol))
        .collect::<Result<Vec<_>, _>>()?;
    write_file(&cfg.out_dir, "gprofile.csv", |w| Ok(write_g_profile(&values, w)?))?;
    if plot {
        let rows: Vec<(f64, f64)> = values.iter().map(|v| (v.y, v.g)).collect();
        write_pairs(&cfg.out_dir, "gprofile-plot.csv", ["y", "G"], &rows)?;
    }
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 4] = ["target", "name", "params", "status"];

pub fn verify(ctx: &Ctx, target: Target) -> CliResult<()> {
    let targets: Vec<Target> = if target == Target::All { Target::EACH.to_vec() } else { vec![target] };
    let dir = &ctx.cfg.out_dir;
    let mut summary = csv::Writer::from_writer(Vec::new());
    summary.write_record(SUMMARY_HEADER)?;
    let mut failed = Vec::new();
    for t in targets {
        let out = verify::run(t, ctx)?;
        let reports: Vec<_> = out.checks.iter().map(|c| c.report.clone()).collect();
        write_file(dir, &format!("verify-{}.csv", t.name()), |w| Ok(write_sum_reports(&reports, w)?))?;
        for (name, bytes) in &out.files {
            write_file(dir, name, |w| Ok(w.write_all(bytes)?))?;
        }
        for c in &out.checks {
            println!("{} {} {} {}", c.status.as_str(), t.name(), c.report.name, c.report.params);
            summary.write_record([t.name(), &c.report.name, &c.report.params, c.status.as_str()])?;
            if c.status == Status::Fail {
                failed.push(format!("{}:{}", t.name(), c.report.name));
            }
        }
    }
    let bytes = summary.into_inner().map_err(|e| e.into_error())?;
    write_file(dir, "verify-summary.csv", |w| Ok(w.write_all(&bytes)?))?;
    if failed.is_empty() {
        Ok(())
    } else {
        failed.dedup();
        Err(CliError::Verification(failed.join(", ")))
    }
}
