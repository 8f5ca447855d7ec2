use critline::detector::GKernel;
use critline_cli::cache::{Cache, LOCK_FILE};
use critline_cli::config::RunConfig;
use proptest::prelude::*;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critline"))
        .args(args)
        .env("CRITLINE_CACHE_DIR", cache)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn coeffs_writes_cache_with_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let o = bin(&["coeffs", "--form", "delta", "--n-max", "1000"], &cache);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(cache.join("delta-n1000.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "form_id,k,D,n,a_re,a_im");
    assert_eq!(lines.len(), 1001);
    assert_eq!(lines[2], "delta,12,1,2,-24,0");
    assert!(!cache.join(LOCK_FILE).exists());
}

#[test]
fn verify_moebius_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = bin(&["verify", "moebius", "--out-dir", out.to_str().unwrap()], &dir.path().join("c"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS moebius")).count() == 3);
    let csv = std::fs::read_to_string(out.join("verify-moebius.csv")).unwrap();
    assert!(csv.starts_with("name,params,value_re,value_im,oracle_re,oracle_im,discrepancy,tail_bound\n"));
    let summary = std::fs::read_to_string(out.join("verify-summary.csv")).unwrap();
    assert!(summary.starts_with("target,name,params,status\n"));
}

#[test]
fn schedule_warns_about_trivial_mollifier() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["schedule", "--T", "1e6"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("delta = 1e-6"), "{s}");
    assert!(s.contains("10^0.0600"), "{s}");
    assert!(s.contains("X < 257"), "{s}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["zeros", "--no-such-flag"], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["detect", "--delta", "0.5"], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["verify", "everything"], dir.path()).status.code(), Some(2));
    let o = bin(&["gprofile", "--g-kernel", "other"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("g_kernel"));
}

#[test]
fn numeric_contract_errors_exit_three_and_name_the_module() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = bin(
        &["gprofile", "--n-max", "500", "--points", "2", "--out-dir", out.to_str().unwrap()],
        &dir.path().join("c"),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("coefficient table too short"));
}

#[test]
fn locked_cache_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c");
    std::fs::create_dir_all(&cache).unwrap();
    std::fs::write(cache.join(LOCK_FILE), "1\n").unwrap();
    let o = bin(&["coeffs", "--n-max", "10"], &cache);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("locked"));
}

#[test]
fn cache_lock_is_exclusive_and_released() {
    let dir = tempfile::tempdir().unwrap();
    let c = Cache::open(dir.path()).unwrap();
    assert!(dir.path().join(LOCK_FILE).exists());
    drop(c);
    assert!(!dir.path().join(LOCK_FILE).exists());
}

#[test]
fn cached_table_matches_fresh_build() {
    let dir = tempfile::tempdir().unwrap();
    let form = critline::forms::FormSpec::f23();
    let first = Cache::open(dir.path()).unwrap().table(&form, 3000).unwrap();
    let second = Cache::open(dir.path()).unwrap().table(&form, 3000).unwrap();
    assert_eq!(first.a_exact, second.a_exact);
    for n in 1..=3000 {
        assert_eq!(first.r[n].re.to_bits(), second.r[n].re.to_bits());
        assert_eq!(first.r[n].im.to_bits(), second.r[n].im.to_bits());
    }
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# detector run\nx = 600\nh1 = 0.25\n\nstep = 0.0625\ng_kernel = weight-corrected\n").unwrap();
    let o = bin(&["config", "--config", path.to_str().unwrap(), "--h1", "0.2", "--step", "0.05"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let mut c = RunConfig::default();
    c.apply_text(&stdout(&o)).unwrap();
    assert_eq!(c.x, 600.0);
    assert_eq!(c.h1, 0.2);
    assert_eq!(c.step, 0.05);
    assert_eq!(c.g_kernel, GKernel::WeightCorrected);
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    assert_eq!(bin(&["config", "--config", bad.to_str().unwrap()], dir.path()).status.code(), Some(2));
}

#[test]
fn repeated_verify_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c");
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = bin(&["verify", "bessel-mellin", "--out-dir", out.to_str().unwrap()], &cache);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out.join("verify-bessel-mellin.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(
        n_max in 1usize..1_000_000,
        x in 3.0f64..1e6,
        delta in 1e-9f64..0.0999,
        h1 in 1e-3f64..0.999,
        t in 1.0001f64..1e9,
        tol in 1e-15f64..0.5,
        a in 0.1f64..100.0,
        schedule: bool,
        corrected: bool,
        table in proptest::option::of("[a-z]{1,8}\\.txt"),
    ) {
        let c = RunConfig {
            form: "f23".into(),
            table: table.map(PathBuf::from),
            n_max,
            x,
            delta,
            h1,
            t,
            step: h1 / 4.0,
            tol,
            out_dir: PathBuf::from("runs/out"),
            schedule,
            a,
            t0: t / 3.0,
            g_kernel: if corrected { GKernel::WeightCorrected } else { GKernel::Printed },
        };
        let mut back = RunConfig::default();
        back.apply_text(&c.to_text()).unwrap();
        prop_assert_eq!(back, c);
    }
}
