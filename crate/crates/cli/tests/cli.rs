use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn toa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toa"))
        .args(args)
        .output()
        .expect("toa binary runs")
}

fn demo(kind: &str) -> String {
    let out = toa(&["demo", kind]);
    assert!(out.status.success(), "demo {kind}");
    String::from_utf8(out.stdout).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_to_string(config: &Path, out: &Path, extra: &[&str]) -> String {
    let mut args = vec![
        "run",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let res = toa(&args);
    assert!(
        res.status.success(),
        "run failed: {}",
        String::from_utf8_lossy(&res.stderr)
    );
    let name = String::from_utf8(res.stdout).unwrap();
    let path = name.trim().strip_prefix("wrote ").unwrap().to_string();
    std::fs::read_to_string(path).unwrap()
}

/// Column header and numeric rows of a CSV written by `toa run`.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let (header, rows) = table(csv);
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn density_integrates_to_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "d.toml", &demo("density"));
    let csv = run_to_string(&cfg, dir.path(), &[]);
    let tau = column(&csv, "tau");
    let rho = column(&csv, "density");
    let h = tau[1] - tau[0];
    let n = rho.len();
    let integral = h * (rho[1..n - 1].iter().sum::<f64>() + 0.5 * (rho[0] + rho[n - 1]));
    assert!((integral - 1.0).abs() < 1e-3, "{integral}");
}

#[test]
fn mean_time_routes_agree() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "m.toml", &demo("means"));
    let csv = run_to_string(&cfg, dir.path(), &[]);
    let (_, rows) = table(&csv);
    let routes: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(
        routes,
        ["spectral", "current", "ab_operator", "grt_operator"]
    );
    let values = column(&csv, "value");
    let spectral = values[0];
    for v in &values {
        assert!((v - spectral).abs() < 5e-3 * spectral.abs(), "{values:?}");
    }
}

#[test]
fn output_is_byte_deterministic_and_finite() {
    let dir = TempDir::new().unwrap();
    for kind in ["currents", "negative_flux", "barrier"] {
        let cfg = write_config(dir.path(), &format!("{kind}.toml"), &demo(kind));
        let a = run_to_string(&cfg, &dir.path().join("a"), &[]);
        let b = run_to_string(&cfg, &dir.path().join("b"), &["--threads", "1"]);
        assert_eq!(a, b, "{kind}");
        let lower = a.to_lowercase();
        assert!(!lower.contains("nan") && !lower.contains("inf"), "{kind}");
        assert!(!a.contains('\r'));
        assert!(a.ends_with('\n'));
    }
}

#[test]
fn header_block_precedes_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &demo("currents"));
    let csv = run_to_string(&cfg, dir.path(), &[]);
    assert!(csv.starts_with("# kind = \"currents\"\n"));
    assert!(csv.contains("# [grid]\n# nodes = "));
    let (header, rows) = table(&csv);
    assert_eq!(header, ["tau", "j", "j_plus"]);
    assert_eq!(rows.len(), 4001);
    // 17 significant digits in every numeric cell
    for cell in &rows[7] {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(
            mantissa.chars().filter(char::is_ascii_digit).count(),
            17,
            "{cell}"
        );
    }
}

#[test]
fn every_demo_validates() {
    let dir = TempDir::new().unwrap();
    for kind in [
        "density",
        "currents",
        "means",
        "negative_flux",
        "semiclassical",
        "barrier",
        "wigner_check",
    ] {
        let cfg = write_config(dir.path(), &format!("{kind}.toml"), &demo(kind));
        let out = toa(&["validate", cfg.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{kind}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8(out.stdout).unwrap().starts_with("ok:"));
    }
}

#[test]
fn negative_spread_is_a_config_error_naming_the_field() {
    let dir = TempDir::new().unwrap();
    let text = demo("density").replace("spread = 0.05", "spread = -0.05");
    let cfg = write_config(dir.path(), "bad.toml", &text);
    let cfg = cfg.to_str().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    for args in [vec!["validate", cfg], vec!["run", cfg, "--out", out_dir]] {
        let out = toa(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("packet.component[0].spread"), "{err}");
    }
}

#[test]
fn syntax_error_reports_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "kind = \"density\"\ndetector = \n");
    let out = toa(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
}

#[test]
fn short_window_is_a_computation_error() {
    let dir = TempDir::new().unwrap();
    let text = demo("means")
        .replace("start = -150.0", "start = 0.0")
        .replace("end = 250.0", "end = 20.0");
    let cfg = write_config(dir.path(), "short.toml", &text);
    let out = toa(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("means scenario") && err.contains("window"),
        "{err}"
    );
    assert!(!dir.path().join("means.csv").exists());
}

#[test]
fn io_failures_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.toml");
    assert_eq!(
        toa(&["run", missing.to_str().unwrap()]).status.code(),
        Some(3)
    );

    let cfg = write_config(dir.path(), "d.toml", &demo("wigner_check"));
    let blocker = write_config(dir.path(), "not_a_dir", "");
    let out = toa(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(toa(&["demo", "nonsense"]).status.code(), Some(1));
    assert_eq!(toa(&[]).status.code(), Some(1));
    assert_eq!(toa(&["--help"]).status.code(), Some(0));
}

#[test]
fn zero_threads_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "d.toml", &demo("wigner_check"));
    let out = toa(&["run", cfg.to_str().unwrap(), "--threads", "0"]);
    assert_eq!(out.status.code(), Some(1));
}
