use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use antipt_cli::output::sha256_hex;
use antipt_cli::{CliError, EXIT_NUMERIC, EXIT_VALIDATION};

fn antipt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_antipt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn spectrum_run_writes_a_complete_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"experiment": "spectrum", "J": 1, "V": 0.02, "M": 40}"#);
    let out = tmp.path().join("run");
    let res = antipt(&["spectrum", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(
        listing(&out),
        ["analytic.csv", "config.json", "ladder.svg", "manifest.json", "spectrum.csv"]
    );
    let table = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(table.starts_with("m,branch,re_E,im_E,residual\n0,+,"));
    assert_eq!(table.lines().count(), 13);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 4);
    for f in files {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }

    let resolved: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(resolved["M"], 40);
    assert_eq!(resolved["levels"], 12);
    assert!((resolved["omega"].as_f64().unwrap() - 0.1).abs() < 1e-15);
}

#[test]
fn convergence_runs_are_reproducible_and_seeded() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"experiment": "convergence", "J": 1, "V": 0.02, "M": 30, "t_end": 40,
            "initial": [{"kind": "random"}, {"kind": "tophat", "width": 3}],
            "integrator": {"sample_interval": 2}}"#,
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let res = antipt(&["run", &cfg, "--out", dir.to_str().unwrap(), "--seed", "7", "--threads", "2"]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    for name in ["convergence_random.csv", "convergence_tophat.csv", "profiles.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let resolved = fs::read_to_string(a.join("config.json")).unwrap();
    assert!(resolved.contains("\"seed\": 7"));
    let csv = fs::read_to_string(a.join("convergence_random.csv")).unwrap();
    assert!(csv.starts_with("time,norm2,P,F_g,F_e\n"));
    assert_eq!(csv.lines().count(), 1 + 21);

    // a rerun into the same directory replaces the earlier files
    let res = antipt(&["run", &cfg, "--out", a.to_str().unwrap(), "--seed", "8"]);
    assert!(res.status.success());
    assert_ne!(fs::read(a.join("convergence_random.csv")).unwrap(), fs::read(b.join("convergence_random.csv")).unwrap());
}

#[test]
fn validation_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_v = write_config(tmp.path(), "v.json", r#"{"experiment": "spectrum", "J": 1, "V": 0}"#);
    let res = antipt(&["run", &bad_v, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(EXIT_VALIDATION));
    assert!(String::from_utf8_lossy(&res.stderr).contains("`V`"));
    assert!(!tmp.path().join("x").exists());

    let typo = write_config(tmp.path(), "t.json", r#"{"experiment": "spectrum", "J": 1, "V": 2e-4, "Vv": 3}"#);
    let res = antipt(&["run", &typo]);
    assert_eq!(res.status.code(), Some(EXIT_VALIDATION));
    assert!(String::from_utf8_lossy(&res.stderr).contains("Vv"));

    assert_eq!(antipt(&["preset", "fig9"]).status.code(), Some(EXIT_VALIDATION));
    assert_eq!(antipt(&["run", "/nonexistent/config.json"]).status.code(), Some(EXIT_VALIDATION));
    assert_eq!(antipt(&["frobnicate"]).status.code(), Some(EXIT_VALIDATION));
    let ok = write_config(tmp.path(), "ok.json", r#"{"experiment": "spectrum", "J": 1, "V": 0.02, "M": 20}"#);
    assert_eq!(antipt(&["run", &ok, "--threads", "0"]).status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn foreign_output_directory_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("busy");
    fs::create_dir(&out).unwrap();
    fs::write(out.join("notes.txt"), "keep me").unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"experiment": "spectrum", "J": 1, "V": 0.02, "M": 20}"#);
    let res = antipt(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(EXIT_VALIDATION));
    assert_eq!(listing(&out), ["notes.txt"]);
}

#[test]
fn numeric_failures_map_to_two() {
    let e = CliError::Model(antipt_core::Error::NumericBreakdown { time: 3.0 });
    assert_eq!(e.exit_code(), EXIT_NUMERIC);
    let e = CliError::Model(antipt_core::Error::NoConvergence { worst_residual: 1.0 });
    assert_eq!(e.exit_code(), EXIT_NUMERIC);
    let e = CliError::Model(antipt_core::Error::StepSize { dt: 1.0, product: 9.0, limit: 0.5 });
    assert_eq!(e.exit_code(), EXIT_VALIDATION);
}

#[test]
fn switch_run_reports_hardness() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "s.json",
        r#"{"experiment": "switch", "J": 1, "V": 2e-4, "M": 60,
            "pulse": {"start": 5, "t_relax": 20, "initial": "g"},
            "integrator": {"sample_interval": 5}}"#,
    );
    let out = tmp.path().join("s");
    let res = antipt(&["run", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(
        listing(&out),
        ["config.json", "manifest.json", "switch_from_g.csv", "switch_from_g.svg", "switch_summary.csv"]
    );
    let summary = fs::read_to_string(out.join("switch_summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("g,finite,2.0000000000000000e-2,"));
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("hardness ratio"));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("from |g>"), "{stdout}");
}

#[test]
fn fig4_preset_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("fig4");
    let res = antipt(&["preset", "fig4", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(listing(&out), ["combined", "omega_0.01", "omega_0.1", "omega_0.4"]);
    for sub in ["omega_0.01", "omega_0.1", "omega_0.4", "combined"] {
        assert_eq!(
            listing(&out.join(sub)),
            ["config.json", "manifest.json", "probability.csv", "probability.svg"]
        );
    }
    let svg = fs::read_to_string(out.join("combined/probability.svg")).unwrap();
    for label in ["ω/J = 0.01", "ω/J = 0.1", "ω/J = 0.4"] {
        assert!(svg.contains(label), "{label}");
    }
    assert_eq!(svg.matches("<polyline").count(), 3);
}
