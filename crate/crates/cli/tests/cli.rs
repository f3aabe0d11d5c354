use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn blockade(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockade")).current_dir(dir).args(args).output().unwrap()
}

/// Data rows of a CSV file, split into cells.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"), "missing header in {}", path.display());
    lines.skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn spectrum_grid_and_undriven_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = blockade(dir.path(), &["spectrum", "--out", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.path().join("o/spectrum.csv"));
    assert_eq!(r.len(), 63);
    for row in r.iter().filter(|x| f(&x[0]) == 0.0) {
        let (n, s) = (f(&row[1]), f(&row[2]));
        assert_eq!(f(&row[3]), s * n.sqrt());
        assert_eq!(f(&row[4]), 0.0);
    }
    // levels collapse as the drive grows
    let level = |eps: f64| r.iter().find(|x| f(&x[0]) == eps && x[1] == "10" && x[2] == "1").map(|x| f(&x[3])).unwrap();
    assert!(level(0.0) > level(0.5) && level(0.5) > level(0.9));
}

#[test]
fn header_carries_config_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    blockade(dir.path(), &["toy", "--out", "a", "--n-max", "30", "--p", "0.1"]);
    blockade(dir.path(), &["toy", "--out", "a2", "--n-max", "30", "--p", "0.1"]);
    for name in ["dispersion.csv", "toy_q.csv", "toy_rho.csv", "cycles.csv"] {
        let a = fs::read_to_string(dir.path().join("a").join(name)).unwrap();
        let b = fs::read_to_string(dir.path().join("a2").join(name)).unwrap();
        assert_eq!(a.lines().skip(1).collect::<Vec<_>>(), b.lines().skip(1).collect::<Vec<_>>());
        let head: serde_json::Value = serde_json::from_str(a.lines().next().unwrap().trim_start_matches("# ")).unwrap();
        assert_eq!(head["config"]["n_max"], 30);
        assert_eq!(head["version"], env!("CARGO_PKG_VERSION"));
        assert!(head["tolerances"]["residual"].is_number());
    }
    // identical output directories give identical bytes
    blockade(dir.path(), &["toy", "--out", "a", "--n-max", "30", "--p", "0.1"]);
    let first = fs::read(dir.path().join("a/cycles.csv")).unwrap();
    blockade(dir.path(), &["toy", "--out", "a", "--n-max", "30", "--p", "0.1"]);
    assert_eq!(first, fs::read(dir.path().join("a/cycles.csv")).unwrap());
}

#[test]
fn toy_cycles() {
    let dir = tempfile::tempdir().unwrap();
    assert!(blockade(dir.path(), &["toy", "--out", "t", "--n-max", "40", "--p", "0.1"]).status.success());
    for row in rows(&dir.path().join("t/cycles.csv")) {
        let (ratio, closed) = (f(&row[3]), f(&row[4]));
        assert!((ratio - closed).abs() < 1e-12, "{row:?}");
        if row[1] == "asymptotic" {
            assert!((ratio - 1.1595).abs() < 1e-3);
        }
    }
    let q = rows(&dir.path().join("t/toy_q.csv"));
    assert!((f(&q[0][1]) - (11.0f64 / 9.0).ln()).abs() < 1e-15);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "eps = [0.0, 0.3]\nn_max = 3\nout = \"from_file\"\n").unwrap();
    assert!(blockade(dir.path(), &["spectrum", "--config", "run.toml"]).status.success());
    assert_eq!(rows(&dir.path().join("from_file/spectrum.csv")).len(), 2 * 7);
    assert!(blockade(dir.path(), &["spectrum", "--config", "run.toml", "--n-max", "2", "--out", "flag"]).status.success());
    assert_eq!(rows(&dir.path().join("flag/spectrum.csv")).len(), 2 * 5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "n_max = 3\nbogus = true\n").unwrap();
    let out = blockade(dir.path(), &["spectrum", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(blockade(dir.path(), &["spectrum", "--eps", "1.0"]).status.code(), Some(2));
    assert_eq!(blockade(dir.path(), &["spectrum", "--n-max", "1"]).status.code(), Some(2));
    assert_eq!(blockade(dir.path(), &["steady", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(blockade(dir.path(), &["spectrum", "--config", "missing.toml"]).status.code(), Some(4));
    fs::write(dir.path().join("file"), "").unwrap();
    assert_eq!(blockade(dir.path(), &["spectrum", "--out", "file/sub"]).status.code(), Some(4));
    // an unreachable residual bound is a numerical failure
    let out = blockade(dir.path(), &["steady", "--out", "s", "--n-max", "100", "--p", "0.2", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(3));
    let sweep = rows(&dir.path().join("s/sweep.csv"));
    assert_ne!(sweep[0][6], "ok");
}

#[test]
fn steady_sweep_and_cutoff_pair() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "p = \"0.3,0.15\"\nn_max = 150\ncutoff_pair = [150, 200]\njobs = 2\n").unwrap();
    let out = blockade(dir.path(), &["steady", "--config", "run.toml", "--out", "s"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sweep = rows(&dir.path().join("s/sweep.csv"));
    assert_eq!(sweep.len(), 2);
    assert!(f(&sweep[1][1]) > f(&sweep[0][1]));
    assert!(sweep.iter().all(|r| f(&r[3]) <= 1e-10 && r[6] == "ok"));
    let rho = rows(&dir.path().join("s/rho_000.csv"));
    assert_eq!(rho.len(), 150);
    assert!((rho.iter().map(|r| f(&r[2])).sum::<f64>() - 1.0).abs() < 1e-12);
    let pair = rows(&dir.path().join("s/cutoff_pair.csv"));
    assert!(pair.iter().filter(|r| f(&r[1]) <= 20.0).all(|r| f(&r[4]).abs() < 0.02));
}

#[test]
fn observables_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = blockade(dir.path(), &["observables", "--out", "o", "--format", "json", "--n-max", "120", "--eps", "gap:1e-2:2e-1:6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/observables.json")).unwrap()).unwrap();
    let cols: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let at = |name: &str| cols.iter().position(|c| *c == name).unwrap();
    for row in doc["rows"].as_array().unwrap() {
        let eps = row[at("eps")].as_f64().unwrap();
        assert!((row[at("sigma_x")].as_f64().unwrap() + eps).abs() < 1e-12);
        assert_eq!(row[at("sigma_y")].as_f64().unwrap(), 0.0);
        assert_eq!(row[at("a_re")].as_f64().unwrap(), 0.0);
        assert!(row[at("bloch_len_sq")].as_f64().unwrap() <= 1.0);
    }
    let ex: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/exponents.json")).unwrap()).unwrap();
    let flux = &ex["rows"][0];
    assert_eq!(flux[0], "flux");
    assert!(flux[1].as_f64().unwrap() < -0.7);
}

#[test]
fn meanfield_report() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("mf.toml"), "eps = [0.6, 1.3]\nell = 1.0\nkappa = 0.2\nt_final = 1.0\ndt = 0.01\n").unwrap();
    let out = blockade(dir.path(), &["meanfield", "--config", "mf.toml", "--out", "m"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.path().join("m/fixed_points.csv"));
    assert_eq!(r.len(), 4);
    let lower = &r[0];
    assert_eq!(lower[2], "disordered_lower");
    assert!((f(&lower[5]) + 0.3).abs() < 1e-15);
    assert!((f(&lower[7]) + 0.8).abs() < 1e-15);
    assert_eq!(lower[10], "stable");
    let upper = &r[1];
    assert_eq!(upper[10], "unstable");
    assert!(f(&upper[12]) > 0.0);
    for row in &r[2..] {
        assert!(row[2].starts_with("ordered"));
        assert!(f(&row[9]).abs() < 1e-12);
        assert_eq!(row[10], row[11]);
    }
    assert!(dir.path().join("m/trajectory_eps_0.6.csv").exists());
}

#[test]
fn matel_check_tables() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.toml"), "slices = [40]\n").unwrap();
    assert!(blockade(dir.path(), &["matel-check", "--config", "m.toml", "--out", "m"]).status.success());
    let fit = rows(&dir.path().join("m/interbranch_fit.csv"));
    assert!((f(&fit[0][0]) - 0.07).abs() < 0.01);
    assert!((f(&fit[0][1]) + 0.83).abs() < 0.05);
    let inter = rows(&dir.path().join("m/interbranch.csv"));
    assert_eq!(inter.len(), 91);
    assert!(inter.iter().all(|r| r[3] == "true"));
    assert_eq!(rows(&dir.path().join("m/s_b_slices.csv")).len(), 38);
}
