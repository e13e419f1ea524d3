use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn randattr(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randattr"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("run randattr")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).expect("manifest written")).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn heat_model_on_the_zero_path_decays_like_e_minus_t() {
    let dir = tempfile::tempdir().unwrap();
    let o = randattr(dir.path(), &["--seed", "zero", "simulate", "--model", "heat", "--modes", "16", "--t-end", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(dir.path());
    assert_eq!(m["status"], "ok");
    let sup = m["summary"]["final_sup_norm"].as_f64().unwrap();
    assert!((sup / (-2.0f64).exp() - 1.0).abs() < 1e-10, "{sup}");
    for f in ["trajectory.csv", "coefficients.csv", "final.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
        assert!(m["outputs"].as_array().unwrap().iter().any(|o| o["file"] == f));
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"seed": "zero", "t_end": 1.0, "modes": 8, "init": "mode2"}"#).unwrap();
    let out = dir.path().join("run");
    let o = randattr(&out, &["--config", cfg.to_str().unwrap(), "simulate", "--t-end", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["config"]["t_end"], 0.5);
    assert_eq!(m["config"]["modes"], 8);
    assert_eq!(m["config"]["init"], "mode2");
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"nu": 1.5, "bogus_key": 1}"#).unwrap();
    let out = dir.path().join("run");
    let o = randattr(&out, &["--config", cfg.to_str().unwrap(), "extremal"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus_key"));
    assert_eq!(manifest(&out)["exit_code"], 2);
}

#[test]
fn misaligned_times_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = randattr(dir.path(), &["simulate", "--tau", "0.0005"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blow_up_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = randattr(dir.path(), &["simulate", "--modes", "16", "--amp", "10", "--guard", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(manifest(dir.path())["status"], "numeric_guard");
}

#[test]
fn unconverged_ladder_exits_1_but_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = randattr(dir.path(), &["extremal", "--modes", "16", "--ladder", "5", "--cap", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(dir.path().join("u_star.csv").exists());
    assert_eq!(manifest(dir.path())["summary"]["converged"], false);
}

#[test]
fn lower_extremal_mirrors_the_upper_one() {
    let (up, lo) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(randattr(up.path(), &["extremal", "--modes", "16"]).status.success());
    assert!(randattr(lo.path(), &["extremal", "--modes", "16", "--sign", "-"]).status.success());
    let u = csv_rows(&up.path().join("u_star.csv"));
    let l = csv_rows(&lo.path().join("u_lower.csv"));
    assert_eq!(u[0], ["x", "u_star"]);
    assert_eq!(l[0], ["x", "u_lower"]);
    for (a, b) in u.iter().zip(&l).skip(1) {
        let (a, b): (f64, f64) = (a[1].parse().unwrap(), b[1].parse().unwrap());
        assert!((a + b).abs() < 1e-12);
    }
}

#[test]
fn xi_without_forcing_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = randattr(dir.path(), &["xi", "--h", "0", "--modes", "8"]);
    assert!(o.status.success());
    let rows = csv_rows(&dir.path().join("xi.csv"));
    assert_eq!(rows[0], ["x", "xi"]);
    assert!(rows[1..].iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn bifurcation_rows_follow_the_sweep_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = randattr(dir.path(), &["--jobs", "2", "bifurcate", "--nu-list", "1.5,0.5", "--seeds", "zero,7", "--modes", "16"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("bifurcation.csv"));
    assert_eq!(rows[0], ["nu", "seed", "a1", "supnorm", "converged", "ladder_max"]);
    let keys: Vec<(&str, &str)> = rows[1..].iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
    assert_eq!(keys, [("1.5", "zero"), ("1.5", "7"), ("0.5", "zero"), ("0.5", "7")]);
    assert_eq!(rows[3][2], "0");
}

#[test]
fn periodic_gamma_reports_three_solutions_above_critical() {
    let dir = tempfile::tempdir().unwrap();
    let o = randattr(dir.path(), &["--seed", "zero", "periodic", "--nu-list", "0.5,1.5", "--modes", "16"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(dir.path());
    let sol = m["summary"]["solutions"].as_array().unwrap();
    assert_eq!(sol[0]["periodic_solutions"], "one: 0");
    assert_eq!(sol[1]["periodic_solutions"], "three: u*, u_* = -u*, 0");
}

#[test]
fn verify_passes_on_the_zero_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = randattr(dir.path(), &["--seed", "zero", "verify", "--modes", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let rows = csv_rows(&dir.path().join("verify.csv"));
    assert_eq!(rows[0], ["module", "check", "measured", "relation", "threshold", "passed"]);
    assert!(rows[1..].iter().all(|r| r[5] == "true"));
    for module in ["wiener", "spatial", "pde", "linear", "pullback", "chafee"] {
        assert!(rows.iter().any(|r| r[0] == module), "{module}");
    }
}
