use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_robust-cv");

fn write_csv(dir: &Path, name: &str, rows: &[(f64, f64)]) -> PathBuf {
    let mut text = String::from("x,y\n");
    for (x, y) in rows {
        writeln!(text, "{x:?},{y:?}").unwrap();
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Sine on `[0, span]` with Gaussian noise and a fraction of gross outliers.
fn sample(n: usize, span: f64, outlier_rate: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let noise: f64 = rng.sample(rand_distr::StandardNormal);
            let mut y = (2.0 * std::f64::consts::PI * t).sin() + 0.2 * noise;
            if rng.gen::<f64>() < outlier_rate {
                y += if rng.gen::<bool>() { 8.0 } else { -8.0 };
            }
            (span * t, y)
        })
        .collect()
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn selected_h(text: &str, method: &str) -> f64 {
    csv_rows(text)
        .iter()
        .find(|r| r[0] == method && r[3] == "1")
        .unwrap_or_else(|| panic!("no selected row for {method}"))[1]
        .parse()
        .unwrap()
}

#[test]
fn select_emits_one_row_per_grid_point_and_method() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "d.csv", &sample(80, 1.0, 0.0, 1));
    let text = stdout_ok(&[
        "select",
        "--input",
        input.to_str().unwrap(),
        "--grid",
        "0.02:0.3:12",
        "--method",
        "crvd,rcrvd:l1,plugin:0.05",
    ]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 12 + 12 + 1);
    for method in ["crvd", "rcrvd:l1"] {
        let chosen = rows.iter().filter(|r| r[0] == method && r[3] == "1").count();
        assert_eq!(chosen, 1, "{method}");
    }
    let plug = selected_h(&text, "plugin:0.05");
    assert!((0.02..=0.3).contains(&plug));
}

#[test]
fn row_order_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let rows = sample(60, 1.0, 0.05, 2);
    let mut shuffled = rows.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    let a = write_csv(dir.path(), "a.csv", &rows);
    let b = write_csv(dir.path(), "b.csv", &shuffled);
    let args = |p: &Path| {
        vec![
            "select".to_string(),
            "--input".into(),
            p.to_str().unwrap().into(),
            "--grid".into(),
            "0.03:0.3:8".into(),
            "--method".into(),
            "crvd,rcrvd".into(),
        ]
    };
    let run_with = |p: &Path| {
        let v = args(p);
        stdout_ok(&v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(run_with(&a), run_with(&b));
}

#[test]
fn bandwidths_follow_the_units_of_x() {
    let dir = tempfile::tempdir().unwrap();
    let unit = sample(70, 1.0, 0.0, 3);
    let scaled: Vec<(f64, f64)> = unit.iter().map(|&(x, y)| (x * 10.0, y)).collect();
    let a = write_csv(dir.path(), "unit.csv", &unit);
    let b = write_csv(dir.path(), "scaled.csv", &scaled);
    let ra = csv_rows(&stdout_ok(&["select", "--input", a.to_str().unwrap(), "--grid", "0.02:0.2:6"]));
    let rb = csv_rows(&stdout_ok(&["select", "--input", b.to_str().unwrap(), "--grid", "0.2:2:6"]));
    assert_eq!(ra.len(), rb.len());
    for (p, q) in ra.iter().zip(&rb) {
        let (hp, hq): (f64, f64) = (p[1].parse().unwrap(), q[1].parse().unwrap());
        let (vp, vq): (f64, f64) = (p[2].parse().unwrap(), q[2].parse().unwrap());
        assert!((hq - 10.0 * hp).abs() < 1e-12 * hq, "{hp} vs {hq}");
        assert!((vq - vp).abs() < 1e-9 * vp.abs().max(1.0), "{vp} vs {vq}");
        assert_eq!(p[3], q[3]);
    }
}

#[test]
fn smooth_writes_requested_points_over_data_range() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "d.csv", &sample(50, 4.0, 0.0, 4));
    let out = dir.path().join("fit.csv");
    let status = run(&[
        "smooth",
        "--input",
        input.to_str().unwrap(),
        "--h",
        "0.3",
        "--points",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 11);
    let first: f64 = rows[0][0].parse().unwrap();
    let last: f64 = rows[10][0].parse().unwrap();
    assert!((first - 4.0 / 50.0).abs() < 1e-12);
    assert!((last - 4.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "d.csv", &sample(40, 1.0, 0.0, 5));
    let text = stdout_ok(&[
        "select",
        "--input",
        input.to_str().unwrap(),
        "--grid",
        "0.05:0.3:5",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["methods"][0]["h"].as_array().unwrap().len(), 5);
}

#[test]
fn one_gross_outlier_barely_moves_robust_choice() {
    let dir = tempfile::tempdir().unwrap();
    let clean = sample(150, 1.0, 0.0, 6);
    let mut dirty = clean.clone();
    dirty[70].1 += 1000.0;
    let grid = "0.01:0.3:30";
    let select = |rows: &[(f64, f64)], name: &str| {
        let input = write_csv(dir.path(), name, rows);
        stdout_ok(&["select", "--input", input.to_str().unwrap(), "--grid", grid, "--method", "crvd,rcrvd:l1"])
    };
    let (a, b) = (select(&clean, "clean.csv"), select(&dirty, "dirty.csv"));
    let ratio = selected_h(&b, "rcrvd:l1") / selected_h(&a, "rcrvd:l1");
    let step = (0.3f64 / 0.01).powf(1.0 / 29.0) * (1.0 + 1e-9);
    assert!(ratio <= step && ratio >= 1.0 / step, "robust choice moved by factor {ratio}");
    let crvd_values = |text: &str| -> Vec<f64> {
        csv_rows(text).iter().filter(|r| r[0] == "crvd").map(|r| r[2].parse().unwrap()).collect()
    };
    assert!(crvd_values(&b).iter().zip(crvd_values(&a)).all(|(d, c)| *d > 1000.0 * c));
}

#[test]
fn simulate_is_deterministic_for_a_seed() {
    let args = ["simulate", "--replicates", "2", "--seed", "11"];
    let a = stdout_ok(&args);
    let b = stdout_ok(&args);
    assert_eq!(a, b);
    let report: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(report["base_seed"], 11);
    assert_eq!(report["sections"].as_array().unwrap().len(), 3);
}

#[test]
fn failures_exit_nonzero_with_json_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "d.csv", &sample(20, 1.0, 0.0, 7));
    let out = run(&["select", "--input", input.to_str().unwrap(), "--grid", "0.05:0.3:5", "--y-col", "z"]);
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains('z'));
}
