use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fif_core::fixtures::tent;

fn fif(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fif"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn write_problem(dir: &Path, gamma: f64) -> PathBuf {
    let path = dir.join(format!("tent-{gamma}.json"));
    fs::write(&path, tent(gamma).to_json()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_level_10() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write_problem(dir.path(), 0.3);
    let out = dir.path().join("grid.csv");
    let r = fif(&["sample", "--problem", s(&prob), "--level", "10", "--out", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "x,f");
    assert_eq!(rows.len(), 1026);
    let f_at = |i: usize| rows[1 + i].split(',').nth(1).unwrap().parse::<f64>().unwrap();
    assert_eq!(f_at(0), 0.0);
    assert_eq!(f_at(512), 1.0);
    assert_eq!(f_at(1024), 0.0);
}

#[test]
fn sample_is_byte_deterministic_and_iterate_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write_problem(dir.path(), 0.3);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    assert!(fif(&["sample", "-p", s(&prob), "--level", "8", "--out", s(&a)]).status.success());
    assert!(fif(&["sample", "-p", s(&prob), "--level", "8", "--out", s(&b)]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let r = fif(&["sample", "-p", s(&prob), "--level", "8", "--method", "iterate", "--out", s(&c)]);
    assert!(r.status.success());
    let parse = |p: &Path| -> Vec<f64> {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let worst = parse(&a).iter().zip(parse(&c)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-12);
}

#[test]
fn missing_problem_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let missing = dir.path().join("nope.json");
    let r = fif(&["sample", "-p", s(&missing), "--level", "4", "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(2));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn malformed_and_invalid_problems_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"N\": 2, \"y\": [0, 1, 0],\n \"gamma\": oops}").unwrap();
    let r = fif(&["sample", "-p", s(&bad), "--level", "4"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 2"));

    let invalid = dir.path().join("invalid.json");
    fs::write(&invalid, tent(1.5).to_json()).unwrap();
    let r = fif(&["spectrum", "-p", s(&invalid)]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("|gamma_k|<1"));

    let r = fif(&["sample", "-p", s(&invalid), "--bogus"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn spectrum_csv_and_methods() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write_problem(dir.path(), 0.3);
    let out = dir.path().join("spectrum.csv");
    let r = fif(&[
        "spectrum", "-p", s(&prob), "--omega-start", "1", "--omega-stop", "100", "--omega-steps", "5",
        "--trunc", "40", "--out", s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("omega,re,im,abs,tail_bound\n"));
    assert_eq!(text.lines().count(), 6);

    let lin = dir.path().join("lin.csv");
    let r = fif(&[
        "spectrum", "-p", s(&prob), "--omega-start", "-3", "--omega-stop", "3", "--omega-steps", "4",
        "--omega-scale", "linear", "--method", "linear", "--out", s(&lin),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));

    // the closed forms refuse ω = 0
    let r = fif(&[
        "spectrum", "-p", s(&prob), "--omega-start", "0", "--omega-stop", "1", "--omega-steps", "2",
        "--omega-scale", "linear", "--method", "closed",
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn cwt_both_writes_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write_problem(dir.path(), 0.3);
    let out = dir.path().join("w.csv");
    let r = fif(&[
        "cwt", "-p", s(&prob), "--scale-min-exp", "3", "--scale-max-exp", "4", "--t-steps", "5",
        "--level", "12", "--method", "both", "--out", s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let direct = fs::read_to_string(&out).unwrap();
    let fourier = fs::read_to_string(dir.path().join("w-fourier.csv")).unwrap();
    assert!(direct.starts_with("s,t,re,im,abs\n"));
    assert_eq!(direct.lines().count(), 11);
    assert_eq!(fourier.lines().count(), 11);
    assert!(String::from_utf8_lossy(&r.stderr).contains("max relative deviation"));
}

#[test]
fn cwt_scale_guard_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write_problem(dir.path(), 0.3);
    let out = dir.path().join("w.csv");
    let r = fif(&[
        "cwt", "-p", s(&prob), "--scale-min-exp", "3", "--scale-max-exp", "8", "--t-steps", "3",
        "--level", "8", "--out", s(&out),
    ]);
    assert_eq!(r.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn cwt_conjugate_off_conjugates_values() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write_problem(dir.path(), 0.3);
    let on = dir.path().join("on.csv");
    let off = dir.path().join("off.csv");
    let base = ["cwt", "-p", s(&prob), "--scale-min-exp", "3", "--scale-max-exp", "3", "--t-steps", "3", "--level", "10"];
    assert!(fif(&[&base[..], &["--out", s(&on)]].concat()).status.success());
    assert!(fif(&[&base[..], &["--conjugate", "off", "--out", s(&off)]].concat()).status.success());
    let im = |p: &Path| -> Vec<f64> {
        fs::read_to_string(p).unwrap().lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect()
    };
    let (a, b) = (im(&on), im(&off));
    assert!(a.iter().zip(&b).all(|(x, y)| *x == -*y));
}

#[test]
fn regularity_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write_problem(dir.path(), 0.2);
    let out = dir.path().join("reg.json");
    let r = fif(&[
        "regularity", "-p", s(&prob), "--delta", "1", "--scale-min-exp", "3", "--scale-max-exp", "8",
        "--t-steps", "33", "--level", "13", "--report", s(&out),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["bound_C"].as_f64().unwrap().round(), 20.0);
    assert_eq!(v["hypothesis_ok"], true);
    assert_eq!(v["lip_bound_ok"], true);
    assert_eq!(v["per_scale_max"].as_array().unwrap().len(), 6);
    assert_eq!(v["provenance"]["wavelet_order"], 4);
    assert_eq!(v["provenance"]["fixture_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn regularity_outside_hypothesis_flags_bound() {
    let dir = tempfile::tempdir().unwrap();
    let prob = write_problem(dir.path(), 0.3);
    let r = fif(&[
        "regularity", "-p", s(&prob), "--scale-min-exp", "3", "--scale-max-exp", "6", "--t-steps", "9",
        "--level", "12",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["bound_C"], serde_json::Value::Null);
    assert_eq!(v["bound_finite"], false);
    assert_eq!(v["hypothesis_ok"], false);
}
