use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rateless_dmt::channel::{siso_outage_closed_form, SnrPoint};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rateless-dmt")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

/// Data rows of a CSV with `#` metadata lines, split on commas.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn dmt_curve_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dmt", "--M", "2", "--N", "2", "--L", "2", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("dmt_curves.csv")).unwrap();
    assert!(text.starts_with("# rateless-dmt "));
    assert!(text.contains("# config: M=2 N=2 L=2 T=1 per_segment=512 exact=false"));
    let row = rows(&text).into_iter().find(|r| r[0] == "0.5" && r[4] == "rateless").unwrap();
    let r: f64 = row[2].parse().unwrap();
    let d: f64 = row[3].parse().unwrap();
    assert_eq!((r, d), (1.0, 2.5));
    for scheme in ["rateless", "conventional", "parallel_identical", "parallel_iid"] {
        assert!(rows(&text).iter().any(|r| r[4] == scheme), "{scheme}");
    }
}

#[test]
fn dmt_sawtooth_breaks() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dmt", "--M", "3", "--N", "3", "--L", "4", "--exact", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("dmt_curves.csv")).unwrap();
    let rateless: Vec<Vec<String>> = rows(&text).into_iter().filter(|r| r[4] == "rateless").collect();
    let mut starts = Vec::new();
    for w in rateless.windows(2) {
        if w[0][1] != w[1][1] {
            starts.push((w[1][1].clone(), w[1][5].clone()));
        }
    }
    let want = [("2", "3/4"), ("3", "3/2"), ("4", "9/4"), ("5", "3")];
    assert_eq!(starts, want.map(|(a, b)| (a.to_string(), b.to_string())));
}

#[test]
fn missing_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dmt", "--N", "2", "--L", "2", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`M`"), "{}", stderr(&o));
    assert!(!dir.path().join("dmt_curves.csv").exists());
}

#[test]
fn simulate_is_reproducible_and_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let args = |sub: &str| {
        vec![
            "simulate".to_string(),
            "--M=1".into(),
            "--N=1".into(),
            "--L=2".into(),
            "--r-n=0.25".into(),
            "--eta-db=20,30,40".into(),
            "--trials=100000".into(),
            "--seed=7".into(),
            "--out".into(),
            dir.path().join(sub).display().to_string(),
        ]
    };
    for sub in ["a", "b"] {
        let a = args(sub);
        let o = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = fs::read(dir.path().join("a/simulate.csv")).unwrap();
    let b = fs::read(dir.path().join("b/simulate.csv")).unwrap();
    assert_eq!(a, b);

    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("# seed: 7"));
    let data = rows(&text);
    assert_eq!(data.len(), 9);
    for r in data.iter().filter(|r| r[1] != "0") {
        let eta = SnrPoint::from_db(r[0].parse().unwrap()).unwrap();
        let l: f64 = r[1].parse().unwrap();
        let p: f64 = r[2].parse().unwrap();
        let se: f64 = r[3].parse().unwrap();
        let want = siso_outage_closed_form(&eta, 2.0 * 0.25 * eta.log2() / l);
        assert!((p - want).abs() <= 3.0 * se, "{r:?} vs {want}");
    }
}

#[test]
fn simulate_rejects_zero_trials() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["simulate", "--M=1", "--N=1", "--L=2", "--r-n=0.25", "--trials=0", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`trials`"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "# SISO\nM = 1\nN = 1\nL = 2\nR = 1\neta_db_list = 10\ntrials = 2000\nseed = 3\n").unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "4", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("simulate.csv")).unwrap();
    assert!(text.contains("# config: M=1 N=1 L=2 T=1 R=1 eta_db_list=10 trials=2000 seed=4"), "{text}");

    fs::write(&cfg, "M = 1\nbogus = 2\n").unwrap();
    let o = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2: unknown key `bogus`"), "{}", stderr(&o));
}

#[test]
fn codes_search_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = run(&["codes", "--L=2", "--bits=2", "--budget=exhaustive", "--trials=20000", "--out", &out_arg(&first)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trials = fs::read_to_string(first.join("code_trials.csv")).unwrap();
    let pd_line = trials.lines().find(|l| l.starts_with("# min product distance by prefix:")).unwrap();
    let full: f64 = pd_line.rsplit(',').next().unwrap().trim().parse().unwrap();
    assert!(full > 0.0);
    assert!(trials.contains("exhaustive search, 24 evaluations"));
    assert_eq!(rows(&trials).len(), 6);

    let second = dir.path().join("second");
    let book = first.join("codebook.txt");
    let o = run(&["codes", "--codebook", book.to_str().unwrap(), "--trials=1000", "--out", &out_arg(&second)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&book).unwrap(), fs::read(second.join("codebook.txt")).unwrap());
}

#[test]
fn codes_validation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["codes", "--L=2", "--bits=9", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`bits`"));

    let o = run(&["codes", "--L=2", "--bits=4", "--budget=exhaustive", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`budget`"));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "2\n2\n1,1\n").unwrap();
    let o = run(&["codes", "--codebook", bad.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let o = run(&["codes", "--L=2", "--bits=2", "--R=2", "--trials=10", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exit_codes_follow_verdicts() {
    let o = run(&["verify", "--only", "4,6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 2);

    let o = run(&["verify", "--only", "4", "--tolerance-scale", "0.01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[4]"));
}

#[test]
fn verify_verdicts_stable_across_seeds() {
    for seed in ["1", "2", "3"] {
        let o = run(&["verify", "--only", "3,5,8", "--seed", seed]);
        assert!(o.status.success(), "seed {seed}: {}", String::from_utf8_lossy(&o.stdout));
    }
}
