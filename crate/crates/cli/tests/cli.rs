use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use skewsep_cli::independence::load_exemplar;
use skewsep_core::Tolerances;

fn skewsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewsep"))
        .args(args)
        .env_remove("SKEWSEP_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn detected(reports: &Value, criterion: &str) -> bool {
    reports
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["criterion"] == criterion)
        .unwrap_or_else(|| panic!("no {criterion} report"))["detected"]
        .as_bool()
        .unwrap()
}

#[test]
fn evaluate_examples() {
    let bell = json(&skewsep(&["evaluate", "--family", "bell", "--dim", "2"]));
    assert!(detected(&bell, "skew"));
    assert_eq!(bell.as_array().unwrap().len(), 4);

    let mixed = json(&skewsep(&["evaluate", "--family", "werner2", "--param", "0"]));
    for c in ["ccn", "lur", "skew", "ppt"] {
        assert!(!detected(&mixed, c), "{c}");
    }

    let w = json(&skewsep(&["evaluate", "--family", "werner2", "--param", "0.2", "--criteria", "ppt"]));
    assert!(!detected(&w, "ppt"));
}

#[test]
fn evaluate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dA": 2, "dB": 2, "entries": [[1.0, 0.0]]}"#).unwrap();
    let out = skewsep(&["evaluate", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = skewsep(&["evaluate", "--input", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(skewsep(&["evaluate", "--family", "nope"]).status.code(), Some(3));
    assert_eq!(skewsep(&["evaluate", "--family", "werner2", "--param", "2"]).status.code(), Some(3));
    assert_eq!(skewsep(&["evaluate", "--family", "werner2"]).status.code(), Some(3));
    assert_eq!(skewsep(&["evaluate", "--bogus-flag"]).status.code(), Some(3));
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    assert_eq!(skewsep(&["evaluate", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
    let out_dir = dir.path().join("no-such-dir").join("x.json");
    let out = skewsep(&["evaluate", "--family", "bell", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn evaluate_reads_state_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.json");
    let h = 0.5;
    std::fs::write(
        &path,
        format!(
            r#"{{"dA": 2, "dB": 2, "entries": [[{h},0],[0,0],[0,0],[{h},0], [0,0],[0,0],[0,0],[0,0],
                [0,0],[0,0],[0,0],[0,0], [{h},0],[0,0],[0,0],[{h},0]]}}"#
        ),
    )
    .unwrap();
    let reports = json(&skewsep(&["evaluate", "--input", path.to_str().unwrap(), "--strategy", "schmidt"]));
    for c in ["ccn", "lur", "skew", "ppt"] {
        assert!(detected(&reports, c), "{c}");
    }
}

#[test]
fn sweep_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = skewsep(&["sweep", "--family", "werner2", "--grid", "0,0.5,1", "--seed", "3", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());

    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, skewsep_cli::sweep::COLUMNS);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let params: Vec<&str> = rows.iter().map(|r| &r[1]).collect();
    assert_eq!(params, ["0", "0.5", "1"]);
    let ccn: f64 = rows[2][4].parse().unwrap();
    assert!((ccn - 2.0).abs() <= 1e-8);

    let multi = skewsep(&["sweep", "--family", "isotropic", "--dim", "3", "--range", "0:1:4", "--strategy", "canonical,schmidt"]);
    assert!(multi.status.success());
    assert_eq!(String::from_utf8(multi.stdout).unwrap().lines().count(), 1 + 4 * 2);

    assert_eq!(skewsep(&["sweep", "--family", "werner2", "--range", "1:0:3"]).status.code(), Some(3));
    assert_eq!(skewsep(&["sweep", "--family", "werner2"]).status.code(), Some(3));
}

#[test]
fn threshold_examples() {
    let ppt = json(&skewsep(&["threshold", "--family", "werner2", "--criteria", "ppt"]));
    assert!((ppt["p_star"].as_f64().unwrap() - 1.0 / 3.0).abs() <= 1e-6);
    let [lo, hi] = [ppt["bracket"][0].as_f64().unwrap(), ppt["bracket"][1].as_f64().unwrap()];
    assert!(hi - lo <= 1e-6);
    assert_ne!(ppt["detected"][0], ppt["detected"][1]);

    let iso = json(&skewsep(&["threshold", "--family", "isotropic", "--dim", "3", "--criteria", "ppt"]));
    assert!((iso["p_star"].as_f64().unwrap() - 1.0 / 3.0).abs() <= 1e-6);

    let none = skewsep(&["threshold", "--family", "werner2", "--criteria", "ccn", "--range", "0:0.2"]);
    assert_eq!(none.status.code(), Some(3));
    let two = skewsep(&["threshold", "--family", "werner2", "--criteria", "ppt,ccn"]);
    assert_eq!(two.status.code(), Some(3));
    let fixed = skewsep(&["threshold", "--family", "tiles", "--criteria", "ccn"]);
    assert_eq!(fixed.status.code(), Some(3));
}

#[test]
fn independence_examples() {
    assert_eq!(skewsep(&["independence", "--samples", "0"]).status.code(), Some(3));
    assert_eq!(skewsep(&["independence", "--samples", "5", "--sampler", "nope"]).status.code(), Some(3));

    let sep = json(&skewsep(&["independence", "--samples", "300", "--sampler", "random-separable", "--seed", "5"]));
    for cell in ["skew_only", "lur_only", "both"] {
        assert_eq!(sep[cell], 0, "{cell}");
    }
    assert_eq!(sep["neither"], 300);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tally.json");
    let o = skewsep(&["independence", "--samples", "400", "--seed", "11", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let tally: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let sum: u64 = ["both", "skew_only", "lur_only", "neither"].iter().map(|c| tally[c].as_u64().unwrap()).sum();
    assert_eq!(sum, 400);
    assert_eq!(tally["ppt_inconsistent"], 0);
    for e in tally["exemplars"].as_array().unwrap() {
        let cell = e["cell"].as_str().unwrap();
        let path = dir.path().join(format!("tally.{cell}.json"));
        assert!(load_exemplar(&path).unwrap().reverify(&Tolerances::default()).unwrap());
        // exemplar files double as evaluate inputs
        let seed = e["optimize"]["seed"].as_u64().unwrap().to_string();
        let reports = json(&skewsep(&["evaluate", "--input", path.to_str().unwrap(), "--seed", &seed]));
        assert_eq!(detected(&reports, "lur"), cell == "lur-only");
        assert_eq!(detected(&reports, "skew"), cell == "skew-only");
    }
}

#[test]
fn seed_env_fallback_and_flag_precedence() {
    let run = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_skewsep"));
        cmd.args(args).env_remove("SKEWSEP_SEED");
        if let Some(v) = env {
            cmd.env("SKEWSEP_SEED", v);
        }
        cmd.output().unwrap()
    };
    let base = ["evaluate", "--family", "random", "--criteria", "ccn"];
    let from_env = run(&base, Some("42"));
    let from_flag = run(&[&base[..], &["--seed", "42"]].concat(), None);
    let flag_wins = run(&[&base[..], &["--seed", "42"]].concat(), Some("7"));
    let default = run(&base, None);
    assert_eq!(from_env.stdout, from_flag.stdout);
    assert_eq!(flag_wins.stdout, from_flag.stdout);
    assert_ne!(default.stdout, from_flag.stdout);
    assert_eq!(run(&base, Some("x")).status.code(), Some(3));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"family": "werner2", "grid": [0.1, 0.9], "strategy": "canonical", "seed": 1,
            "optimize": {"restarts": 1}}"#,
    )
    .unwrap();
    let from_file = skewsep(&["sweep", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8(from_file.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("werner2,0.1,canonical,1,"));
    let overridden = skewsep(&["sweep", "--config", cfg.to_str().unwrap(), "--grid", "0.5", "--seed", "2"]);
    let text = String::from_utf8(overridden.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("werner2,0.5,canonical,2,"));
}

#[test]
fn selftest_passes_and_hook_fails() {
    let ok = skewsep(&["selftest", "--samples", "40"]);
    assert!(ok.status.success());
    let fail = skewsep(&["selftest", "--samples", "40", "--corrupt-loo"]);
    assert_eq!(fail.status.code(), Some(1));
    let text = String::from_utf8(fail.stdout).unwrap();
    let failing: Vec<&str> = text.lines().filter(|l| l.ends_with("FAIL")).collect();
    assert_eq!(failing.len(), 2, "{text}");
    assert!(failing[0].starts_with("loo-orthonormality"));
    assert!(Path::new(env!("CARGO_BIN_EXE_skewsep")).exists());
}
