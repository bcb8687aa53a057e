use std::process::{Command, Output};

use serde_json::Value;

fn etacoef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etacoef")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = etacoef(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty());
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn coeff_plain_and_json() {
    let out = etacoef(&["coeff", "--p", "2", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let text = stdout(&out);
    assert!(text.starts_with("a_2(6) = 23\n"));
    assert!(text.contains("K = ") && text.contains("tail_bound") && text.contains("int_distance"));

    let doc = json(&["coeff", "--spec", "1^-1", "--n", "10", "--format", "json"]);
    assert_eq!(doc["command"], "coeff");
    assert_eq!(doc["value"], "42");
    assert_eq!(doc["inputs"]["spec"], "1^-1");
    for key in ["K", "precision_bits", "tail_bound", "int_distance"] {
        assert!(!doc["diagnostics"][key].is_null(), "{key}");
    }
    let tail: f64 = doc["diagnostics"]["tail_bound"].as_str().unwrap().parse().unwrap();
    let dist: f64 = doc["diagnostics"]["int_distance"].as_str().unwrap().parse().unwrap();
    assert!(tail + dist < 0.25);
}

#[test]
fn large_values_are_full_decimal() {
    let doc = json(&["coeff", "--p", "2", "--n", "3000", "--format", "json"]);
    let value = doc["value"].as_str().unwrap();
    assert!(value.len() > 60 && value.chars().all(|c| c.is_ascii_digit()));
    let table = etacoef(&["table", "--p", "2", "--N", "3000", "--format", "csv"]);
    let last = stdout(&table).lines().last().unwrap().to_string();
    assert_eq!(last, format!("3000,{value}"));
}

#[test]
fn json_round_trips() {
    for args in [
        &["coeff", "--p", "3", "--n", "40", "--format", "json"][..],
        &["table", "--p", "5", "--N", "20", "--format", "json"][..],
        &["verify", "--p", "7", "--N", "20", "--format", "json"][..],
        &["scan", "--p", "29", "--N", "300", "--format", "json"][..],
    ] {
        let doc = json(args);
        let reparsed: Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(doc, reparsed);
        assert_eq!(doc["command"], args[0]);
    }
    let scan = json(&["scan", "--p", "29", "--N", "300", "--format", "json"]);
    let samples = scan["report"]["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 75);
    let fitted: f64 = scan["report"]["fitted_c_coefficient"].as_str().unwrap().parse().unwrap();
    assert!(fitted < 0.0);
    assert!(scan["note"].as_str().unwrap().contains("N = 300"));
}

#[test]
fn inadmissible_exits_2() {
    let out = etacoef(&["coeff", "--spec", "1^-1*29^-1", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("condition (2)") && err.contains("l = "), "{err}");
    assert!(out.stdout.is_empty());
    assert_eq!(etacoef(&["coeff", "--p", "31", "--n", "5"]).status.code(), Some(2));
    assert_eq!(etacoef(&["verify", "--p", "29", "--N", "5"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["coeff", "--n", "3"][..],
        &["coeff", "--p", "2"][..],
        &["coeff", "--p", "4", "--n", "3"][..],
        &["coeff", "--spec", "1^0", "--n", "3"][..],
        &["coeff", "--p", "2", "--spec", "1^-1", "--n", "3"][..],
        &["coeff", "--p", "2", "--n", "3", "--precision", "8"][..],
        &["coeff", "--p", "2", "--n", "3", "--format", "xml"][..],
        &["scan", "--p", "24"][..],
        &["scan", "--p", "23"][..],
        &["asympt", "--p", "29"][..],
        &["table", "--p", "2"][..],
        &["frobnicate"][..],
        &[][..],
    ] {
        let out = etacoef(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let help = etacoef(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("m^delta"));
}

#[test]
fn max_k_cap_is_reported() {
    let out = etacoef(&["coeff", "--p", "2", "--n", "5000", "--max-K", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--max-K"));
}

#[test]
fn verify_summaries() {
    let out = etacoef(&["verify", "--N", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("0 checks"));

    let out = etacoef(&["verify", "--N", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with(&format!("{} checks, 0 mismatches", 9 * 40 - 1)), "{text}");
    assert!(text.contains("oracle-only: 1^-1*23^-1 at n = 1"));

    let doc = json(&["verify", "--spec", "1^-1*2^-1*3^-1", "--N", "60", "--format", "json"]);
    assert_eq!(doc["report"]["checks"], 60);
    assert!(doc["report"]["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn asympt_report() {
    let out = etacoef(&["asympt", "--p", "2", "--N", "2000", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,exact_log,predicted_log,residual_times_sqrt_n"));
    let ns: Vec<u64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(ns.first(), Some(&20));
    assert_eq!(ns.last(), Some(&2000));
    assert!(ns.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn scan_csv() {
    let out = etacoef(&["scan", "--p", "29", "--N", "2000", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 65);
}

#[test]
fn bench_table() {
    let out = etacoef(&["bench", "--p", "2", "--N", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("n,oracle_seconds,series_seconds,source,value,agree\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn output_independent_of_threads() {
    for args in [
        &["coeff", "--p", "13", "--n", "2500", "--format", "json"][..],
        &["verify", "--p", "11", "--N", "60", "--format", "json"][..],
        &["asympt", "--p", "3", "--N", "1500"][..],
    ] {
        let with = |t: &str| {
            let mut a = args.to_vec();
            a.extend(["--threads", t]);
            let out = etacoef(&a);
            assert!(out.status.success());
            out.stdout
        };
        assert_eq!(with("1"), with("8"), "{args:?}");
    }
    let values = |t: &str| -> Vec<String> {
        let out = etacoef(&["bench", "--p", "2", "--N", "400", "--threads", t]);
        stdout(&out).lines().skip(1).map(|l| l.split(',').nth(4).unwrap().to_string()).collect()
    };
    assert_eq!(values("1"), values("8"));
}
