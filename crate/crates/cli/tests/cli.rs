use std::f64::consts::FRAC_1_SQRT_2;
use std::process::Command;

use diamond_gap_cli::config::{DEFAULT_SEED, DEFAULT_TRIALS};
use diamond_gap_cli::{parse_config, run, ConfigError, Mode, EXIT_ASSERTION, EXIT_FAILURE, EXIT_PASS};
use serde_json::Value;

fn args(rest: &[&str]) -> Vec<String> {
    std::iter::once("diamond-gap")
        .chain(rest.iter().copied())
        .map(String::from)
        .collect()
}

fn parse(rest: &[&str]) -> Result<diamond_gap_cli::RunConfig, ConfigError> {
    parse_config(args(rest))
}

fn lines(path: &std::path::Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "[run]\nd = 3\nsamples = 7\n\n[tolerances]\ntheorem = 1e-5\n").unwrap();
    let path = file.to_str().unwrap();

    let cfg = parse(&["--config", path, "verify", "--d", "2"]).unwrap();
    assert_eq!(cfg.d, 2);
    assert_eq!(cfg.samples, 7);
    assert_eq!(cfg.tolerance("theorem", 0.0), 1e-5);

    let cfg = parse(&["--config", path, "--tol", "theorem=3e-6", "verify"]).unwrap();
    assert_eq!(cfg.d, 3);
    assert_eq!(cfg.tolerance("theorem", 0.0), 3e-6);
}

#[test]
fn defaults_apply_without_flags() {
    let cfg = parse(&["lemmas"]).unwrap();
    assert_eq!(cfg.subcommand, Mode::Lemmas);
    assert_eq!(cfg.seed, DEFAULT_SEED);
    assert_eq!(cfg.trials, DEFAULT_TRIALS);
    assert!(cfg.output_path.is_none());
}

#[test]
fn bad_input_is_rejected() {
    assert!(matches!(parse(&["verify", "--d", "1"]), Err(ConfigError::Invalid(_))));
    assert!(matches!(parse(&["verify", "--d", "9"]), Err(ConfigError::Invalid(_))));
    assert!(matches!(parse(&["verify", "--bogus"]), Err(ConfigError::Clap(_))));
    assert!(matches!(
        parse(&["--tol", "nonsense=1", "lemmas"]),
        Err(ConfigError::Invalid(_))
    ));
    assert!(matches!(
        parse(&["--tol", "lemma=-1", "lemmas"]),
        Err(ConfigError::Invalid(_))
    ));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "[run]\ndimension = 3\n").unwrap();
    assert!(matches!(
        parse(&["--config", file.to_str().unwrap(), "lemmas"]),
        Err(ConfigError::Invalid(_))
    ));
}

#[test]
fn lemma_run_passes_and_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lemmas.ndjson");
    let cfg = parse(&[
        "lemmas",
        "--trials",
        "1000",
        "--seed",
        "42",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let mut text = Vec::new();
    let outcome = run(&cfg, &mut text);
    assert_eq!(outcome.exit_code, EXIT_PASS);

    let recs = lines(&out);
    assert_eq!(recs[0]["record"], "meta");
    assert_eq!(recs[0]["subcommand"], "lemmas");
    let tallies: Vec<_> = recs.iter().filter(|r| r["record"] == "lemma").collect();
    assert_eq!(tallies.len(), 8);
    assert!(tallies.iter().all(|t| t["tally"]["pass"] == true));
}

#[test]
fn identity_channel_has_zero_norms() {
    let cfg = parse(&["norms", "--channel", "identity", "--d", "3"]).unwrap();
    let mut text = Vec::new();
    let outcome = run(&cfg, &mut text);
    assert_eq!(outcome.exit_code, EXIT_PASS);
    let recs: Vec<Value> = outcome
        .records
        .iter()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let value = |map: &str| {
        recs.iter().find(|r| r["map"] == map).unwrap()["result"]["value"]
            .as_f64()
            .unwrap()
    };
    assert!((value("T") - 1.0).abs() < 1e-6);
    assert_eq!(value("id-minus-T"), 0.0);
    assert_eq!(value("theta-id-minus-T"), 0.0);
}

#[test]
fn verify_writes_one_passing_record_per_sample_and_a_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.ndjson");
    let cfg = parse(&[
        "verify",
        "--samples",
        "50",
        "--restarts",
        "0",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    let outcome = run(&cfg, &mut Vec::new());
    assert_eq!(outcome.exit_code, EXIT_PASS);

    let recs = lines(&out);
    let reports: Vec<_> = recs.iter().filter(|r| r["record"] == "verification").collect();
    assert_eq!(reports.len(), 50);
    assert!(reports
        .iter()
        .all(|r| r["pass"] == true && r["ratio"].as_f64().unwrap() <= FRAC_1_SQRT_2 + 1e-6));

    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next().unwrap(), "d,seed,L,R,bound,ratio,pass,sdp_gap_L,sdp_gap_R");
    assert_eq!(rows.count(), 50);
}

#[test]
fn records_repeat_byte_for_byte() {
    let cfg = parse(&["search", "--budget", "30", "--seed", "11"]).unwrap();
    let a = run(&cfg, &mut Vec::new());
    let b = run(&cfg, &mut Vec::new());
    assert_eq!(a.exit_code, EXIT_PASS);
    assert_eq!(a.records, b.records);

    let one = parse(&["--threads", "1", "verify", "--samples", "6", "--restarts", "1"]).unwrap();
    let two = parse(&["--threads", "2", "verify", "--samples", "6", "--restarts", "1"]).unwrap();
    assert_eq!(run(&one, &mut Vec::new()).records, run(&two, &mut Vec::new()).records);
}

#[test]
fn exit_codes_from_the_binary() {
    let bin = env!("CARGO_BIN_EXE_diamond-gap");
    let status = |a: &[&str]| Command::new(bin).args(a).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["lemmas", "--trials", "5"]), EXIT_PASS);
    assert_eq!(status(&["norms", "--channel", "depolarizing:p=0.5"]), EXIT_PASS);
    assert_eq!(status(&["verify", "--d", "12"]), EXIT_FAILURE);
    assert_eq!(status(&["norms", "--channel", "no-such-family"]), EXIT_FAILURE);
    // an impossible tolerance turns a true inequality check into an assertion failure
    assert_eq!(
        status(&["--tol", "strict_gap=1e9", "gap", "--channel", "depolarizing:p=0.5"]),
        EXIT_ASSERTION
    );
}
