use std::io::Write;

use diamond_gap::channels::{compose_theta, id_minus, Channel, ChannelSpec};
use diamond_gap::diamond::{diamond_norm_sdp, DiamondResult};
use diamond_gap::verify::{
    gap_demonstration, lemma_suite, search_max_ratio, theorem_sweep, EnvMode, VerificationReport, ALPHA, LEMMA_TOL,
    STRICT_GAP, THEOREM_TOL,
};
use diamond_gap::Error;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{MapChoice, Mode, RunConfig};
use crate::records::{csv_path, meta_line, to_line, write_ndjson, write_summary_csv};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// What a run produced: the exit code and the record lines (without the
/// metadata header).
#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub records: Vec<String>,
}

fn env_name(env: EnvMode) -> &'static str {
    match env {
        EnvMode::One => "1",
        EnvMode::D => "d",
        EnvMode::DSquared => "d2",
        EnvMode::Mixed => "mixed",
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Verify => "verify",
        Mode::Lemmas => "lemmas",
        Mode::Norms => "norms",
        Mode::Gap => "gap",
        Mode::Search => "search",
    }
}

fn config_json(cfg: &RunConfig) -> Value {
    json!({
        "d": cfg.d,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "trials": cfg.trials,
        "budget": cfg.budget,
        "restarts": cfg.restarts,
        "env": env_name(cfg.env),
        "channel": cfg.channel_spec,
        "tolerances": cfg.tolerances,
    })
}

/// Runs `cfg`, printing a human summary to `out` and writing record files
/// when an output path is set.
pub fn run<W: Write>(cfg: &RunConfig, out: &mut W) -> Outcome {
    let mut text = Vec::new();
    let result = match cfg.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cfg, &mut text)),
            Err(e) => Err(Error::InvalidArgument(format!("cannot build thread pool: {e}"))),
        },
        None => dispatch(cfg, &mut text),
    };
    let _ = out.write_all(&text);
    match result {
        Ok(outcome) => {
            if let Some(path) = &cfg.output_path {
                let meta = meta_line(mode_name(cfg.subcommand), &config_json(cfg));
                if let Err(e) = write_ndjson(path, &meta, &outcome.records) {
                    let _ = writeln!(out, "error: cannot write {}: {e}", path.display());
                    return Outcome {
                        exit_code: EXIT_FAILURE,
                        ..outcome
                    };
                }
            }
            outcome
        }
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            Outcome {
                exit_code: EXIT_FAILURE,
                records: Vec::new(),
            }
        }
    }
}

fn dispatch<W: Write>(cfg: &RunConfig, out: &mut W) -> diamond_gap::Result<Outcome> {
    match cfg.subcommand {
        Mode::Verify => run_verify(cfg, out),
        Mode::Lemmas => run_lemmas(cfg, out),
        Mode::Norms => run_norms(cfg, out),
        Mode::Gap => run_gap(cfg, out),
        Mode::Search => run_search(cfg, out),
    }
}

fn io(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("output error: {e}"))
}

#[derive(Serialize)]
struct VerifyRecord<'a> {
    record: &'static str,
    index: usize,
    flagged: bool,
    #[serde(flatten)]
    report: &'a VerificationReport,
}

#[derive(Serialize)]
struct FailureRecord<'a> {
    record: &'static str,
    index: usize,
    flagged: bool,
    error: String,
    best: Option<&'a DiamondResult>,
}

fn run_verify<W: Write>(cfg: &RunConfig, out: &mut W) -> diamond_gap::Result<Outcome> {
    let tol = cfg.tolerance("theorem", THEOREM_TOL);
    let results = theorem_sweep(cfg.d, cfg.samples, cfg.seed, cfg.env, cfg.restarts);

    let mut records = Vec::with_capacity(results.len());
    let mut reports: Vec<VerificationReport> = Vec::new();
    let (mut failures, mut flagged) = (0, 0);
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(mut report) => {
                report.pass = report.l <= report.bound + tol;
                let bad = !report.pass || !report.cross_check_pass;
                flagged += bad as usize;
                records.push(to_line(&VerifyRecord {
                    record: "verification",
                    index,
                    flagged: bad,
                    report: &report,
                }));
                reports.push(report);
            }
            Err(e) => {
                failures += 1;
                let best = match &e {
                    Error::SolverFailure { best, .. } => Some(best.as_ref()),
                    _ => None,
                };
                records.push(to_line(&FailureRecord {
                    record: "solver_failure",
                    index,
                    flagged: true,
                    error: e.to_string(),
                    best,
                }));
            }
        }
    }

    if let Some(path) = &cfg.output_path {
        let file = std::fs::File::create(csv_path(path)).map_err(io)?;
        let refs: Vec<&VerificationReport> = reports.iter().collect();
        write_summary_csv(file, &refs).map_err(|e| Error::InvalidArgument(format!("csv error: {e}")))?;
    }

    let worst = reports.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
    writeln!(
        out,
        "verify: d={} samples={} seed={} env={}",
        cfg.d,
        cfg.samples,
        cfg.seed,
        env_name(cfg.env)
    )
    .map_err(io)?;
    writeln!(
        out,
        "  pass {}/{}  flagged {}  solver failures {}",
        reports.iter().filter(|r| r.pass).count(),
        cfg.samples,
        flagged,
        failures
    )
    .map_err(io)?;
    if let Some(w) = worst {
        writeln!(
            out,
            "  max ratio L/(dR) = {:.6} (alpha = 1/sqrt2 = {:.6}) at L = {:.6}, R = {:.6}, bound = {:.6}",
            w.ratio, ALPHA, w.l, w.r, w.bound
        )
        .map_err(io)?;
    }

    let exit_code = if failures > 0 {
        EXIT_FAILURE
    } else if flagged > 0 {
        EXIT_ASSERTION
    } else {
        EXIT_PASS
    };
    Ok(Outcome { exit_code, records })
}

fn run_lemmas<W: Write>(cfg: &RunConfig, out: &mut W) -> diamond_gap::Result<Outcome> {
    let tol = cfg.tolerance("lemma", LEMMA_TOL);
    let mut report = lemma_suite(cfg.seed, cfg.trials)?;
    for t in &mut report.tallies {
        t.pass = t.max_violation <= tol;
    }
    let ok = report.tallies.iter().filter(|t| t.pass).count();
    report.pass = ok == report.tallies.len();
    report.tolerance = tol;

    writeln!(out, "lemmas: trials={} seed={} tolerance={tol:e}", cfg.trials, cfg.seed).map_err(io)?;
    for t in &report.tallies {
        writeln!(
            out,
            "  {} {:<58} max violation {:.6e}",
            if t.pass { "PASS" } else { "FAIL" },
            t.formula,
            t.max_violation
        )
        .map_err(io)?;
    }
    writeln!(out, "  {ok}/{} statements pass", report.tallies.len()).map_err(io)?;

    let mut records: Vec<String> = report
        .tallies
        .iter()
        .map(|t| to_line(&json!({ "record": "lemma", "tally": t })))
        .collect();
    records.push(to_line(
        &json!({ "record": "lemma_summary", "pass": report.pass, "seed": report.seed, "trials": report.trials }),
    ));
    Ok(Outcome {
        exit_code: if report.pass { EXIT_PASS } else { EXIT_ASSERTION },
        records,
    })
}

fn build_channel(cfg: &RunConfig) -> diamond_gap::Result<Channel> {
    let spec: ChannelSpec = cfg
        .channel_spec
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--channel is required".into()))?
        .parse()?;
    let ch = spec.build(cfg.d)?;
    if ch.d() != cfg.d {
        return Err(Error::Dimension(format!(
            "channel acts on d={} but --d is {}",
            ch.d(),
            cfg.d
        )));
    }
    Ok(ch)
}

fn print_norm<W: Write>(out: &mut W, label: &str, r: &DiamondResult) -> diamond_gap::Result<()> {
    writeln!(
        out,
        "  {label:<18} {:.6}  [{:.6}, {:.6}]  gap {:.1e}",
        r.value, r.lower_certificate, r.upper_certificate, r.gap
    )
    .map_err(io)
}

fn run_norms<W: Write>(cfg: &RunConfig, out: &mut W) -> diamond_gap::Result<Outcome> {
    let ch = build_channel(cfg)?;
    let phi = id_minus(&ch);
    let spec = cfg.channel_spec.as_deref().unwrap_or_default();
    writeln!(out, "norms: channel={spec} d={}", cfg.d).map_err(io)?;

    let mut records = Vec::new();
    let mut emit = |name: &str, r: &DiamondResult, out: &mut W| -> diamond_gap::Result<()> {
        print_norm(out, name, r)?;
        records.push(to_line(&json!({ "record": "norm", "map": name, "result": r })));
        Ok(())
    };
    match cfg.map {
        Some(MapChoice::T) => emit("T", &diamond_norm_sdp(&ch.to_superop())?, out)?,
        Some(MapChoice::IdMinusT) => emit("id-minus-T", &diamond_norm_sdp(&phi)?, out)?,
        Some(MapChoice::ThetaIdMinusT) => emit("theta-id-minus-T", &diamond_norm_sdp(&compose_theta(&phi))?, out)?,
        None => {
            let t = diamond_norm_sdp(&ch.to_superop())?;
            let r = diamond_norm_sdp(&phi)?;
            let l = diamond_norm_sdp(&compose_theta(&phi))?;
            emit("T", &t, out)?;
            emit("id-minus-T", &r, out)?;
            emit("theta-id-minus-T", &l, out)?;
            let bound = cfg.d as f64 * ALPHA * r.value;
            let ratio = if r.value > 0.0 {
                l.value / (cfg.d as f64 * r.value)
            } else {
                0.0
            };
            writeln!(
                out,
                "  L = {:.6}  R = {:.6}  bound = {:.6}  ratio = {:.6} (alpha = {:.6})",
                l.value, r.value, bound, ratio, ALPHA
            )
            .map_err(io)?;
            let tol = cfg.tolerance("theorem", THEOREM_TOL);
            if l.value > bound + tol {
                return Ok(Outcome {
                    exit_code: EXIT_ASSERTION,
                    records,
                });
            }
        }
    }
    Ok(Outcome {
        exit_code: EXIT_PASS,
        records,
    })
}

fn run_gap<W: Write>(cfg: &RunConfig, out: &mut W) -> diamond_gap::Result<Outcome> {
    let ch = build_channel(cfg)?;
    let strict = cfg.tolerance("strict_gap", STRICT_GAP);
    let w = gap_demonstration(&ch, cfg.restarts, cfg.seed)?;
    let strict_gap = w.slack_lemma1.max(w.slack_lemma2) > strict;
    let ok = strict_gap && w.corollary_ok && !w.analysis.incompatible_pair;

    writeln!(
        out,
        "gap: channel={} d={} restarts={} seed={} ({})",
        cfg.channel_spec.as_deref().unwrap_or_default(),
        cfg.d,
        cfg.restarts,
        cfg.seed,
        w.label
    )
    .map_err(io)?;
    writeln!(
        out,
        "  R(psi*) = {:.6}  rank X = {}  rank Y = {}",
        w.r_lower, w.rank_x, w.rank_y
    )
    .map_err(io)?;
    writeln!(
        out,
        "  ||Y||_1 = {:.6} <= d||X||_2 = {:.6} <= (d/sqrt2)||X||_1 = {:.6}",
        w.norm1_y,
        cfg.d as f64 * w.norm2_x,
        cfg.d as f64 * ALPHA * w.norm1_x
    )
    .map_err(io)?;
    writeln!(
        out,
        "  slack: {:.6e} + {:.6e} = {:.6e}  strict {}  corollary {}{}",
        w.slack_lemma2,
        w.slack_lemma1,
        w.total_slack,
        strict_gap,
        w.corollary_ok,
        if w.needs_review {
            "  (review: slack near threshold)"
        } else {
            ""
        }
    )
    .map_err(io)?;

    Ok(Outcome {
        exit_code: if ok { EXIT_PASS } else { EXIT_ASSERTION },
        records: vec![to_line(&json!({ "record": "gap", "witness": w }))],
    })
}

fn run_search<W: Write>(cfg: &RunConfig, out: &mut W) -> diamond_gap::Result<Outcome> {
    let tol = cfg.tolerance("theorem", THEOREM_TOL);
    let s = search_max_ratio(cfg.d, cfg.budget, cfg.seed)?;
    let mut records: Vec<String> = s
        .trace
        .iter()
        .map(|p| to_line(&json!({ "record": "search_step", "step": p })))
        .collect();
    records.push(to_line(&json!({
        "record": "search_best",
        "d": s.d,
        "seed": s.seed,
        "budget": s.budget,
        "best_ratio": s.best_ratio,
        "best_iteration": s.best_iteration,
        "best_env": s.best_env,
        "best_channel": s.best_channel,
        "failures": s.failures,
    })));
    let exceeded = s.best_ratio > ALPHA + tol;
    writeln!(out, "search: d={} budget={} seed={}", cfg.d, cfg.budget, cfg.seed).map_err(io)?;
    writeln!(
        out,
        "  best ratio L/(dR) = {:.6} (alpha = {:.6}) at iteration {}  env {}  solver failures {}",
        s.best_ratio,
        ALPHA,
        s.best_iteration.map_or("-".to_string(), |i| i.to_string()),
        s.best_env,
        s.failures
    )
    .map_err(io)?;
    Ok(Outcome {
        exit_code: if exceeded {
            EXIT_ASSERTION
        } else if s.failures > 0 {
            EXIT_FAILURE
        } else {
            EXIT_PASS
        },
        records,
    })
}
