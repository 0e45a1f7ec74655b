//! Machine-readable output: NDJSON records behind one metadata line, and a
//! CSV summary for sweeps.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use diamond_gap::verify::VerificationReport;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
struct Meta<'a> {
    record: &'static str,
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    created_unix: u64,
    config: &'a Value,
}

/// The header line. It carries the only time-dependent field, so the record
/// lines that follow are reproducible byte for byte.
pub fn meta_line(subcommand: &str, config: &Value) -> String {
    let created_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    serde_json::to_string(&Meta {
        record: "meta",
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        created_unix,
        config,
    })
    .expect("meta serializes")
}

pub fn to_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("record serializes")
}

/// Writes the header and record lines to `path`.
pub fn write_ndjson(path: &Path, meta: &str, lines: &[String]) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{meta}")?;
    for line in lines {
        writeln!(w, "{line}")?;
    }
    w.flush()
}

/// `out.ndjson` -> `out.csv`.
pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    d: usize,
    seed: u64,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "R")]
    r: f64,
    bound: f64,
    ratio: f64,
    pass: bool,
    #[serde(rename = "sdp_gap_L")]
    sdp_gap_l: f64,
    #[serde(rename = "sdp_gap_R")]
    sdp_gap_r: f64,
}

pub fn write_summary_csv<W: Write>(w: W, reports: &[&VerificationReport]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in reports {
        out.serialize(SummaryRow {
            d: r.d,
            seed: r.seed,
            l: r.l,
            r: r.r,
            bound: r.bound,
            ratio: r.ratio,
            pass: r.pass,
            sdp_gap_l: r.certificates.l.gap,
            sdp_gap_r: r.certificates.r.gap,
        })?;
    }
    out.flush()?;
    Ok(())
}
