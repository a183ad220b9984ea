use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BenchConfig, BenchRun, BenchSummary, TrialRecord};
use crate::error::{MteqError, Result};

pub const RAW_HEADER: [&str; 10] = [
    "problem", "m", "n", "trial", "solver", "status", "iters", "ls_iters", "time_ms", "residual",
];
pub const SUMMARY_HEADER: [&str; 10] = [
    "problem",
    "m",
    "n",
    "solver",
    "trials",
    "successes",
    "mean_iters",
    "mean_time_ms",
    "mean_residual",
    "mean_ls_iters",
];
pub const REPORT_SCHEMA: &str = "mteq-report/1";

/// Scientific notation with 3 significant digits and a signed two-digit
/// exponent, e.g. `8.50E-12`.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.2E}");
    let (mantissa, exp) = s.split_once('E').expect("E format always has an exponent");
    let exp: i32 = exp.parse().expect("E format exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

/// Milliseconds with 5 decimals.
pub fn format_time(ms: f64) -> String {
    format!("{ms:.5}")
}

fn opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map_or_else(|| "NA".to_string(), f)
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| MteqError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row per trial and solver; `trial` is the 0-based stream index.
pub fn raw_csv_string(cfg: &BenchConfig, records: &[TrialRecord]) -> Result<String> {
    let spec = &cfg.spec;
    to_csv(
        &RAW_HEADER,
        records.iter().map(|r| {
            vec![
                spec.problem.id().to_string(),
                spec.order.to_string(),
                spec.dim.to_string(),
                r.trial.to_string(),
                r.solver.to_string(),
                r.status_str().to_string(),
                r.iterations.to_string(),
                r.ls_iters.to_string(),
                format_time(r.time_ms),
                opt(r.residual, format_sci),
            ]
        }),
    )
}

pub fn summary_csv_string(summary: &BenchSummary) -> Result<String> {
    to_csv(
        &SUMMARY_HEADER,
        summary.solvers.iter().map(|s| {
            vec![
                summary.problem.to_string(),
                summary.m.to_string(),
                summary.n.to_string(),
                s.solver.to_string(),
                s.trials.to_string(),
                s.successes.to_string(),
                opt(s.mean_iters, |v| format!("{v:.2}")),
                opt(s.mean_time_ms, format_time),
                opt(s.mean_residual, format_sci),
                opt(s.mean_ls_iters, |v| format!("{v:.2}")),
            ]
        }),
    )
}

pub fn write_raw_csv(cfg: &BenchConfig, records: &[TrialRecord], path: &Path) -> Result<()> {
    fs::write(path, raw_csv_string(cfg, records)?)?;
    Ok(())
}

pub fn write_summary_csv(summary: &BenchSummary, path: &Path) -> Result<()> {
    fs::write(path, summary_csv_string(summary)?)?;
    Ok(())
}

/// The JSON document: schema tag, configuration echo, per-trial records
/// (with residual histories and order estimates) and the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: String,
    pub config: BenchConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: BenchSummary,
}

impl BenchReport {
    pub fn new(cfg: &BenchConfig, run: &BenchRun) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            config: cfg.clone(),
            trials: run.records.clone(),
            summary: run.summary.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.schema != REPORT_SCHEMA {
            return Err(MteqError::Config(format!(
                "unsupported report schema {:?}",
                report.schema
            )));
        }
        Ok(report)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

pub fn write_json_report(cfg: &BenchConfig, run: &BenchRun, path: &Path) -> Result<()> {
    fs::write(path, BenchReport::new(cfg, run).to_json()?)?;
    Ok(())
}
