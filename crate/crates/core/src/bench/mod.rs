//! Seeded benchmark runs over one problem cell `(problem, m, n)`.
//!
//! Trial `j` generates its instance from stream `j` of the run seed, runs the
//! selected solvers on it and checks each trace. Timing covers the solver
//! call only; generation and semi-symmetrization are excluded.

mod output;

pub use output::{
    format_sci, format_time, raw_csv_string, summary_csv_string, write_json_report, write_raw_csv,
    write_summary_csv, BenchReport, RAW_HEADER, REPORT_SCHEMA, SUMMARY_HEADER,
};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MteqError, Result};
use crate::problems::{generate, ProblemSpec};
use crate::solvers::{check_trace, solve, SolverConfig, SolverKind, SolverReport, SolverStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverSelection {
    Inexact,
    Regularized,
    Both,
}

impl SolverSelection {
    pub fn kinds(self) -> &'static [SolverKind] {
        match self {
            SolverSelection::Inexact => &[SolverKind::Inexact],
            SolverSelection::Regularized => &[SolverKind::Regularized],
            SolverSelection::Both => &[SolverKind::Inexact, SolverKind::Regularized],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolverSelection::Inexact => "inexact",
            SolverSelection::Regularized => "regularized",
            SolverSelection::Both => "both",
        }
    }
}

impl fmt::Display for SolverSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverSelection {
    type Err = MteqError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inexact" => Ok(SolverSelection::Inexact),
            "regularized" => Ok(SolverSelection::Regularized),
            "both" => Ok(SolverSelection::Both),
            _ => Err(MteqError::Config(format!(
                "solver must be inexact, regularized or both, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub spec: ProblemSpec,
    pub trials: usize,
    pub seed: u64,
    pub solvers: SolverSelection,
    pub inexact: SolverConfig,
    pub regularized: SolverConfig,
    /// Worker threads; 1 runs the trials sequentially.
    pub jobs: usize,
}

impl BenchConfig {
    pub fn new(spec: ProblemSpec, solvers: SolverSelection) -> Self {
        Self {
            spec,
            trials: 100,
            seed: 0,
            solvers,
            inexact: SolverConfig::inexact(),
            regularized: SolverConfig::regularized(),
            jobs: 1,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    /// Applies `tol` and `max_iter` to both solver configurations.
    pub fn with_stopping(mut self, tol: f64, max_iter: usize) -> Result<Self> {
        self.inexact = self.inexact.with_tol(tol)?.with_max_iter(max_iter);
        self.regularized = self.regularized.with_tol(tol)?.with_max_iter(max_iter);
        Ok(self)
    }

    pub fn solver_config(&self, kind: SolverKind) -> &SolverConfig {
        match kind {
            SolverKind::Inexact => &self.inexact,
            SolverKind::Regularized => &self.regularized,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(MteqError::Config("trials must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(MteqError::Config("jobs must be at least 1".into()));
        }
        self.spec.validate()?;
        self.inexact.validate()?;
        self.regularized.validate()
    }
}

/// One solver run on one trial instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub solver: SolverKind,
    /// `None` when the solver returned an error instead of a report.
    pub status: Option<SolverStatus>,
    pub error: Option<String>,
    pub iterations: usize,
    pub ls_iters: usize,
    pub time_ms: f64,
    /// Final `‖F̂(x)‖`; `None` when no iterate was evaluated.
    pub residual: Option<f64>,
    pub residual_history: Vec<f64>,
    pub t_history: Vec<f64>,
    pub order_estimate: Option<f64>,
    pub reduced_zeros: usize,
    pub invariant_violations: Vec<String>,
}

impl TrialRecord {
    fn from_report(trial: usize, report: &SolverReport, cfg: &SolverConfig) -> Self {
        Self {
            trial,
            solver: report.solver,
            status: Some(report.status),
            error: None,
            iterations: report.iterations,
            ls_iters: report.line_search_backtracks,
            time_ms: report.time_ms,
            residual: report.residual_history.last().copied(),
            residual_history: report.residual_history.clone(),
            t_history: report.t_history.clone(),
            order_estimate: report.order_estimate,
            reduced_zeros: report.reduced_zeros,
            invariant_violations: check_trace(report, cfg),
        }
    }

    fn from_error(trial: usize, solver: SolverKind, err: &MteqError) -> Self {
        Self {
            trial,
            solver,
            status: None,
            error: Some(err.to_string()),
            iterations: 0,
            ls_iters: 0,
            time_ms: 0.0,
            residual: None,
            residual_history: Vec::new(),
            t_history: Vec::new(),
            order_estimate: None,
            reduced_zeros: 0,
            invariant_violations: Vec::new(),
        }
    }

    pub fn converged(&self) -> bool {
        self.status == Some(SolverStatus::Converged)
    }

    pub fn status_str(&self) -> &'static str {
        self.status.map_or("Error", SolverStatus::as_str)
    }
}

/// Aggregates for one solver; means are over successful trials only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub solver: SolverKind,
    pub trials: usize,
    pub successes: usize,
    pub failures: usize,
    pub mean_iters: Option<f64>,
    pub mean_time_ms: Option<f64>,
    pub mean_residual: Option<f64>,
    pub mean_ls_iters: Option<f64>,
    pub invariant_violations: usize,
}

/// Inexact-over-regularized ratios of mean iterations and mean time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRatios {
    pub numerator: SolverKind,
    pub denominator: SolverKind,
    /// Iteration ratio.
    pub ir: Option<f64>,
    /// Time ratio.
    pub tr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub problem: u8,
    pub m: usize,
    pub n: usize,
    pub solvers: Vec<SolverSummary>,
    pub ratios: Option<SolverRatios>,
}

impl BenchSummary {
    pub fn solver(&self, kind: SolverKind) -> Option<&SolverSummary> {
        self.solvers.iter().find(|s| s.solver == kind)
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

pub fn summarize(cfg: &BenchConfig, records: &[TrialRecord]) -> BenchSummary {
    let solvers: Vec<SolverSummary> = cfg
        .solvers
        .kinds()
        .iter()
        .map(|&kind| {
            let mut rows: Vec<&TrialRecord> = records.iter().filter(|r| r.solver == kind).collect();
            // Sum in trial order so the aggregate does not depend on scheduling.
            rows.sort_by_key(|r| r.trial);
            let ok: Vec<&TrialRecord> = rows.iter().copied().filter(|r| r.converged()).collect();
            SolverSummary {
                solver: kind,
                trials: rows.len(),
                successes: ok.len(),
                failures: rows.len() - ok.len(),
                mean_iters: mean(ok.iter().map(|r| r.iterations as f64)),
                mean_time_ms: mean(ok.iter().map(|r| r.time_ms)),
                mean_residual: mean(ok.iter().filter_map(|r| r.residual)),
                mean_ls_iters: mean(ok.iter().map(|r| r.ls_iters as f64)),
                invariant_violations: rows.iter().map(|r| r.invariant_violations.len()).sum(),
            }
        })
        .collect();
    let ratios = match (
        solvers.iter().find(|s| s.solver == SolverKind::Inexact),
        solvers.iter().find(|s| s.solver == SolverKind::Regularized),
    ) {
        (Some(a), Some(b)) => {
            let ratio = |x: Option<f64>, y: Option<f64>| match (x, y) {
                (Some(x), Some(y)) if y > 0.0 => Some(x / y),
                _ => None,
            };
            Some(SolverRatios {
                numerator: SolverKind::Inexact,
                denominator: SolverKind::Regularized,
                ir: ratio(a.mean_iters, b.mean_iters),
                tr: ratio(a.mean_time_ms, b.mean_time_ms),
            })
        }
        _ => None,
    };
    BenchSummary {
        problem: cfg.spec.problem.id(),
        m: cfg.spec.order,
        n: cfg.spec.dim,
        solvers,
        ratios,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub records: Vec<TrialRecord>,
    pub summary: BenchSummary,
}

impl BenchRun {
    /// Every requested trial produced a solver report.
    pub fn all_completed(&self) -> bool {
        self.records.iter().all(|r| r.status.is_some())
    }
}

fn run_trial(cfg: &BenchConfig, trial: usize) -> Result<Vec<TrialRecord>> {
    let eq = generate(&cfg.spec, cfg.seed, trial as u64)?;
    Ok(cfg
        .solvers
        .kinds()
        .iter()
        .map(|&kind| {
            let scfg = cfg.solver_config(kind);
            match solve(kind, &eq, scfg) {
                Ok(report) => TrialRecord::from_report(trial, &report, scfg),
                Err(e) => TrialRecord::from_error(trial, kind, &e),
            }
        })
        .collect())
}

/// Runs every trial and aggregates. Instance-generation failures are
/// configuration errors and abort the run; solver failures are recorded.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchRun> {
    cfg.validate()?;
    let per_trial: Vec<Vec<TrialRecord>> = if cfg.jobs == 1 {
        (0..cfg.trials).map(|j| run_trial(cfg, j)).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| MteqError::Config(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|j| run_trial(cfg, j))
                .collect::<Result<_>>()
        })?
    };
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    let summary = summarize(cfg, &records);
    Ok(BenchRun { records, summary })
}
