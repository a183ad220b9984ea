//! The inexact Newton method (`b > 0`) and the regularized Newton method
//! (`b >= 0`), with their shared bookkeeping.

mod certify;
mod config;
mod inexact;
mod invariants;
mod order;
mod regularized;
mod report;

pub use certify::{certify_solution, Certificate};
pub use config::{InitialPoint, SolverConfig, DEFAULT_FEASIBLE_FRACTION, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use inexact::solve_inexact_newton;
pub use invariants::check_trace;
pub use order::estimate_order;
pub use regularized::solve_regularized_newton;
pub use report::{IterateTrace, SolverKind, SolverReport, SolverStatus, StepTrace};

use std::time::Instant;

use crate::error::{check_len, Result};
use crate::linalg::DenseMatrix;
use crate::model::MTensorEquation;

/// Backtracking gives up once the step length drops below this.
pub const MIN_STEP: f64 = 1e-16;

pub fn solve(kind: SolverKind, eq: &MTensorEquation, cfg: &SolverConfig) -> Result<SolverReport> {
    match kind {
        SolverKind::Inexact => solve_inexact_newton(eq, cfg),
        SolverKind::Regularized => solve_regularized_newton(eq, cfg),
    }
}

/// Largest `eps` with `Â (eps e)^{m-1} < 2 b̂`, i.e. `f((eps e)^[m-1]) < b̂`.
/// Rows with nonpositive sums never bind; if none binds, returns 1.
pub fn max_feasible_epsilon(eq: &MTensorEquation) -> Result<f64> {
    let row_sums = eq.tensor().apply_vec(&vec![1.0; eq.dim()])?;
    let inv = 1.0 / (eq.order() - 1) as f64;
    let eps = row_sums
        .iter()
        .zip(eq.rhs())
        .filter(|(r, _)| **r > 0.0)
        .map(|(r, b)| (2.0 * b / r).powf(inv))
        .fold(f64::INFINITY, f64::min);
    Ok(if eps.is_finite() { eps } else { 1.0 })
}

/// The starting `x0` prescribed by `policy`, before any feasibility halving.
pub(crate) fn start_point(eq: &MTensorEquation, policy: &InitialPoint) -> Result<Vec<f64>> {
    let n = eq.dim();
    Ok(match policy {
        InitialPoint::Feasible { fraction } => vec![fraction * max_feasible_epsilon(eq)?; n],
        InitialPoint::EpsilonE { eps0 } => vec![*eps0; n],
        InitialPoint::ConstantE { c } => vec![*c; n],
        InitialPoint::Explicit { x0 } => {
            check_len(n, x0.len())?;
            x0.clone()
        }
    })
}

/// Solves `m d = rhs` after scaling columns by `col` and then each row by
/// its largest magnitude. The Newton matrices of badly scaled instances have
/// rows differing by many orders of magnitude; equilibration keeps the
/// pivot test of [`DenseMatrix::lu_solve`] from rejecting them.
pub(crate) fn solve_equilibrated(mut m: DenseMatrix, col: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    m.scale(None, Some(col));
    let n = m.dim();
    let rows: Vec<f64> = (0..n)
        .map(|i| {
            let big = m.row(i).iter().fold(0.0, |a: f64, v| a.max(v.abs()));
            if big > 0.0 {
                big.recip()
            } else {
                1.0
            }
        })
        .collect();
    m.scale(Some(&rows), None);
    let scaled: Vec<f64> = rhs.iter().zip(&rows).map(|(r, s)| r * s).collect();
    let z = m.lu_solve(&scaled)?;
    Ok(z.iter().zip(col).map(|(z, c)| z * c).collect())
}

/// Accumulates per-iterate records and assembles the final report.
pub(crate) struct Recorder {
    kind: SolverKind,
    record_y: bool,
    started: Instant,
    trace: Vec<IterateTrace>,
    backtracks: usize,
}

impl Recorder {
    pub(crate) fn new(kind: SolverKind, record_y: bool, started: Instant) -> Self {
        Self {
            kind,
            record_y,
            started,
            trace: Vec::new(),
            backtracks: 0,
        }
    }

    pub(crate) fn push(&mut self, mut entry: IterateTrace, y: &[f64]) {
        entry.k = self.trace.len();
        if self.record_y {
            entry.y = Some(y.to_vec());
        }
        self.trace.push(entry);
    }

    pub(crate) fn step(&mut self, step: StepTrace) {
        self.backtracks += step.backtracks;
        if let Some(last) = self.trace.last_mut() {
            last.step = Some(step);
        }
    }

    pub(crate) fn iterations(&self) -> usize {
        self.trace.len().saturating_sub(1)
    }

    pub(crate) fn finish(
        self,
        status: SolverStatus,
        x: Vec<f64>,
        reduced_zeros: usize,
        message: Option<String>,
    ) -> SolverReport {
        let time_ms = self.started.elapsed().as_secs_f64() * 1e3;
        let residual_history: Vec<f64> = self.trace.iter().map(|t| t.residual).collect();
        let merit_history = self.trace.iter().map(|t| t.merit).collect();
        let t_history = self.trace.iter().filter_map(|t| t.t).collect();
        SolverReport {
            solver: self.kind,
            status,
            x,
            iterations: self.trace.len().saturating_sub(1),
            line_search_backtracks: self.backtracks,
            time_ms,
            order_estimate: estimate_order(&residual_history),
            residual_history,
            merit_history,
            t_history,
            reduced_zeros,
            trace: self.trace,
            message,
        }
    }
}
