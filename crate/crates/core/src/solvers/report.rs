use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverStatus {
    Converged,
    MaxIterations,
    LineSearchFailed,
    SingularSystem,
    InvalidB,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Converged => "Converged",
            SolverStatus::MaxIterations => "MaxIterations",
            SolverStatus::LineSearchFailed => "LineSearchFailed",
            SolverStatus::SingularSystem => "SingularSystem",
            SolverStatus::InvalidB => "InvalidB",
        }
    }
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Inexact,
    Regularized,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Inexact => "inexact",
            SolverKind::Regularized => "regularized",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State at iterate `k`, plus the step taken from it (absent for the last one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateTrace {
    pub k: usize,
    /// `‖E(y_k)‖` (inexact) or `‖E(t_k, y_k)‖` (regularized).
    pub merit: f64,
    /// `‖F̂(x_k)‖` on the full equation.
    pub residual: f64,
    pub min_y: f64,
    /// `max_i (f_i(y_k) - b̂_i)`; negative inside the feasibility band (inexact only).
    pub feasibility_gap: Option<f64>,
    pub t: Option<f64>,
    pub beta: Option<f64>,
    pub step: Option<StepTrace>,
    pub y: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub alpha: f64,
    pub backtracks: usize,
    /// `∇θᵀd` evaluated with the assembled Jacobian (regularized only).
    pub directional_derivative: Option<f64>,
}

/// Outcome of one solver run.
///
/// `x` is in the original variables; scaling does not move roots, so it
/// solves both the scaled and the original equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub solver: SolverKind,
    pub status: SolverStatus,
    pub x: Vec<f64>,
    pub iterations: usize,
    pub line_search_backtracks: usize,
    /// Wall time of the solver call in milliseconds.
    pub time_ms: f64,
    pub residual_history: Vec<f64>,
    pub merit_history: Vec<f64>,
    pub t_history: Vec<f64>,
    pub order_estimate: Option<f64>,
    /// Number of components fixed at zero by the reduction pass.
    pub reduced_zeros: usize,
    pub trace: Vec<IterateTrace>,
    pub message: Option<String>,
}

impl SolverReport {
    pub(crate) fn empty(solver: SolverKind, status: SolverStatus, message: String) -> Self {
        Self {
            solver,
            status,
            x: Vec::new(),
            iterations: 0,
            line_search_backtracks: 0,
            time_ms: 0.0,
            residual_history: Vec::new(),
            merit_history: Vec::new(),
            t_history: Vec::new(),
            order_estimate: None,
            reduced_zeros: 0,
            trace: Vec::new(),
            message: Some(message),
        }
    }

    pub fn converged(&self) -> bool {
        self.status == SolverStatus::Converged
    }

    /// Last recorded `‖F̂(x_k)‖`, or `inf` if no iterate was evaluated.
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::INFINITY)
    }
}
