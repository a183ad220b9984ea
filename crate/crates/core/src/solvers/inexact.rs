//! Damped Newton method on `E(y) = f(y) / y` for strictly positive `b̂`.
//!
//! Each step solves `(f'(y) - diag(f(y)/y)) d = -f(y)` and backtracks
//! `α ∈ {1, ρ, ρ², ...}` until `y + αd > 0`, `f(y + αd) < b̂` and
//! `‖E(y + αd)‖² <= (1 - 2σα) ‖E(y)‖²`. Keeping `f(y) < b̂` makes the full
//! step positivity-preserving, since `M(y)(y + αd) = b̂ - α f(y)`.

use std::time::Instant;

use super::{
    solve_equilibrated, start_point, IterateTrace, Recorder, SolverConfig, SolverKind, SolverReport, SolverStatus,
    StepTrace, MIN_STEP,
};
use crate::error::{MteqError, Result};
use crate::linalg::norm2;
use crate::model::maps::{power, PointEval};
use crate::model::{BClass, MTensorEquation};

/// Start halvings tried before giving up on `f(y0) < b̂`.
const MAX_HALVINGS: usize = 60;

fn below_rhs(p: &PointEval, rhs: &[f64]) -> bool {
    p.f.iter().zip(rhs).all(|(f, b)| f < b)
}

fn feasibility_gap(p: &PointEval, rhs: &[f64]) -> f64 {
    p.f.iter()
        .zip(rhs)
        .map(|(f, b)| f - b)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Halves `x0` until `f(x0^[m-1]) < b̂`.
fn feasible_start(eq: &MTensorEquation, mut x0: Vec<f64>) -> Option<PointEval> {
    for _ in 0..=MAX_HALVINGS {
        if let Ok(p) = PointEval::new(eq, &power(&x0, eq.order())) {
            if below_rhs(&p, eq.rhs()) {
                return Some(p);
            }
        }
        x0.iter_mut().for_each(|v| *v *= 0.5);
    }
    None
}

fn sum_sq_e(p: &PointEval) -> f64 {
    p.f.iter().zip(&p.y).map(|(f, y)| (f / y).powi(2)).sum()
}

pub fn solve_inexact_newton(eq: &MTensorEquation, cfg: &SolverConfig) -> Result<SolverReport> {
    cfg.validate()?;
    if eq.b_class() != BClass::StrictlyPositive {
        return Ok(SolverReport::empty(
            SolverKind::Inexact,
            SolverStatus::InvalidB,
            format!(
                "inexact Newton needs a strictly positive right-hand side, got {}",
                eq.b_class().as_str()
            ),
        ));
    }

    let started = Instant::now();
    let mut rec = Recorder::new(SolverKind::Inexact, cfg.record_iterates(), started);
    let x0 = start_point(eq, cfg.initial_point())?;
    let Some(mut cur) = feasible_start(eq, x0) else {
        return Ok(rec.finish(
            SolverStatus::LineSearchFailed,
            Vec::new(),
            0,
            Some("no starting point with f(y0) < b found".into()),
        ));
    };
    let rhs = eq.rhs();

    let (status, message) = loop {
        let merit_sq = sum_sq_e(&cur);
        let residual = norm2(&cur.f);
        rec.push(
            IterateTrace {
                k: 0,
                merit: merit_sq.sqrt(),
                residual,
                min_y: cur.y.iter().copied().fold(f64::INFINITY, f64::min),
                feasibility_gap: Some(feasibility_gap(&cur, rhs)),
                t: None,
                beta: None,
                step: None,
                y: None,
            },
            &cur.y,
        );
        if residual <= cfg.tol() {
            break (SolverStatus::Converged, None);
        }
        if rec.iterations() >= cfg.max_iter() {
            break (SolverStatus::MaxIterations, None);
        }

        let neg_f: Vec<f64> = cur.f.iter().map(|v| -v).collect();
        let d = match solve_equilibrated(cur.newton_matrix(eq)?, &cur.y, &neg_f) {
            Ok(d) => d,
            Err(e @ MteqError::SingularSystem { .. }) => {
                break (SolverStatus::SingularSystem, Some(e.to_string()))
            }
            Err(e) => return Err(e),
        };

        let mut alpha = 1.0;
        let mut backtracks = 0;
        let next = loop {
            let trial: Vec<f64> = cur.y.iter().zip(&d).map(|(y, d)| y + alpha * d).collect();
            if trial.iter().all(|&v| v > 0.0) {
                if let Ok(p) = PointEval::new(eq, &trial) {
                    if sum_sq_e(&p) <= (1.0 - 2.0 * cfg.sigma() * alpha) * merit_sq
                        && below_rhs(&p, rhs)
                    {
                        break Some(p);
                    }
                }
            }
            alpha *= cfg.rho();
            backtracks += 1;
            if alpha < MIN_STEP {
                break None;
            }
        };
        rec.step(StepTrace {
            alpha: if next.is_some() { alpha } else { 0.0 },
            backtracks,
            directional_derivative: None,
        });
        match next {
            Some(p) => cur = p,
            None => {
                break (
                    SolverStatus::LineSearchFailed,
                    Some(format!("step length fell below {MIN_STEP:e}")),
                )
            }
        }
    };

    Ok(rec.finish(status, cur.x, 0, message))
}
