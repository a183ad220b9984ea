//! Regularized Newton method for nonnegative `b̂`.
//!
//! Works on `E(t, y) = (t, E(y) + t y)` with merit `θ = ½‖E(t, y)‖²`. The
//! step solves `d_t = t̄β - t` and `(E'(y) + tI) d_y = -(E(y) + ty) - d_t y`
//! with `β = γ min(1, ‖E(t, y)‖²)`, so `t` decreases monotonically and stays
//! above `t̄β`. When `b̂` has zeros, the zero-pattern reduction runs first
//! and the method solves the remaining principal subsystem.

use std::time::Instant;

use super::{
    solve_equilibrated, start_point, InitialPoint, IterateTrace, Recorder, SolverConfig, SolverKind, SolverReport,
    SolverStatus, StepTrace, MIN_STEP,
};
use crate::error::{MteqError, Result};
use crate::linalg::{dot, norm2};
use crate::model::maps::{power, reg_block_from, reg_map_from, PointEval};
use crate::model::{reduce_zero_pattern, BClass, MTensorEquation};

pub fn solve_regularized_newton(eq: &MTensorEquation, cfg: &SolverConfig) -> Result<SolverReport> {
    cfg.validate()?;
    if eq.b_class() == BClass::Invalid {
        return Ok(SolverReport::empty(
            SolverKind::Regularized,
            SolverStatus::InvalidB,
            "right-hand side has a negative or non-finite entry".into(),
        ));
    }
    let started = Instant::now();
    let mut rec = Recorder::new(SolverKind::Regularized, cfg.record_iterates(), started);

    if eq.b_class() == BClass::StrictlyPositive {
        let x0 = start_point(eq, cfg.initial_point())?;
        let (status, x, message) = iterate(eq, 1.0, x0, cfg, &mut rec)?;
        return Ok(rec.finish(status, x, 0, message));
    }

    let reduction = reduce_zero_pattern(eq)?;
    let zeros = reduction.zero_set().len();
    let Some(sub) = reduction.reduced_equation() else {
        // Every component is forced to zero, and x = 0 is the solution.
        rec.push(
            IterateTrace {
                k: 0,
                merit: 0.0,
                residual: 0.0,
                min_y: f64::INFINITY,
                feasibility_gap: None,
                t: None,
                beta: None,
                step: None,
                y: None,
            },
            &[],
        );
        return Ok(rec.finish(SolverStatus::Converged, vec![0.0; eq.dim()], zeros, None));
    };
    let x0 = match cfg.initial_point() {
        InitialPoint::Explicit { x0 } => {
            crate::error::check_len(eq.dim(), x0.len())?;
            reduction.support().iter().map(|&i| x0[i]).collect()
        }
        policy => start_point(sub, policy)?,
    };
    let (status, x_sub, message) = iterate(sub, sub.omega(), x0, cfg, &mut rec)?;
    let x = if x_sub.is_empty() {
        x_sub
    } else {
        reduction.embed_solution(&x_sub)?
    };
    Ok(rec.finish(status, x, zeros, message))
}

/// Runs the method on `eq`; `scale` converts its residual into the residual
/// of the caller's equation.
fn iterate(
    eq: &MTensorEquation,
    scale: f64,
    x0: Vec<f64>,
    cfg: &SolverConfig,
    rec: &mut Recorder,
) -> Result<(SolverStatus, Vec<f64>, Option<String>)> {
    let (sigma, rho, gamma, t_bar) = (cfg.sigma(), cfg.rho(), cfg.gamma(), cfg.t_bar());
    let decrease = 2.0 * sigma * (1.0 - gamma * t_bar);
    let mut t = t_bar;
    let mut cur = PointEval::new(eq, &power(&x0, eq.order()))?;

    loop {
        let ebar = reg_map_from(&cur, t);
        let merit_sq = dot(&ebar, &ebar);
        let theta = 0.5 * merit_sq;
        let beta = gamma * merit_sq.min(1.0);
        let residual = scale * norm2(&cur.f);
        rec.push(
            IterateTrace {
                k: 0,
                merit: merit_sq.sqrt(),
                residual,
                min_y: cur.y.iter().copied().fold(f64::INFINITY, f64::min),
                feasibility_gap: None,
                t: Some(t),
                beta: Some(beta),
                step: None,
                y: None,
            },
            &cur.y,
        );
        if residual <= cfg.tol() {
            return Ok((SolverStatus::Converged, cur.x, None));
        }
        if rec.iterations() >= cfg.max_iter() {
            return Ok((SolverStatus::MaxIterations, cur.x, None));
        }

        let dt = t_bar * beta - t;
        let block = reg_block_from(eq, &cur, t)?;
        let rhs: Vec<f64> = ebar[1..]
            .iter()
            .zip(&cur.y)
            .map(|(e, y)| -e - dt * y)
            .collect();
        let dy = match solve_equilibrated(block.clone(), &cur.y, &rhs) {
            Ok(d) => d,
            Err(e @ MteqError::SingularSystem { .. }) => {
                return Ok((SolverStatus::SingularSystem, cur.x, Some(e.to_string())))
            }
            Err(e) => return Err(e),
        };
        // ∇θᵀd = E(t, y)ᵀ J d with J d = (d_t, d_t y + (E'(y) + tI) d_y).
        let block_dy = block.matvec(&dy)?;
        let dir = ebar[0] * dt
            + ebar[1..]
                .iter()
                .zip(cur.y.iter().zip(&block_dy))
                .map(|(e, (y, bd))| e * (dt * y + bd))
                .sum::<f64>();

        let mut alpha = 1.0;
        let mut backtracks = 0;
        let next = loop {
            let trial: Vec<f64> = cur.y.iter().zip(&dy).map(|(y, d)| y + alpha * d).collect();
            let t_trial = t + alpha * dt;
            if t_trial > 0.0 && trial.iter().all(|&v| v > 0.0) {
                if let Ok(p) = PointEval::new(eq, &trial) {
                    let e = reg_map_from(&p, t_trial);
                    if 0.5 * dot(&e, &e) <= (1.0 - decrease * alpha) * theta {
                        break Some((p, t_trial));
                    }
                }
            }
            alpha *= rho;
            backtracks += 1;
            if alpha < MIN_STEP {
                break None;
            }
        };
        rec.step(StepTrace {
            alpha: if next.is_some() { alpha } else { 0.0 },
            backtracks,
            directional_derivative: Some(dir),
        });
        match next {
            Some((p, t_next)) => {
                cur = p;
                t = t_next;
            }
            None => {
                return Ok((
                    SolverStatus::LineSearchFailed,
                    cur.x,
                    Some(format!("step length fell below {MIN_STEP:e}")),
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_equation;
    use crate::tensor::DenseTensor;
    use approx::assert_relative_eq;

    fn identity_eq(b: Vec<f64>) -> MTensorEquation {
        make_equation(DenseTensor::identity(3, b.len()).unwrap(), b, false).unwrap()
    }

    #[test]
    fn positive_rhs() {
        let r = solve_regularized_newton(&identity_eq(vec![4.0, 9.0]), &SolverConfig::regularized())
            .unwrap();
        assert!(r.converged());
        assert_relative_eq!(r.x[0], 2.0, max_relative = 1e-9);
        assert_relative_eq!(r.x[1], 3.0, max_relative = 1e-9);
        assert_eq!(r.t_history.len(), r.iterations + 1);
        assert_eq!(r.t_history[0], 0.01);
        assert!(r.t_history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.reduced_zeros, 0);
    }

    #[test]
    fn zeros_in_rhs_are_reduced() {
        let r = solve_regularized_newton(&identity_eq(vec![4.0, 0.0, 1.0]), &SolverConfig::regularized())
            .unwrap();
        assert!(r.converged());
        assert_eq!(r.reduced_zeros, 1);
        assert_eq!(r.x[1], 0.0);
        assert_relative_eq!(r.x[0], 2.0, max_relative = 1e-9);
        assert_relative_eq!(r.x[2], 1.0, max_relative = 1e-9);
    }

    #[test]
    fn all_zero_rhs_gives_zero() {
        let r = solve_regularized_newton(&identity_eq(vec![0.0, 0.0]), &SolverConfig::regularized())
            .unwrap();
        assert!(r.converged());
        assert_eq!(r.x, vec![0.0, 0.0]);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn negative_rhs_rejected() {
        let r = solve_regularized_newton(&identity_eq(vec![1.0, -1.0]), &SolverConfig::regularized())
            .unwrap();
        assert_eq!(r.status, SolverStatus::InvalidB);
    }

    #[test]
    fn directional_derivative_is_descent() {
        let r = solve_regularized_newton(&identity_eq(vec![4.0, 9.0]), &SolverConfig::regularized())
            .unwrap();
        for (tr, m) in r.trace.iter().zip(&r.merit_history) {
            if let Some(s) = &tr.step {
                assert!(s.directional_derivative.unwrap() < 0.0);
                assert!(s.directional_derivative.unwrap() <= -(1.0 - 0.009) * m * m + 1e-10 * (1.0 + m * m));
            }
        }
    }
}
