//! Checks a solver trace against the properties the line searches enforce.

use super::{SolverConfig, SolverKind, SolverReport};

/// Relative slack for comparisons between recomputed floating-point values.
const SLACK: f64 = 1e-12;

/// Returns one message per violated property; empty when the trace is clean.
///
/// Both methods: every `y_k > 0`. Inexact: `f(y_k) < b̂` and
/// `‖E_{k+1}‖ <= sqrt(1 - 2σα_k) ‖E_k‖`. Regularized: `0 < t_{k+1} <= t_k <= t̄`,
/// `t_k >= t̄β_k` (equality after a full step while `‖E‖ >= 1`), `θ` non-increasing and
/// `∇θᵀd <= -(1 - γt̄) ‖E_k‖²` up to `1e-10 (1 + ‖E_k‖²)`.
pub fn check_trace(report: &SolverReport, cfg: &SolverConfig) -> Vec<String> {
    let mut out = Vec::new();
    let trace = &report.trace;
    for tr in trace {
        if !(tr.min_y > 0.0) {
            out.push(format!("k={}: min y = {:e} is not positive", tr.k, tr.min_y));
        }
    }
    match report.solver {
        SolverKind::Inexact => {
            for tr in trace {
                if let Some(g) = tr.feasibility_gap {
                    if !(g < 0.0) {
                        out.push(format!("k={}: f(y) - b reaches {g:e}", tr.k));
                    }
                }
            }
            for w in trace.windows(2) {
                let Some(step) = &w[0].step else { continue };
                let bound = (1.0 - 2.0 * cfg.sigma() * step.alpha).sqrt() * w[0].merit;
                if w[1].merit > bound * (1.0 + SLACK) {
                    out.push(format!(
                        "k={}: merit {:e} exceeds sufficient-decrease bound {bound:e}",
                        w[1].k, w[1].merit
                    ));
                }
            }
        }
        SolverKind::Regularized => {
            let t_bar = cfg.t_bar();
            for tr in trace {
                let (Some(t), Some(beta)) = (tr.t, tr.beta) else {
                    out.push(format!("k={}: missing t or beta", tr.k));
                    continue;
                };
                if !(t > 0.0 && t <= t_bar) {
                    out.push(format!("k={}: t = {t:e} outside (0, t_bar]", tr.k));
                }
                if !(t >= t_bar * beta * (1.0 - SLACK)) {
                    out.push(format!("k={}: t = {t:e} below t_bar*beta = {:e}", tr.k, t_bar * beta));
                }
                if let Some(dir) = tr.step.as_ref().and_then(|s| s.directional_derivative) {
                    let msq = tr.merit * tr.merit;
                    let bound = -(1.0 - cfg.gamma() * t_bar) * msq;
                    if dir > bound + 1e-10 * (1.0 + msq) {
                        out.push(format!(
                            "k={}: directional derivative {dir:e} above {bound:e}",
                            tr.k
                        ));
                    }
                }
            }
            for w in trace.windows(2) {
                if let (Some(t0), Some(t1)) = (w[0].t, w[1].t) {
                    if t1 > t0 {
                        out.push(format!("k={}: t increased from {t0:e} to {t1:e}", w[1].k));
                    }
                }
                if w[1].merit > w[0].merit * (1.0 + SLACK) {
                    out.push(format!(
                        "k={}: merit increased from {:e} to {:e}",
                        w[1].k, w[0].merit, w[1].merit
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_equation;
    use crate::solvers::{solve_inexact_newton, solve_regularized_newton};
    use crate::tensor::DenseTensor;

    #[test]
    fn clean_runs_pass() {
        let eq = make_equation(DenseTensor::identity(3, 2).unwrap(), vec![4.0, 9.0], false).unwrap();
        let cfg = SolverConfig::inexact();
        assert!(check_trace(&solve_inexact_newton(&eq, &cfg).unwrap(), &cfg).is_empty());
        let cfg = SolverConfig::regularized();
        let v = check_trace(&solve_regularized_newton(&eq, &cfg).unwrap(), &cfg);
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn tampered_trace_is_flagged() {
        let eq = make_equation(DenseTensor::identity(3, 2).unwrap(), vec![4.0, 9.0], false).unwrap();
        let cfg = SolverConfig::regularized();
        let mut r = solve_regularized_newton(&eq, &cfg).unwrap();
        r.trace[1].t = Some(1.0);
        r.trace[0].min_y = 0.0;
        assert!(check_trace(&r, &cfg).len() >= 3);
    }
}
