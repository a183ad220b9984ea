//! Runtime checks on seeded instances: algebraic identities of the
//! transformed maps, M-matrix certificates of the Newton matrices, solver
//! trace invariants and solution certificates.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::maps::{power, reg_block_from, PointEval};
use crate::model::{BClass, MTensorEquation};
use crate::problems::{generate, ProblemSpec, RngStream};
use crate::solvers::{certify_solution, check_trace, solve, SolverConfig, SolverKind};

/// Relative tolerance for the identity checks.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Stream offset keeping sample points independent of instance streams.
const POINT_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    /// Largest relative error seen, for the numeric checks.
    pub worst: f64,
    pub first_failure: Option<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            samples: 0,
            failures: 0,
            worst: 0.0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(detail());
            }
        }
    }

    fn record_error(&mut self, err: f64, tol: f64, ctx: &str) {
        self.worst = self.worst.max(err);
        self.record(err <= tol, || format!("{ctx}: relative error {err:e}"));
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

/// `‖a - b‖∞ / ‖b‖∞` (absolute when `b = 0`).
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

struct Checks {
    jac_identity: CheckResult,
    newton_identity: CheckResult,
    newton_m_matrix: CheckResult,
    reg_m_matrix: CheckResult,
    traces: CheckResult,
    converged_residual: CheckResult,
    certificate: CheckResult,
}

fn check_point(eq: &MTensorEquation, y: &[f64], t: f64, c: &mut Checks, ctx: &str) -> Result<()> {
    let p = PointEval::new(eq, y)?;
    let f_plus_b: Vec<f64> = p.f.iter().zip(eq.rhs()).map(|(f, b)| f + b).collect();
    c.jac_identity
        .record_error(relative_error(&p.jac_f(eq)?.matvec(y)?, &f_plus_b), IDENTITY_TOL, ctx);
    let m = p.newton_matrix(eq)?;
    c.newton_identity
        .record_error(relative_error(&m.matvec(y)?, eq.rhs()), IDENTITY_TOL, ctx);
    if eq.b_class() == BClass::StrictlyPositive {
        let ok = m.m_matrix_certificate(y)?;
        c.newton_m_matrix.record(ok, || ctx.to_string());
    }
    let ok = reg_block_from(eq, &p, t)?.m_matrix_certificate(y)?;
    c.reg_m_matrix.record(ok, || ctx.to_string());
    Ok(())
}

/// Runs every check on `trials` instances of `spec`, with `points` random
/// positive sample points per instance and both applicable solvers.
pub fn verify_instances(spec: &ProblemSpec, trials: usize, seed: u64, points: usize) -> Result<VerifyReport> {
    let mut c = Checks {
        jac_identity: CheckResult::new("jacobian identity f'(y) y = f(y) + b"),
        newton_identity: CheckResult::new("newton matrix identity M(y) y = b"),
        newton_m_matrix: CheckResult::new("newton matrix is an M-matrix (b > 0)"),
        reg_m_matrix: CheckResult::new("regularized block is an M-matrix (t > 0)"),
        traces: CheckResult::new("solver trace invariants"),
        converged_residual: CheckResult::new("converged residual within tolerance"),
        certificate: CheckResult::new("solution certificate"),
    };
    for trial in 0..trials {
        let eq = generate(spec, seed, trial as u64)?;
        let mut rng = RngStream::new(seed, POINT_STREAM + trial as u64);
        for k in 0..points {
            let x: Vec<f64> = (0..eq.dim()).map(|_| 0.1 + 2.0 * rng.uniform()).collect();
            let t = 1e-3 + rng.uniform();
            check_point(&eq, &power(&x, eq.order()), t, &mut c, &format!("trial {trial} point {k}"))?;
        }
        let kinds: &[SolverKind] = if eq.b_class() == BClass::StrictlyPositive {
            &[SolverKind::Inexact, SolverKind::Regularized]
        } else {
            &[SolverKind::Regularized]
        };
        for &kind in kinds {
            let cfg = match kind {
                SolverKind::Inexact => SolverConfig::inexact(),
                SolverKind::Regularized => SolverConfig::regularized(),
            };
            let report = solve(kind, &eq, &cfg)?;
            let ctx = format!("trial {trial} {kind}");
            let violations = check_trace(&report, &cfg);
            c.traces.record(violations.is_empty(), || {
                format!("{ctx}: {}", violations.first().cloned().unwrap_or_default())
            });
            if report.converged() {
                let r = report.final_residual();
                c.converged_residual
                    .record(r <= cfg.tol(), || format!("{ctx}: residual {r:e}"));
                let cert = certify_solution(&eq, &report.x);
                c.certificate.record(cert.certified, || {
                    format!("{ctx}: {}", cert.reason.clone().unwrap_or_default())
                });
            }
        }
    }
    Ok(VerifyReport {
        checks: vec![
            c.jac_identity,
            c.newton_identity,
            c.newton_m_matrix,
            c.reg_m_matrix,
            c.traces,
            c.converged_residual,
            c.certificate,
        ],
    })
}
