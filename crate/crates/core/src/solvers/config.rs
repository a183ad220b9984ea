use serde::{Deserialize, Serialize};

use crate::error::{MteqError, Result};

/// How the starting point `x0` is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy")]
pub enum InitialPoint {
    /// `x0 = fraction * eps_max * e`, where `eps_max` is the largest `eps`
    /// with `f((eps e)^[m-1]) < b̂`.
    Feasible { fraction: f64 },
    /// `x0 = eps0 * e`.
    EpsilonE { eps0: f64 },
    /// `x0 = c * e`.
    ConstantE { c: f64 },
    Explicit { x0: Vec<f64> },
}

/// Parameters shared by both solvers; `gamma` and `t_bar` only matter for
/// the regularized method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct SolverConfig {
    sigma: f64,
    rho: f64,
    gamma: f64,
    t_bar: f64,
    tol: f64,
    max_iter: usize,
    initial_point: InitialPoint,
    record_iterates: bool,
}

#[derive(Deserialize)]
struct RawConfig {
    sigma: f64,
    rho: f64,
    gamma: f64,
    t_bar: f64,
    tol: f64,
    max_iter: usize,
    initial_point: InitialPoint,
    #[serde(default)]
    record_iterates: bool,
}

impl TryFrom<RawConfig> for SolverConfig {
    type Error = MteqError;

    fn try_from(r: RawConfig) -> Result<Self> {
        let cfg = SolverConfig {
            sigma: r.sigma,
            rho: r.rho,
            gamma: r.gamma,
            t_bar: r.t_bar,
            tol: r.tol,
            max_iter: r.max_iter,
            initial_point: r.initial_point,
            record_iterates: r.record_iterates,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 300;
/// Fraction of the largest feasible `eps` used by the default inexact start.
pub const DEFAULT_FEASIBLE_FRACTION: f64 = 0.99;

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(MteqError::Config(format!("{name} must lie in (0, 1), got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(MteqError::Config(format!("{name} must be positive, got {v}")))
    }
}

impl SolverConfig {
    /// sigma = 0.1, rho = 0.5, start near the boundary of `f(y0) < b̂`.
    pub fn inexact() -> Self {
        Self {
            sigma: 0.1,
            rho: 0.5,
            gamma: 0.9,
            t_bar: 0.01,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            initial_point: InitialPoint::Feasible {
                fraction: DEFAULT_FEASIBLE_FRACTION,
            },
            record_iterates: false,
        }
    }

    /// sigma = 0.1, rho = 0.8, gamma = 0.9, t_bar = 0.01, `x0 = 0.1 e`.
    pub fn regularized() -> Self {
        Self {
            sigma: 0.1,
            rho: 0.8,
            gamma: 0.9,
            t_bar: 0.01,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            initial_point: InitialPoint::ConstantE { c: 0.1 },
            record_iterates: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        open_unit("sigma", self.sigma)?;
        open_unit("rho", self.rho)?;
        open_unit("gamma", self.gamma)?;
        positive("t_bar", self.t_bar)?;
        if !(self.gamma * self.t_bar < 1.0) {
            return Err(MteqError::Config(format!(
                "gamma * t_bar must be below 1, got {}",
                self.gamma * self.t_bar
            )));
        }
        positive("tol", self.tol)?;
        match &self.initial_point {
            InitialPoint::Feasible { fraction } => {
                if !(*fraction > 0.0 && *fraction <= 1.0) {
                    return Err(MteqError::Config(format!(
                        "fraction must lie in (0, 1], got {fraction}"
                    )));
                }
            }
            InitialPoint::EpsilonE { eps0 } => positive("eps0", *eps0)?,
            InitialPoint::ConstantE { c } => positive("c", *c)?,
            InitialPoint::Explicit { x0 } => {
                if let Some(v) = x0.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                    return Err(MteqError::Config(format!(
                        "explicit start must be positive, found {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn with_line_search(mut self, sigma: f64, rho: f64) -> Result<Self> {
        self.sigma = sigma;
        self.rho = rho;
        self.validated()
    }

    pub fn with_regularization(mut self, gamma: f64, t_bar: f64) -> Result<Self> {
        self.gamma = gamma;
        self.t_bar = t_bar;
        self.validated()
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.tol = tol;
        self.validated()
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_initial_point(mut self, initial_point: InitialPoint) -> Result<Self> {
        self.initial_point = initial_point;
        self.validated()
    }

    /// Keep a copy of every iterate `y_k` in the trace.
    pub fn with_recorded_iterates(mut self, record: bool) -> Self {
        self.record_iterates = record;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn t_bar(&self) -> f64 {
        self.t_bar
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    pub fn initial_point(&self) -> &InitialPoint {
        &self.initial_point
    }

    pub fn record_iterates(&self) -> bool {
        self.record_iterates
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SolverConfig::inexact().validate().unwrap();
        SolverConfig::regularized().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(SolverConfig::inexact().with_line_search(0.0, 0.5).is_err());
        assert!(SolverConfig::inexact().with_line_search(0.1, 1.0).is_err());
        assert!(SolverConfig::regularized().with_regularization(0.9, 2.0).is_err());
        assert!(SolverConfig::regularized().with_regularization(0.5, 1.5).is_ok());
        assert!(SolverConfig::inexact().with_tol(-1.0).is_err());
        assert!(SolverConfig::inexact()
            .with_initial_point(InitialPoint::Explicit { x0: vec![1.0, 0.0] })
            .is_err());
        assert!(SolverConfig::inexact()
            .with_initial_point(InitialPoint::Feasible { fraction: 1.0 })
            .is_ok());
        assert!(SolverConfig::inexact()
            .with_initial_point(InitialPoint::Feasible { fraction: 1.5 })
            .is_err());
    }

    #[test]
    fn deserialization_validates() {
        let mut v = serde_json::to_value(SolverConfig::regularized()).unwrap();
        let back: SolverConfig = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(back, SolverConfig::regularized());
        v["t_bar"] = serde_json::json!(5.0);
        assert!(serde_json::from_value::<SolverConfig>(v).is_err());
    }
}
