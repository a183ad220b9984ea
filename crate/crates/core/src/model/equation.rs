use serde::{Deserialize, Serialize};

use crate::error::{check_len, MteqError, Result};
use crate::tensor::DenseTensor;

/// Sign pattern of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BClass {
    StrictlyPositive,
    NonnegativeWithZeros,
    /// Some component is negative; no nonnegative solution exists.
    Invalid,
}

impl BClass {
    pub fn of(b: &[f64]) -> Self {
        if b.iter().any(|&v| !(v >= 0.0)) {
            BClass::Invalid
        } else if b.contains(&0.0) {
            BClass::NonnegativeWithZeros
        } else {
            BClass::StrictlyPositive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BClass::StrictlyPositive => "strictly-positive",
            BClass::NonnegativeWithZeros => "nonnegative-with-zeros",
            BClass::Invalid => "invalid",
        }
    }
}

impl std::str::FromStr for BClass {
    type Err = MteqError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strictly-positive" => Ok(BClass::StrictlyPositive),
            "nonnegative-with-zeros" => Ok(BClass::NonnegativeWithZeros),
            "invalid" => Ok(BClass::Invalid),
            other => Err(MteqError::Config(format!("unknown b class `{other}`"))),
        }
    }
}

/// A tensor equation `A x^{m-1} = b`, stored scaled by `omega` so that the
/// largest absolute entry of `(Â, b̂)` is one.
///
/// Scaling does not move roots, so a solution of the stored equation solves
/// the original one.
#[derive(Debug, Clone, PartialEq)]
pub struct MTensorEquation {
    tensor: DenseTensor,
    rhs: Vec<f64>,
    omega: f64,
    b_class: BClass,
}

impl MTensorEquation {
    /// Builds the scaled equation from the original data, semi-symmetrizing
    /// `a` first when requested.
    ///
    /// The solvers' Jacobian formulas assume a semi-symmetric tensor; pass
    /// `symmetrize = false` only for tensors that already are.
    pub fn new(a: DenseTensor, b: Vec<f64>, symmetrize: bool) -> Result<Self> {
        check_len(a.dim(), b.len())?;
        if let Some(pos) = b.iter().position(|v| !v.is_finite()) {
            return Err(MteqError::NonFinite(pos));
        }
        let a = if symmetrize { a.semi_symmetrize()? } else { a };
        let largest = b.iter().fold(a.max_abs(), |m, v| m.max(v.abs()));
        let omega = if largest > 0.0 { largest } else { 1.0 };
        let inv = omega.recip();
        let rhs: Vec<f64> = b.iter().map(|v| v * inv).collect();
        Ok(Self {
            tensor: a.scaled(inv),
            b_class: BClass::of(&rhs),
            rhs,
            omega,
        })
    }

    /// Wraps data that is already scaled, e.g. read back from an instance file.
    pub fn from_scaled(tensor: DenseTensor, rhs: Vec<f64>, omega: f64) -> Result<Self> {
        check_len(tensor.dim(), rhs.len())?;
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(MteqError::Config(format!("scaling factor must be positive, got {omega}")));
        }
        if let Some(pos) = rhs.iter().position(|v| !v.is_finite()) {
            return Err(MteqError::NonFinite(pos));
        }
        Ok(Self {
            b_class: BClass::of(&rhs),
            tensor,
            rhs,
            omega,
        })
    }

    /// The scaled tensor `Â = A / omega`.
    pub fn tensor(&self) -> &DenseTensor {
        &self.tensor
    }

    /// The scaled right-hand side `b̂ = b / omega`.
    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn b_class(&self) -> BClass {
        self.b_class
    }

    pub fn order(&self) -> usize {
        self.tensor.order()
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn original_tensor(&self) -> DenseTensor {
        self.tensor.scaled(self.omega)
    }

    pub fn original_rhs(&self) -> Vec<f64> {
        self.rhs.iter().map(|v| v * self.omega).collect()
    }
}

/// Convenience alias for [`MTensorEquation::new`].
pub fn make_equation(a: DenseTensor, b: Vec<f64>, symmetrize: bool) -> Result<MTensorEquation> {
    MTensorEquation::new(a, b, symmetrize)
}
