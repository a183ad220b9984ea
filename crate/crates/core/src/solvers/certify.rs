use serde::{Deserialize, Serialize};

use crate::linalg::{norm2, DenseMatrix};
use crate::model::maps::residual;
use crate::model::MTensorEquation;

/// Whether `x` is a nonnegative approximate solution at which the Jacobian
/// of `F̂`, restricted to the support of `x`, is a nonsingular M-matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub certified: bool,
    /// `‖F̂(x)‖`, or `inf` when it could not be evaluated.
    pub residual: f64,
    pub reason: Option<String>,
}

impl Certificate {
    fn fail(residual: f64, reason: impl Into<String>) -> Self {
        Self {
            certified: false,
            residual,
            reason: Some(reason.into()),
        }
    }
}

/// Checks `F̂'(x) = (m-1) Â x^{m-2}` on the support of `x`: a Z-matrix with
/// a positive `v` with `F̂'(x)_S v > 0` is a nonsingular M-matrix.
pub fn certify_solution(eq: &MTensorEquation, x: &[f64]) -> Certificate {
    let r = match residual(eq, x) {
        Ok(r) => norm2(&r),
        Err(e) => return Certificate::fail(f64::INFINITY, e.to_string()),
    };
    if let Some(i) = x.iter().position(|v| !(*v >= 0.0)) {
        return Certificate::fail(r, format!("component {} is negative", i + 1));
    }
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
    if support.is_empty() {
        return Certificate::fail(r, "empty support");
    }
    let j = match eq.tensor().apply_mat(x) {
        Ok(j) => j,
        Err(e) => return Certificate::fail(r, e.to_string()),
    };
    let scale = (eq.order() - 1) as f64;
    let k = support.len();
    let mut sub = DenseMatrix::zeros(k);
    for (a, &i) in support.iter().enumerate() {
        for (b, &l) in support.iter().enumerate() {
            sub[(a, b)] = scale * j[(i, l)];
        }
    }
    if !sub.is_z_matrix() {
        return Certificate::fail(r, "Jacobian on the support is not a Z-matrix");
    }
    // v = x works when b̂ > 0 on the support, since F'(x) x = (m-1) b̂ there.
    // Otherwise fall back to v = F'(x)_S^{-1} e, which is positive exactly
    // when the Z-matrix is a nonsingular M-matrix.
    let xs: Vec<f64> = support.iter().map(|&i| x[i]).collect();
    if matches!(sub.m_matrix_certificate(&xs), Ok(true)) {
        return Certificate {
            certified: true,
            residual: r,
            reason: None,
        };
    }
    let certified = sub
        .lu_solve(&vec![1.0; k])
        .is_ok_and(|v| v.iter().all(|&c| c > 0.0) && matches!(sub.m_matrix_certificate(&v), Ok(true)));
    if certified {
        Certificate {
            certified: true,
            residual: r,
            reason: None,
        }
    } else {
        Certificate::fail(r, "Jacobian on the support is not a nonsingular M-matrix")
    }
}
