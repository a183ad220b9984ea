//! The residual map and its transformed forms on the positive orthant.
//!
//! With `y = x^[m-1]` the equation becomes `f(y) = Â (y^[1/(m-1)])^{m-1} - b̂ = 0`.
//! Dividing componentwise by `y` gives `E(y) = f(y) / y`, whose Jacobian
//! `diag(1/y) (f'(y) - diag(f(y)/y))` is an M-matrix for every `y > 0` when
//! `b̂ > 0`. The regularized system appends a scalar `t` and adds `t y`.

use crate::error::{check_len, MteqError, Result};
use crate::linalg::DenseMatrix;
use crate::model::MTensorEquation;

/// Components of `y` at or below this value are treated as outside the domain.
pub const MIN_POSITIVE: f64 = 1e-300;

/// Checks `y_i > MIN_POSITIVE` for every component.
pub fn check_positive(y: &[f64]) -> Result<()> {
    match y
        .iter()
        .enumerate()
        .find(|(_, &v)| !(v > MIN_POSITIVE && v.is_finite()))
    {
        Some((index, &value)) => Err(MteqError::Domain {
            index: index + 1,
            value,
        }),
        None => Ok(()),
    }
}

/// `y^[1/(m-1)]`, computed as `exp(ln(y) / (m-1))`.
pub fn root(y: &[f64], order: usize) -> Result<Vec<f64>> {
    check_positive(y)?;
    let inv = 1.0 / (order - 1) as f64;
    Ok(y.iter().map(|v| (v.ln() * inv).exp()).collect())
}

/// `x^[m-1]`, the inverse of [`root`].
pub fn power(x: &[f64], order: usize) -> Vec<f64> {
    let p = (order - 1) as i32;
    x.iter().map(|v| v.powi(p)).collect()
}

/// `F̂(x) = Â x^{m-1} - b̂`.
pub fn residual(eq: &MTensorEquation, x: &[f64]) -> Result<Vec<f64>> {
    let mut r = eq.tensor().apply_vec(x)?;
    for (ri, bi) in r.iter_mut().zip(eq.rhs()) {
        *ri -= bi;
    }
    Ok(r)
}

/// A point `y > 0` together with `x = y^[1/(m-1)]` and `f(y)`.
#[derive(Debug, Clone)]
pub struct PointEval {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

impl PointEval {
    pub fn new(eq: &MTensorEquation, y: &[f64]) -> Result<Self> {
        check_len(eq.dim(), y.len())?;
        let x = root(y, eq.order())?;
        let f = residual(eq, &x)?;
        Ok(Self {
            y: y.to_vec(),
            x,
            f,
        })
    }

    /// `E(y) = f(y) / y`.
    pub fn e(&self) -> Vec<f64> {
        self.f.iter().zip(&self.y).map(|(f, y)| f / y).collect()
    }

    /// `f'(y) = Â x^{m-2} diag(x / y)`.
    pub fn jac_f(&self, eq: &MTensorEquation) -> Result<DenseMatrix> {
        let mut j = eq.tensor().apply_mat(&self.x)?;
        let right: Vec<f64> = self.x.iter().zip(&self.y).map(|(x, y)| x / y).collect();
        j.scale(None, Some(&right));
        Ok(j)
    }

    /// `f'(y) - diag(f(y) / y)`.
    ///
    /// The diagonal is formed as `(b̂_i - Σ_{j≠i} M_ij y_j) / y_i`, which is the
    /// same quantity but keeps `M(y) y = b̂` accurate when `Â x^{m-1}` is much
    /// larger than `b̂`.
    pub fn newton_matrix(&self, eq: &MTensorEquation) -> Result<DenseMatrix> {
        let mut m = self.jac_f(eq)?;
        let n = self.y.len();
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)] * self.y[j]).sum();
            m[(i, i)] = (eq.rhs()[i] - off) / self.y[i];
        }
        Ok(m)
    }

    /// `E'(y) = diag(1/y) (f'(y) - diag(f(y)/y))`.
    pub fn jac_e(&self, eq: &MTensorEquation) -> Result<DenseMatrix> {
        let mut m = self.newton_matrix(eq)?;
        let inv: Vec<f64> = self.y.iter().map(|v| v.recip()).collect();
        m.scale(Some(&inv), None);
        Ok(m)
    }
}

pub fn map_f(eq: &MTensorEquation, y: &[f64]) -> Result<Vec<f64>> {
    Ok(PointEval::new(eq, y)?.f)
}

pub fn jac_f(eq: &MTensorEquation, y: &[f64]) -> Result<DenseMatrix> {
    PointEval::new(eq, y)?.jac_f(eq)
}

pub fn map_e(eq: &MTensorEquation, y: &[f64]) -> Result<Vec<f64>> {
    Ok(PointEval::new(eq, y)?.e())
}

pub fn jac_e(eq: &MTensorEquation, y: &[f64]) -> Result<DenseMatrix> {
    PointEval::new(eq, y)?.jac_e(eq)
}

/// The Newton subproblem matrix `M(y) = f'(y) - diag(f(y)/y)`; it satisfies
/// `M(y) y = b̂`.
pub fn newton_matrix(eq: &MTensorEquation, y: &[f64]) -> Result<DenseMatrix> {
    PointEval::new(eq, y)?.newton_matrix(eq)
}

/// `min { b̂_i / f_i : f_i > 0 }`, or `+inf` when no component of `f` is positive.
pub fn max_step_from(rhs: &[f64], f: &[f64]) -> f64 {
    rhs.iter()
        .zip(f)
        .filter(|(_, &fi)| fi > 0.0)
        .map(|(b, fi)| b / fi)
        .fold(f64::INFINITY, f64::min)
}

/// Largest step such that `b̂ - α f(y) > 0` for all `α` below it.
pub fn max_step(eq: &MTensorEquation, y: &[f64]) -> Result<f64> {
    Ok(max_step_from(eq.rhs(), &map_f(eq, y)?))
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(MteqError::Domain { index: 0, value: t })
    }
}

/// `E(t, y) = (t, E(y) + t y)`, of length `n + 1`.
pub fn reg_map_e(eq: &MTensorEquation, t: f64, y: &[f64]) -> Result<Vec<f64>> {
    check_t(t)?;
    let p = PointEval::new(eq, y)?;
    Ok(reg_map_from(&p, t))
}

pub(crate) fn reg_map_from(p: &PointEval, t: f64) -> Vec<f64> {
    std::iter::once(t)
        .chain(p.f.iter().zip(&p.y).map(|(f, y)| f / y + t * y))
        .collect()
}

/// The lower-right block `E'(y) + t I` of the regularized Jacobian.
pub fn reg_block(eq: &MTensorEquation, t: f64, y: &[f64]) -> Result<DenseMatrix> {
    check_t(t)?;
    reg_block_from(eq, &PointEval::new(eq, y)?, t)
}

pub(crate) fn reg_block_from(eq: &MTensorEquation, p: &PointEval, t: f64) -> Result<DenseMatrix> {
    let mut m = p.jac_e(eq)?;
    m.add_diag(&vec![t; p.y.len()]);
    Ok(m)
}

/// Full `(n+1) x (n+1)` Jacobian of `E(t, y)`: `[[1, 0], [y, E'(y) + t I]]`.
pub fn reg_jacobian(eq: &MTensorEquation, t: f64, y: &[f64]) -> Result<DenseMatrix> {
    let block = reg_block(eq, t, y)?;
    let n = y.len();
    let mut j = DenseMatrix::zeros(n + 1);
    j[(0, 0)] = 1.0;
    for i in 0..n {
        j[(i + 1, 0)] = y[i];
        for k in 0..n {
            j[(i + 1, k + 1)] = block[(i, k)];
        }
    }
    Ok(j)
}
