//! Zero-pattern dimensional reduction for right-hand sides with zero components.
//!
//! If `A` is reducible with respect to an index set `I ⊆ {i : b_i = 0}` (every
//! `a_{i i2..im}` with `i ∈ I` and all of `i2..im` outside `I` vanishes), then
//! setting `x_I = 0` and solving the principal subsystem on the complement
//! yields a nonnegative solution of the full equation.

use crate::error::{check_len, MteqError, Result};
use crate::model::{BClass, MTensorEquation};
use crate::tensor::{advance, DenseTensor};

#[derive(Debug, Clone)]
pub struct ReductionResult {
    full_dim: usize,
    zero_set: Vec<usize>,
    support: Vec<usize>,
    reduced: Option<MTensorEquation>,
}

impl ReductionResult {
    /// Indices forced to zero (sorted, 0-based).
    pub fn zero_set(&self) -> &[usize] {
        &self.zero_set
    }

    /// Complement of [`Self::zero_set`], in increasing order; position `k`
    /// of a reduced vector maps to `support()[k]` in the full vector.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// The principal subsystem on the support, re-scaled. `None` when every
    /// index is forced to zero and `x = 0` solves the equation.
    pub fn reduced_equation(&self) -> Option<&MTensorEquation> {
        self.reduced.as_ref()
    }

    pub fn is_trivial(&self) -> bool {
        self.zero_set.is_empty()
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// Places `x_reduced` on the support and zeros on the zero set.
    pub fn embed_solution(&self, x_reduced: &[f64]) -> Result<Vec<f64>> {
        check_len(self.support.len(), x_reduced.len())?;
        let mut x = vec![0.0; self.full_dim];
        for (&i, &v) in self.support.iter().zip(x_reduced) {
            x[i] = v;
        }
        Ok(x)
    }
}

/// Whether some entry in row `i` is nonzero with every trailing index outside
/// the set marked by `in_set`.
fn row_escapes(tensor: &DenseTensor, i: usize, in_set: &[bool]) -> bool {
    let n = tensor.dim();
    let row_len = tensor.len() / n;
    let row = &tensor.entries()[i * row_len..(i + 1) * row_len];
    let mut idx = vec![0usize; tensor.order() - 1];
    for &a in row {
        if a != 0.0 && idx.iter().all(|&j| !in_set[j]) {
            return true;
        }
        advance(&mut idx, n);
    }
    false
}

/// Reducibility of `tensor` with respect to the set marked by `in_set`.
pub fn is_reducible(tensor: &DenseTensor, in_set: &[bool]) -> bool {
    (0..tensor.dim()).all(|i| !in_set[i] || !row_escapes(tensor, i, in_set))
}

/// Finds the largest `I ⊆ {i : b̂_i = 0}` with respect to which `Â` is
/// reducible, by deleting offending indices until nothing changes.
///
/// Deletion is monotone (removing indices only makes other rows more likely
/// to escape), so the fixed point is the unique maximal set.
pub fn reduce_zero_pattern(eq: &MTensorEquation) -> Result<ReductionResult> {
    if eq.b_class() == BClass::Invalid {
        return Err(MteqError::Config(
            "right-hand side has negative components".into(),
        ));
    }
    let n = eq.dim();
    let tensor = eq.tensor();
    let mut in_set: Vec<bool> = eq.rhs().iter().map(|&b| b == 0.0).collect();
    loop {
        let escaping: Vec<usize> = (0..n)
            .filter(|&i| in_set[i] && row_escapes(tensor, i, &in_set))
            .collect();
        if escaping.is_empty() {
            break;
        }
        for i in escaping {
            in_set[i] = false;
        }
    }

    let zero_set: Vec<usize> = (0..n).filter(|&i| in_set[i]).collect();
    let support: Vec<usize> = (0..n).filter(|&i| !in_set[i]).collect();
    let reduced = if zero_set.is_empty() {
        Some(eq.clone())
    } else if support.is_empty() {
        None
    } else {
        let sub = tensor.principal_subtensor(&support)?;
        let rhs = support.iter().map(|&i| eq.rhs()[i]).collect();
        Some(MTensorEquation::new(sub, rhs, false)?)
    };
    Ok(ReductionResult {
        full_dim: n,
        zero_set,
        support,
        reduced,
    })
}
