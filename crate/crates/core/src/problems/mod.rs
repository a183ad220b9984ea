//! Seeded generators for the five benchmark families.
//!
//! | id | tensor | right-hand side |
//! |----|--------|-----------------|
//! | 1 | `sI - B`, `B` symmetric U(0,1), `s = 1.01 max(Be^{m-1})` | U(0,1) |
//! | 2 | `n^{m-1} I - B`, `B = |sin(i1 + ... + im)|` | U(0,1) |
//! | 3 | order-4 two-point boundary problem | `GM/(n-1)^2`, ends `c0^3`, `c1^3` |
//! | 4 | `sI - B`, `B` nonsymmetric U(0,1), `s = 1.01 max(Be^{m-1})` | U(0,1) |
//! | 5 | `sI - B`, `B` strictly lower triangular, `s = 0.5 max(Be^{m-1})` | U(0,1) |
//!
//! In [`BMode::Zeros`] the right-hand side is thresholded instead (entries
//! drawn above 0.6 become 0), with `b_1 = 0.1` for problem 5.

mod rng;

pub use rng::RngStream;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MteqError, Result};
use crate::model::MTensorEquation;
use crate::tensor::{checked_pow, DenseTensor};

/// Largest tensor (`n^m` entries) the generators will build.
pub const MAX_ENTRIES: u128 = 100_000_000;
/// Draws above this are zeroed by [`gen_b_with_zeros`].
pub const ZERO_THRESHOLD: f64 = 0.6;
/// Gravitational constant times the mass of the earth.
pub const GM: f64 = 6.67e-11 * 5.98e24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Problem {
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl Problem {
    pub const ALL: [Problem; 5] = [Problem::P1, Problem::P2, Problem::P3, Problem::P4, Problem::P5];

    pub fn id(self) -> u8 {
        self as u8 + 1
    }
}

impl TryFrom<u8> for Problem {
    type Error = MteqError;

    fn try_from(id: u8) -> Result<Self> {
        Problem::ALL
            .get(usize::from(id).wrapping_sub(1))
            .copied()
            .ok_or_else(|| MteqError::Config(format!("problem must be 1..=5, got {id}")))
    }
}

impl From<Problem> for u8 {
    fn from(p: Problem) -> u8 {
        p.id()
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

impl FromStr for Problem {
    type Err = MteqError;

    fn from_str(s: &str) -> Result<Self> {
        let id: u8 = s
            .trim()
            .parse()
            .map_err(|_| MteqError::Config(format!("problem must be 1..=5, got {s:?}")))?;
        Problem::try_from(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BMode {
    /// Entries U(0, 1).
    #[default]
    Positive,
    /// Entries U(0, 1), with draws above 0.6 set to zero.
    Zeros,
}

impl BMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BMode::Positive => "positive",
            BMode::Zeros => "zeros",
        }
    }
}

impl fmt::Display for BMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BMode {
    type Err = MteqError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(BMode::Positive),
            "zeros" => Ok(BMode::Zeros),
            _ => Err(MteqError::Config(format!(
                "b mode must be positive or zeros, got {s:?}"
            ))),
        }
    }
}

/// Everything that determines an instance apart from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub problem: Problem,
    pub order: usize,
    pub dim: usize,
    pub b_mode: BMode,
    /// Boundary values of problem 3.
    pub c0: f64,
    pub c1: f64,
}

impl ProblemSpec {
    pub fn new(problem: Problem, order: usize, dim: usize) -> Self {
        Self {
            problem,
            order,
            dim,
            b_mode: BMode::Positive,
            c0: 1.0,
            c1: 1.0,
        }
    }

    pub fn with_b_mode(mut self, b_mode: BMode) -> Self {
        self.b_mode = b_mode;
        self
    }

    pub fn with_boundary(mut self, c0: f64, c1: f64) -> Self {
        self.c0 = c0;
        self.c1 = c1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(MteqError::Config(format!("order must be at least 2, got {}", self.order)));
        }
        if self.dim < 2 {
            return Err(MteqError::Config(format!("dimension must be at least 2, got {}", self.dim)));
        }
        size_guard(self.order, self.dim)?;
        if self.problem == Problem::P3 {
            if self.order != 4 {
                return Err(MteqError::Config(format!(
                    "problem 3 has order 4, got {}",
                    self.order
                )));
            }
            if self.dim < 3 {
                return Err(MteqError::Config(format!(
                    "problem 3 needs dimension at least 3, got {}",
                    self.dim
                )));
            }
            if self.b_mode == BMode::Zeros {
                return Err(MteqError::Config(
                    "problem 3 has a fixed right-hand side; b mode zeros does not apply".into(),
                ));
            }
            if !(self.c0.is_finite() && self.c1.is_finite() && self.c0 >= 0.0 && self.c1 >= 0.0) {
                return Err(MteqError::Config(format!(
                    "boundary values must be nonnegative, got c0={} c1={}",
                    self.c0, self.c1
                )));
            }
        }
        Ok(())
    }
}

/// Rejects shapes with more than [`MAX_ENTRIES`] entries.
pub fn size_guard(order: usize, dim: usize) -> Result<()> {
    let entries = (dim as u128).checked_pow(order as u32).unwrap_or(u128::MAX);
    if entries > MAX_ENTRIES || checked_pow(dim, order).is_none() {
        return Err(MteqError::SizeGuard {
            entries,
            limit: MAX_ENTRIES,
        });
    }
    Ok(())
}

/// `sI - B` with `s = factor * max_i (B e^{m-1})_i`.
pub fn strong_m_from(b: &DenseTensor, factor: f64) -> Result<DenseTensor> {
    let s = factor * b.row_sum_bound()?;
    Ok(b.shifted_identity_minus(s))
}

fn uniform_tensor(m: usize, n: usize, rng: &mut RngStream) -> Result<DenseTensor> {
    size_guard(m, n)?;
    DenseTensor::from_fn(m, n, |_| rng.uniform())
}

/// Problem 1 tensor: symmetric U(0,1) `B` (averaged over all index
/// permutations), `s = 1.01 max(B e^{m-1})`.
pub fn problem1_tensor(m: usize, n: usize, rng: &mut RngStream) -> Result<DenseTensor> {
    let b = uniform_tensor(m, n, rng)?.symmetrize()?;
    Ok(strong_m_from(&b, 1.01)?.with_symmetry(crate::tensor::Symmetry::Symmetric))
}

/// Problem 2 tensor: `B = |sin(i1 + ... + im)|` (1-based), `s = n^{m-1}`.
pub fn problem2_tensor(m: usize, n: usize) -> Result<DenseTensor> {
    size_guard(m, n)?;
    let b = DenseTensor::from_fn(m, n, |idx| {
        let sum: usize = idx.iter().map(|i| i + 1).sum();
        (sum as f64).sin().abs()
    })?;
    let s = (n as f64).powi(m as i32 - 1);
    Ok(b.shifted_identity_minus(s).with_symmetry(crate::tensor::Symmetry::Symmetric))
}

/// Problem 3 tensor (order 4): `a_{1111} = a_{nnnn} = 1`, and for interior
/// rows `a_{iiii} = 2` with `-1/3` on every placement of a neighbour
/// `i ± 1` among the trailing indices.
pub fn problem3_tensor(n: usize) -> Result<DenseTensor> {
    if n < 3 {
        return Err(MteqError::Config(format!(
            "problem 3 needs dimension at least 3, got {n}"
        )));
    }
    let mut a = DenseTensor::zeros(4, n)?;
    a.set(&[0, 0, 0, 0], 1.0);
    a.set(&[n - 1; 4], 1.0);
    for i in 1..n - 1 {
        a.set(&[i; 4], 2.0);
        for j in [i - 1, i + 1] {
            a.set(&[i, j, i, i], -1.0 / 3.0);
            a.set(&[i, i, j, i], -1.0 / 3.0);
            a.set(&[i, i, i, j], -1.0 / 3.0);
        }
    }
    Ok(a.with_symmetry(crate::tensor::Symmetry::SemiSymmetric))
}

/// Problem 3 right-hand side: `GM / (n-1)^2` inside, `c0^3` and `c1^3` at the ends.
pub fn problem3_rhs(n: usize, c0: f64, c1: f64) -> Vec<f64> {
    let h2 = ((n - 1) * (n - 1)) as f64;
    let mut b = vec![GM / h2; n];
    b[0] = c0.powi(3);
    b[n - 1] = c1.powi(3);
    b
}

/// Problem 4 tensor: nonsymmetric U(0,1) `B`, `s = 1.01 max(B e^{m-1})`,
/// not yet semi-symmetrized.
pub fn problem4_tensor(m: usize, n: usize, rng: &mut RngStream) -> Result<DenseTensor> {
    strong_m_from(&uniform_tensor(m, n, rng)?, 1.01)
}

/// Problem 5 tensor: U(0,1) `B` kept only where every trailing index is
/// below the first, `s = 0.5 max(B e^{m-1})`, not yet semi-symmetrized.
pub fn problem5_tensor(m: usize, n: usize, rng: &mut RngStream) -> Result<DenseTensor> {
    size_guard(m, n)?;
    let b = DenseTensor::from_fn(m, n, |idx| {
        let u = rng.uniform();
        if idx[1..].iter().all(|&j| j < idx[0]) {
            u
        } else {
            0.0
        }
    })?;
    strong_m_from(&b, 0.5)
}

/// Draws `b0 ~ U(0,1)^n` and zeros every entry above 0.6.
pub fn gen_b_with_zeros(n: usize, rng: &mut RngStream) -> Vec<f64> {
    threshold_zeros(rng.uniform_vec(n))
}

pub fn threshold_zeros(mut b0: Vec<f64>) -> Vec<f64> {
    for v in &mut b0 {
        if *v > ZERO_THRESHOLD {
            *v = 0.0;
        }
    }
    b0
}

pub fn gen_problem1(m: usize, n: usize, rng: &mut RngStream) -> Result<MTensorEquation> {
    let a = problem1_tensor(m, n, rng)?;
    MTensorEquation::new(a, rng.uniform_vec(n), false)
}

pub fn gen_problem2(m: usize, n: usize, rng: &mut RngStream) -> Result<MTensorEquation> {
    MTensorEquation::new(problem2_tensor(m, n)?, rng.uniform_vec(n), false)
}

pub fn gen_problem3(n: usize, c0: f64, c1: f64) -> Result<MTensorEquation> {
    MTensorEquation::new(problem3_tensor(n)?, problem3_rhs(n, c0, c1), false)
}

pub fn gen_problem4(m: usize, n: usize, rng: &mut RngStream) -> Result<MTensorEquation> {
    let a = problem4_tensor(m, n, rng)?;
    MTensorEquation::new(a, rng.uniform_vec(n), true)
}

pub fn gen_problem5(m: usize, n: usize, rng: &mut RngStream) -> Result<MTensorEquation> {
    let a = problem5_tensor(m, n, rng)?;
    MTensorEquation::new(a, rng.uniform_vec(n), true)
}

/// Instance for trial `trial` of a run seeded with `seed`.
///
/// The tensor is drawn first, then the right-hand side, both from stream
/// `trial`.
pub fn generate(spec: &ProblemSpec, seed: u64, trial: u64) -> Result<MTensorEquation> {
    spec.validate()?;
    let (m, n) = (spec.order, spec.dim);
    let mut rng = RngStream::new(seed, trial);
    let (a, symmetrize) = match spec.problem {
        Problem::P1 => (problem1_tensor(m, n, &mut rng)?, false),
        Problem::P2 => (problem2_tensor(m, n)?, false),
        Problem::P3 => {
            return MTensorEquation::new(problem3_tensor(n)?, problem3_rhs(n, spec.c0, spec.c1), false)
        }
        Problem::P4 => (problem4_tensor(m, n, &mut rng)?, true),
        Problem::P5 => (problem5_tensor(m, n, &mut rng)?, true),
    };
    let b = match spec.b_mode {
        BMode::Positive => rng.uniform_vec(n),
        BMode::Zeros => {
            let mut b = gen_b_with_zeros(n, &mut rng);
            if spec.problem == Problem::P5 {
                b[0] = 0.1;
            }
            b
        }
    };
    MTensorEquation::new(a, b, symmetrize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn off_diagonal_nonpositive(a: &DenseTensor) -> bool {
        let n = a.dim();
        let mut idx = vec![0usize; a.order()];
        a.entries().iter().all(|&v| {
            let diag = idx.iter().all(|&i| i == idx[0]);
            crate::tensor::advance(&mut idx, n);
            if diag {
                v > 0.0
            } else {
                v <= 0.0
            }
        })
    }

    #[test]
    fn all_ones_shift() {
        let b = DenseTensor::from_fn(3, 2, |_| 1.0).unwrap();
        let a = strong_m_from(&b, 1.01).unwrap();
        assert_relative_eq!(a.get(&[0, 0, 0]), 4.04 - 1.0, epsilon = 1e-14);
        assert_eq!(a.get(&[0, 1, 0]), -1.0);
    }

    #[test]
    fn problem1_properties() {
        let a = problem1_tensor(3, 4, &mut RngStream::new(1, 0)).unwrap();
        assert!(off_diagonal_nonpositive(&a));
        assert!(a.is_symmetric(1e-15));
        let e1 = gen_problem1(3, 4, &mut RngStream::new(1, 0)).unwrap();
        let e2 = gen_problem1(3, 4, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(e1.tensor().entries(), e2.tensor().entries());
        assert_eq!(e1.rhs(), e2.rhs());
        assert_eq!(e1.b_class(), crate::BClass::StrictlyPositive);
    }

    #[test]
    fn problem2_entries() {
        let a = problem2_tensor(3, 2).unwrap();
        assert_relative_eq!(a.get(&[0, 0, 0]), 4.0 - 3f64.sin().abs(), epsilon = 1e-15);
        assert_relative_eq!(3f64.sin().abs(), 0.1411200, epsilon = 1e-7);
        let v = a.get(&[0, 1, 1]);
        assert_eq!(a.get(&[1, 0, 1]), v);
        assert_eq!(a.get(&[1, 1, 0]), v);
        assert!(a.is_symmetric(0.0));
        assert!(off_diagonal_nonpositive(&a));
        assert_eq!((50f64).powi(3), 125000.0);
    }

    #[test]
    fn problem3_entries() {
        let a = problem3_tensor(3).unwrap();
        let third = -1.0 / 3.0;
        let mut nonzero = Vec::new();
        let mut idx = vec![0usize; 4];
        for &v in a.entries() {
            if idx[0] == 1 && v != 0.0 {
                nonzero.push((idx.clone(), v));
            }
            crate::tensor::advance(&mut idx, 3);
        }
        assert_eq!(nonzero.len(), 7);
        assert_eq!(a.get(&[1, 1, 1, 1]), 2.0);
        for idx in [[1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0], [1, 2, 1, 1], [1, 1, 2, 1], [1, 1, 1, 2]] {
            assert_eq!(a.get(&idx), third);
        }
        let r = a.apply_vec(&[1.0; 3]).unwrap();
        assert_eq!((r[0], r[2]), (1.0, 1.0));
        assert!(r[1].abs() < 1e-15);
        let b = problem3_rhs(3, 1.0, 1.0);
        assert_relative_eq!(GM, 3.98866e14, max_relative = 1e-6);
        assert_relative_eq!(b[1], GM / 4.0);
        assert_eq!((b[0], b[2]), (1.0, 1.0));
        assert!(problem3_tensor(2).is_err());
    }

    #[test]
    fn problem4_semi_symmetrization() {
        let a = problem4_tensor(3, 4, &mut RngStream::new(5, 2)).unwrap();
        assert!(!a.is_semi_symmetric(1e-12));
        let s = a.semi_symmetrize().unwrap();
        assert!(s.is_semi_symmetric(1e-15));
        let x = [0.3, 0.7, 1.1, 0.2];
        for (u, v) in a.apply_vec(&x).unwrap().iter().zip(s.apply_vec(&x).unwrap()) {
            assert_relative_eq!(*u, v, max_relative = 1e-13);
        }
        assert!(off_diagonal_nonpositive(&a));
    }

    #[test]
    fn problem5_first_row() {
        let a = problem5_tensor(3, 4, &mut RngStream::new(9, 0)).unwrap();
        let row_len = 16;
        let s = a.get(&[0, 0, 0]);
        assert!(s > 0.0);
        assert!(a.entries()[1..row_len].iter().all(|&v| v == 0.0));
        assert!(off_diagonal_nonpositive(&a));
    }

    #[test]
    fn threshold_rule() {
        assert_eq!(threshold_zeros(vec![0.5, 0.7, 0.61]), vec![0.5, 0.0, 0.0]);
        assert_eq!(threshold_zeros(vec![0.1, 0.6]), vec![0.1, 0.6]);
    }

    #[test]
    fn problem5_zero_mode_sets_first_entry() {
        let spec = ProblemSpec::new(Problem::P5, 3, 6).with_b_mode(BMode::Zeros);
        let eq = generate(&spec, 3, 0).unwrap();
        assert_relative_eq!(eq.original_rhs()[0], 0.1, max_relative = 1e-14);
        assert!(eq.tensor().is_semi_symmetric(1e-15));
    }

    #[test]
    fn size_guard_rejects_huge() {
        assert!(size_guard(5, 40).is_err());
        assert!(size_guard(4, 100).is_ok());
        let spec = ProblemSpec::new(Problem::P1, 6, 30);
        assert!(matches!(generate(&spec, 0, 0), Err(MteqError::SizeGuard { .. })));
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::new(Problem::P3, 3, 10).validate().is_err());
        assert!(ProblemSpec::new(Problem::P3, 4, 10).with_b_mode(BMode::Zeros).validate().is_err());
        assert!(ProblemSpec::new(Problem::P1, 3, 1).validate().is_err());
        assert!("6".parse::<Problem>().is_err());
        assert_eq!("2".parse::<Problem>().unwrap(), Problem::P2);
    }

    #[test]
    fn trials_are_independent_streams() {
        let spec = ProblemSpec::new(Problem::P1, 3, 5);
        let a = generate(&spec, 11, 0).unwrap();
        let b = generate(&spec, 11, 1).unwrap();
        assert_ne!(a.rhs(), b.rhs());
        assert_eq!(generate(&spec, 11, 1).unwrap().rhs(), b.rhs());
    }
}
