//! Solvers for M-tensor equations `A x^{m-1} = b`.
//!
//! `A` is a (semi-symmetric) strong M-tensor of order `m` and dimension `n`,
//! `b` a nonnegative vector. Two Newton-type methods work on transformed
//! versions of the equation in the variable `y = x^[m-1]`:
//!
//! - [`solvers::solve_inexact_newton`] for `b > 0`, a damped Newton method on
//!   `E(y) = f(y) / y` whose iterates stay strictly positive;
//! - [`solvers::solve_regularized_newton`] for `b >= 0`, a Newton method on the
//!   system `(t, E(y) + t y)` with a shrinking regularization parameter `t`,
//!   preceded by a zero-pattern reduction that fixes provably-zero components.
//!
//! The [`problems`] module generates the five benchmark families and
//! [`bench`] runs seeded trials and writes CSV/JSON reports.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod solvers;
pub mod tensor;
pub mod verify;

pub use error::{MteqError, Result};
pub use linalg::DenseMatrix;
pub use model::{make_equation, BClass, MTensorEquation};
pub use tensor::{DenseTensor, Symmetry};
