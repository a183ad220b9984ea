//! Dense square matrices, LU solves and M-matrix certificates.

use crate::error::{check_len, MteqError, Result};

/// Relative pivot threshold: a pivot below `SINGULAR_TOL * max|M|` is singular.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        check_len(n * n, data.len())?;
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(MteqError::NonFinite(pos));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_len(n, row.len())?;
            data.extend_from_slice(row);
        }
        Self::from_vec(n, data)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, v.len())?;
        Ok(self
            .data
            .chunks_exact(self.n.max(1))
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `diag(left) * self * diag(right)`, either side optional.
    pub fn scale(&mut self, left: Option<&[f64]>, right: Option<&[f64]>) {
        let n = self.n;
        for (i, row) in self.data.chunks_exact_mut(n.max(1)).enumerate() {
            let l = left.map_or(1.0, |l| l[i]);
            for (j, a) in row.iter_mut().enumerate() {
                *a *= l * right.map_or(1.0, |r| r[j]);
            }
        }
    }

    pub fn add_diag(&mut self, diag: &[f64]) {
        for (i, d) in diag.iter().enumerate() {
            self[(i, i)] += d;
        }
    }

    /// Solves `M d = rhs` by Gaussian elimination with partial pivoting.
    pub fn lu_solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        check_len(n, rhs.len())?;
        let threshold = SINGULAR_TOL * self.max_abs();
        let mut a = self.data.clone();
        let mut x = rhs.to_vec();

        for col in 0..n {
            let (piv, pivot) = (col..n)
                .map(|r| (r, a[r * n + col]))
                .max_by(|p, q| p.1.abs().total_cmp(&q.1.abs()))
                .expect("non-empty column range");
            if !(pivot.abs() > threshold) {
                return Err(MteqError::SingularSystem {
                    column: col + 1,
                    pivot: pivot.abs(),
                    threshold,
                });
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                }
                x.swap(col, piv);
            }
            let (upper, lower) = a.split_at_mut((col + 1) * n);
            let pivot_row = &upper[col * n..];
            for (r, row) in lower.chunks_exact_mut(n).enumerate() {
                let factor = row[col] / pivot;
                if factor != 0.0 {
                    row[col] = 0.0;
                    for k in col + 1..n {
                        row[k] -= factor * pivot_row[k];
                    }
                    x[col + 1 + r] -= factor * x[col];
                }
            }
        }

        for i in (0..n).rev() {
            let row = &a[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    /// True iff every off-diagonal entry is `<= 0` (exact sign test).
    pub fn is_z_matrix(&self) -> bool {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .all(|(k, &v)| k / n == k % n || v <= 0.0)
    }

    /// A Z-matrix with `M v > 0` for some `v > 0` is a nonsingular M-matrix.
    /// Returns whether `v` certifies that for `self`.
    pub fn m_matrix_certificate(&self, v: &[f64]) -> Result<bool> {
        check_len(self.n, v.len())?;
        if let Some((index, &value)) = v.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            return Err(MteqError::NonPositiveWeight {
                index: index + 1,
                value,
            });
        }
        Ok(self.is_z_matrix() && self.matvec(v)?.iter().all(|&c| c > 0.0))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
