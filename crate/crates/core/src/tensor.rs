//! Dense order-`m`, dimension-`n` real tensors and their contraction kernels.
//!
//! Entries are stored flat in row-major order over `(i1, ..., im)`, so the
//! slice belonging to a fixed leading index `i1` is contiguous. Indices in the
//! Rust API are 0-based; the text formats in [`crate::io`] are 1-based.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, MteqError, Result};
use crate::linalg::DenseMatrix;

/// Largest order accepted by [`DenseTensor::semi_symmetrize`] and
/// [`DenseTensor::symmetrize`]; the number of index permutations grows as `(m-1)!`.
pub const SYMMETRIZE_ORDER_LIMIT: usize = 6;

/// Tensors with at least this many entries are contracted row-parallel.
const PARALLEL_THRESHOLD: usize = 1 << 18;

/// Advisory symmetry metadata carried alongside the entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    None,
    /// Invariant under permutations of the trailing `m - 1` indices.
    SemiSymmetric,
    /// Invariant under all index permutations.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
    symmetry: Symmetry,
}

/// `n^k`, or `None` on overflow.
pub(crate) fn checked_pow(n: usize, k: usize) -> Option<usize> {
    (0..k).try_fold(1usize, |acc, _| acc.checked_mul(n))
}

impl DenseTensor {
    pub fn new(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = Self::entry_count(order, dim)?;
        if data.len() != expected {
            return Err(MteqError::EntryCount {
                expected,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(MteqError::NonFinite(pos));
        }
        Ok(Self {
            order,
            dim,
            data,
            symmetry: Symmetry::None,
        })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = Self::entry_count(order, dim)?;
        Self::new(order, dim, vec![0.0; len])
    }

    /// Builds a tensor by evaluating `f` at every 0-based multi-index in
    /// row-major order.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let len = Self::entry_count(order, dim)?;
        let mut data = Vec::with_capacity(len);
        let mut idx = vec![0usize; order];
        for _ in 0..len {
            data.push(f(&idx));
            advance(&mut idx, dim);
        }
        Self::new(order, dim, data)
    }

    /// The identity tensor: ones on the superdiagonal `a_{i...i}`, zeros elsewhere.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        let stride = t.diagonal_stride();
        for i in 0..dim {
            t.data[i * stride] = 1.0;
        }
        t.symmetry = Symmetry::Symmetric;
        Ok(t)
    }

    fn entry_count(order: usize, dim: usize) -> Result<usize> {
        if order < 2 || dim < 1 {
            return Err(MteqError::InvalidShape { order, dim });
        }
        checked_pow(dim, order).ok_or(MteqError::InvalidShape { order, dim })
    }

    /// Flat distance between consecutive diagonal entries `a_{i..i}` and `a_{i+1..i+1}`.
    pub(crate) fn diagonal_stride(&self) -> usize {
        (0..self.order).map(|k| self.dim.pow(k as u32)).sum()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Overrides the advisory symmetry tag without touching the entries.
    pub fn with_symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    /// Writes one entry. The symmetry tag is reset since the write may break it.
    pub fn set(&mut self, idx: &[usize], value: f64) {
        assert!(value.is_finite(), "tensor entries must be finite");
        let off = self.offset(idx);
        self.data[off] = value;
        self.symmetry = Symmetry::None;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Multiplies every entry by `factor`, keeping the symmetry tag.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
            symmetry: self.symmetry,
        }
    }

    /// `s * I - self`, the M-tensor construction `A = sI - B`.
    pub fn shifted_identity_minus(&self, s: f64) -> Self {
        let mut data: Vec<f64> = self.data.iter().map(|v| -v).collect();
        let stride = self.diagonal_stride();
        for i in 0..self.dim {
            data[i * stride] += s;
        }
        Self {
            order: self.order,
            dim: self.dim,
            data,
            symmetry: self.symmetry,
        }
    }

    fn row_len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// `(A x^{m-1})_i = sum a_{i i2..im} x_{i2} .. x_{im}`, summed in lexicographic
    /// order of `(i2, ..., im)`.
    pub fn apply_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, x.len())?;
        let depth = self.order - 1;
        let rows = self.data.chunks_exact(self.row_len());
        Ok(if self.data.len() >= PARALLEL_THRESHOLD {
            rows.collect::<Vec<_>>()
                .into_par_iter()
                .map(|row| contract(row, x, depth))
                .collect()
        } else {
            rows.map(|row| contract(row, x, depth)).collect()
        })
    }

    /// The matrix `(A x^{m-2})_{ij} = sum a_{i j i3..im} x_{i3} .. x_{im}`.
    ///
    /// For a semi-symmetric tensor the Jacobian of `x -> A x^{m-1}` is
    /// `(m - 1)` times this matrix.
    pub fn apply_mat(&self, x: &[f64]) -> Result<DenseMatrix> {
        check_len(self.dim, x.len())?;
        let n = self.dim;
        let depth = self.order - 2;
        let block = self.row_len() / n;
        let blocks = self.data.chunks_exact(block);
        let data: Vec<f64> = if self.data.len() >= PARALLEL_THRESHOLD {
            blocks
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|b| contract(b, x, depth))
                .collect()
        } else {
            blocks.map(|b| contract(b, x, depth)).collect()
        };
        DenseMatrix::from_vec(n, data)
    }

    /// Averages each entry over all permutations of its trailing `m - 1` indices.
    ///
    /// The result satisfies `Ã x^{m-1} = A x^{m-1}` for every `x`.
    pub fn semi_symmetrize(&self) -> Result<Self> {
        self.semi_symmetrize_with_limit(SYMMETRIZE_ORDER_LIMIT)
    }

    pub fn semi_symmetrize_with_limit(&self, limit: usize) -> Result<Self> {
        if self.order > limit {
            return Err(MteqError::OrderTooLarge {
                order: self.order,
                limit,
            });
        }
        let k = self.order - 1;
        let row_len = self.row_len();
        let mut data = vec![0.0; self.data.len()];
        for (src, dst) in self
            .data
            .chunks_exact(row_len)
            .zip(data.chunks_exact_mut(row_len))
        {
            average_orbits(src, dst, self.dim, k);
        }
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data,
            symmetry: Symmetry::SemiSymmetric,
        })
    }

    /// Averages each entry over all `m!` permutations of its indices.
    pub fn symmetrize(&self) -> Result<Self> {
        if self.order > SYMMETRIZE_ORDER_LIMIT {
            return Err(MteqError::OrderTooLarge {
                order: self.order,
                limit: SYMMETRIZE_ORDER_LIMIT,
            });
        }
        let mut data = vec![0.0; self.data.len()];
        average_orbits(&self.data, &mut data, self.dim, self.order);
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data,
            symmetry: Symmetry::Symmetric,
        })
    }

    /// `max_i (B e^{m-1})_i`, an upper bound on the spectral radius of a
    /// nonnegative tensor.
    pub fn row_sum_bound(&self) -> Result<f64> {
        if let Some(pos) = self.data.iter().position(|&v| v < 0.0) {
            return Err(MteqError::NegativeEntry(pos));
        }
        let e = vec![1.0; self.dim];
        Ok(self.apply_vec(&e)?.into_iter().fold(0.0, f64::max))
    }

    /// Checks invariance under permutations of the trailing indices, to an
    /// absolute tolerance.
    pub fn is_semi_symmetric(&self, tol: f64) -> bool {
        let row_len = self.row_len();
        self.data
            .chunks_exact(row_len)
            .all(|row| orbits_constant(row, self.dim, self.order - 1, tol))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        orbits_constant(&self.data, self.dim, self.order, tol)
    }

    /// The principal subtensor with all indices drawn from `indices` (0-based,
    /// in the given order).
    pub fn principal_subtensor(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim) {
            return Err(MteqError::DimensionMismatch {
                expected: self.dim,
                found: bad + 1,
            });
        }
        let mut full = vec![0usize; self.order];
        let sub = Self::from_fn(self.order, indices.len(), |idx| {
            for (f, &i) in full.iter_mut().zip(idx) {
                *f = indices[i];
            }
            self.get(&full)
        })?;
        Ok(sub.with_symmetry(self.symmetry))
    }
}

/// Row-major odometer increment over `[0, n)^len`.
pub(crate) fn advance(idx: &mut [usize], n: usize) {
    for i in idx.iter_mut().rev() {
        *i += 1;
        if *i < n {
            return;
        }
        *i = 0;
    }
}

/// Contracts a block of `n^depth` entries with `x` along every index:
/// `sum_j block[j] * x_{j1} * ... * x_{j_depth}`, accumulated in lexicographic order.
fn contract(block: &[f64], x: &[f64], depth: usize) -> f64 {
    let n = x.len();
    if depth == 0 {
        return block[0];
    }
    let outer = depth - 1;
    let mut idx = vec![0usize; outer];
    // prefix[k] holds x_{j1} * ... * x_{jk} for the current odometer position.
    let mut prefix = vec![1.0; outer + 1];
    for k in 0..outer {
        prefix[k + 1] = prefix[k] * x[0];
    }
    let mut acc = 0.0;
    for chunk in block.chunks_exact(n) {
        let p = prefix[outer];
        for (a, xi) in chunk.iter().zip(x) {
            acc += a * (p * xi);
        }
        let mut k = outer;
        while k > 0 {
            k -= 1;
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
        }
        for j in k..outer {
            prefix[j + 1] = prefix[j] * x[idx[j]];
        }
    }
    acc
}

fn flat(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// For every orbit of `[0, n)^k` under index permutation, writes the orbit mean
/// of `src` to every member in `dst`. Each orbit is summed once from its sorted
/// representative, so members receive bit-identical values.
fn average_orbits(src: &[f64], dst: &mut [f64], n: usize, k: usize) {
    let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
    let count = perms.len() as f64;
    let mut permuted = vec![0usize; k];
    let mut offsets = Vec::with_capacity(perms.len());
    for rep in (0..n).combinations_with_replacement(k) {
        offsets.clear();
        for p in &perms {
            for (slot, &from) in permuted.iter_mut().zip(p) {
                *slot = rep[from];
            }
            offsets.push(flat(&permuted, n));
        }
        let mean = offsets.iter().map(|&o| src[o]).sum::<f64>() / count;
        for &o in &offsets {
            dst[o] = mean;
        }
    }
}

fn orbits_constant(data: &[f64], n: usize, k: usize, tol: f64) -> bool {
    let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
    let mut permuted = vec![0usize; k];
    (0..n).combinations_with_replacement(k).all(|rep| {
        let base = data[flat(&rep, n)];
        perms.iter().all(|p| {
            for (slot, &from) in permuted.iter_mut().zip(p) {
                *slot = rep[from];
            }
            (data[flat(&permuted, n)] - base).abs() <= tol
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn single_entry(order: usize, dim: usize, idx: &[usize], value: f64) -> DenseTensor {
        let mut t = DenseTensor::zeros(order, dim).unwrap();
        t.set(idx, value);
        t
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(DenseTensor::zeros(1, 3).is_err());
        assert!(DenseTensor::zeros(3, 0).is_err());
        assert!(matches!(
            DenseTensor::new(2, 2, vec![0.0; 3]),
            Err(MteqError::EntryCount { expected: 4, found: 3 })
        ));
        assert!(matches!(
            DenseTensor::new(2, 2, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(MteqError::NonFinite(1))
        ));
    }

    #[test]
    fn identity_layout() {
        let t = DenseTensor::identity(3, 2).unwrap();
        let ones: Vec<usize> = (0..t.len()).filter(|&i| t.entries()[i] == 1.0).collect();
        // (1,1,1) -> 0, (2,2,2) -> 7
        assert_eq!(ones, vec![0, 7]);
        let m = DenseTensor::identity(2, 3).unwrap();
        assert_eq!(
            m.entries(),
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn apply_vec_examples() {
        let id = DenseTensor::identity(3, 2).unwrap();
        assert_eq!(id.apply_vec(&[2.0, 3.0]).unwrap(), vec![4.0, 9.0]);

        let t = single_entry(3, 2, &[0, 1, 1], 1.0);
        assert_eq!(t.apply_vec(&[1.0, 2.0]).unwrap(), vec![4.0, 0.0]);

        assert!(matches!(
            id.apply_vec(&[1.0]),
            Err(MteqError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn apply_mat_examples() {
        let id = DenseTensor::identity(3, 2).unwrap();
        let m = id.apply_mat(&[2.0, 3.0]).unwrap();
        assert_eq!(m.entries(), &[2.0, 0.0, 0.0, 3.0]);

        let t = single_entry(3, 2, &[0, 1, 1], 1.0);
        let m = t.apply_mat(&[1.0, 2.0]).unwrap();
        assert_eq!(m.entries(), &[0.0, 2.0, 0.0, 0.0]);

        // order 2: the tensor itself is the matrix
        let a = DenseTensor::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.apply_mat(&[9.0, 9.0]).unwrap().entries(), a.entries());
    }

    #[test]
    fn semi_symmetrize_examples() {
        let t = single_entry(3, 2, &[0, 0, 1], 2.0);
        let s = t.semi_symmetrize().unwrap();
        assert_eq!(s.symmetry(), Symmetry::SemiSymmetric);
        assert_eq!(s.get(&[0, 0, 1]), 1.0);
        assert_eq!(s.get(&[0, 1, 0]), 1.0);
        let others: f64 = s.entries().iter().map(|v| v.abs()).sum();
        assert_eq!(others, 2.0);

        let id = DenseTensor::identity(4, 3).unwrap();
        assert_eq!(id.semi_symmetrize().unwrap().entries(), id.entries());

        let big = DenseTensor::zeros(7, 2).unwrap();
        assert!(matches!(
            big.semi_symmetrize(),
            Err(MteqError::OrderTooLarge { order: 7, limit: 6 })
        ));
    }

    #[test]
    fn full_symmetrize_is_symmetric() {
        let t = DenseTensor::from_fn(3, 3, |i| (i[0] * 9 + i[1] * 3 + i[2]) as f64).unwrap();
        assert!(!t.is_symmetric(0.0));
        let s = t.symmetrize().unwrap();
        assert!(s.is_symmetric(0.0));
        assert!(s.is_semi_symmetric(0.0));
        assert_relative_eq!(s.get(&[0, 1, 2]), (5.0 + 7.0 + 11.0 + 15.0 + 19.0 + 21.0) / 6.0);
    }

    #[test]
    fn row_sum_bound_examples() {
        let ones = DenseTensor::new(3, 2, vec![1.0; 8]).unwrap();
        assert_eq!(ones.row_sum_bound().unwrap(), 4.0);
        assert_eq!(DenseTensor::zeros(3, 2).unwrap().row_sum_bound().unwrap(), 0.0);
        assert_eq!(
            DenseTensor::identity(3, 3).unwrap().row_sum_bound().unwrap(),
            1.0
        );
        let neg = single_entry(3, 2, &[1, 0, 0], -0.5);
        assert!(matches!(neg.row_sum_bound(), Err(MteqError::NegativeEntry(4))));
    }

    #[test]
    fn shifted_identity_and_subtensor() {
        let b = DenseTensor::new(3, 2, vec![1.0; 8]).unwrap();
        let a = b.shifted_identity_minus(4.04);
        assert_relative_eq!(a.get(&[0, 0, 0]), 3.04);
        assert_relative_eq!(a.get(&[1, 1, 1]), 3.04);
        assert_eq!(a.get(&[0, 1, 0]), -1.0);

        let t = DenseTensor::from_fn(3, 3, |i| (i[0] * 9 + i[1] * 3 + i[2]) as f64).unwrap();
        let sub = t.principal_subtensor(&[0, 2]).unwrap();
        assert_eq!(sub.dim(), 2);
        assert_eq!(sub.get(&[1, 1, 1]), 26.0);
        assert_eq!(sub.get(&[1, 0, 1]), 20.0);
        assert!(t.principal_subtensor(&[3]).is_err());
    }

    #[test]
    fn parallel_path_matches_sequential() {
        // 2^18 entries triggers the row-parallel branch
        let t = DenseTensor::from_fn(2, 512, |i| ((i[0] * 31 + i[1] * 17) % 13) as f64 - 6.0).unwrap();
        let x: Vec<f64> = (0..512).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
        let got = t.apply_vec(&x).unwrap();
        for (i, g) in got.iter().enumerate() {
            let want: f64 = (0..512).map(|j| t.get(&[i, j]) * (1.0 * x[j])).sum();
            assert_eq!(*g, want);
        }
    }
}
