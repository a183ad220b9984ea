//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use mteq::problems::RngStream;
use mteq::{DenseTensor, MTensorEquation};

/// All multi-indices of `order` entries in `0..n`, row-major.
pub fn multi_indices(order: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..order {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// `(A x^{m-1})_i` by explicit summation over every index tuple.
pub fn naive_apply_vec(a: &DenseTensor, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.dim()];
    for idx in multi_indices(a.order(), a.dim()) {
        let prod: f64 = idx[1..].iter().map(|&j| x[j]).product();
        out[idx[0]] += a.get(&idx) * prod;
    }
    out
}

/// Central differences of `f` at `y`, column by column.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, y: &[f64], rel_step: f64) -> Vec<Vec<f64>> {
    let n = y.len();
    let m = f(y).len();
    let mut j = vec![vec![0.0; n]; m];
    for c in 0..n {
        let h = rel_step * y[c].abs().max(1.0);
        let mut yp = y.to_vec();
        let mut ym = y.to_vec();
        yp[c] += h;
        ym[c] -= h;
        let (fp, fm) = (f(&yp), f(&ym));
        for r in 0..m {
            j[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

/// `max |a - b| / max |b|`.
pub fn rel_max_diff(a: &[f64], b: &[f64]) -> f64 {
    let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let s = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

/// Whether every `a[i, j2..jm]` with `i` in `set` and all `j`s outside it vanishes.
pub fn reducible_wrt(a: &DenseTensor, set: &[usize]) -> bool {
    multi_indices(a.order(), a.dim()).iter().all(|idx| {
        !set.contains(&idx[0]) || idx[1..].iter().any(|j| set.contains(j)) || a.get(idx) == 0.0
    })
}

/// Largest subset of the zero positions of `b` w.r.t. which `a` is reducible,
/// found by enumerating every subset.
pub fn brute_force_zero_set(a: &DenseTensor, b: &[f64]) -> Vec<usize> {
    let zeros: Vec<usize> = (0..b.len()).filter(|&i| b[i] == 0.0).collect();
    let mut best: Vec<usize> = Vec::new();
    for mask in 0u32..(1 << zeros.len()) {
        let set: Vec<usize> = zeros
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &i)| i)
            .collect();
        if set.len() > best.len() && reducible_wrt(a, &set) {
            best = set;
        }
    }
    best
}

/// A random order-3 strong M-tensor equation whose right-hand side has up to
/// four zeros, with a random part of the zero set made reducible.
pub fn reducible_instance(rng: &mut RngStream) -> MTensorEquation {
    let n = 2 + (rng.uniform() * 5.0) as usize; // 2..=6
    let n_zeros = 1 + (rng.uniform() * n.min(4) as f64) as usize;
    let n_zeros = n_zeros.min(n.min(4));
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.uniform() * (i + 1) as f64) as usize;
        order.swap(i, j.min(i));
    }
    let zeros: Vec<usize> = order[..n_zeros].to_vec();
    let keep: Vec<usize> = zeros.iter().copied().filter(|_| rng.uniform() < 0.7).collect();
    let density = 0.3 + 0.7 * rng.uniform();
    let b_tensor = DenseTensor::from_fn(3, n, |idx| {
        let u = rng.uniform();
        let blocked = keep.contains(&idx[0]) && idx[1..].iter().all(|j| !keep.contains(j));
        if blocked || u > density {
            0.0
        } else {
            u
        }
    })
    .unwrap();
    let s = 1.01 * b_tensor.row_sum_bound().unwrap() + 0.1;
    let a = b_tensor.shifted_identity_minus(s);
    let b: Vec<f64> = (0..n)
        .map(|i| if zeros.contains(&i) { 0.0 } else { 0.1 + rng.uniform() })
        .collect();
    MTensorEquation::new(a, b, true).unwrap()
}
