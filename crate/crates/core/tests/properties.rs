use approx::assert_relative_eq;
use mteq::bench::format_sci;
use mteq::problems::RngStream;
use mteq::solvers::{solve_inexact_newton, solve_regularized_newton, SolverConfig};
use mteq::{DenseTensor, MTensorEquation};
use proptest::prelude::*;

fn tensor_strategy() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=4, 1usize..=4, any::<u64>())
}

fn tensor(m: usize, n: usize, seed: u64) -> DenseTensor {
    let mut rng = RngStream::new(seed, 0);
    DenseTensor::from_fn(m, n, |_| 2.0 * rng.uniform() - 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_is_homogeneous((m, n, seed) in tensor_strategy(), c in 0.1f64..3.0) {
        let a = tensor(m, n, seed);
        let x = RngStream::new(seed, 1).uniform_vec(n);
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        let lhs = a.apply_vec(&cx).unwrap();
        let rhs = a.apply_vec(&x).unwrap();
        for (l, r) in lhs.iter().zip(&rhs) {
            assert_relative_eq!(*l, c.powi(m as i32 - 1) * r, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn semi_symmetrize_is_idempotent((m, n, seed) in tensor_strategy()) {
        let s = tensor(m, n, seed).semi_symmetrize().unwrap();
        prop_assert!(s.is_semi_symmetric(1e-14));
        let twice = s.semi_symmetrize().unwrap();
        for (u, v) in s.entries().iter().zip(twice.entries()) {
            assert_relative_eq!(u, v, epsilon = 1e-14);
        }
    }

    #[test]
    fn contraction_identity_after_symmetrizing((m, n, seed) in tensor_strategy()) {
        let s = tensor(m, n, seed).semi_symmetrize().unwrap();
        let x = RngStream::new(seed, 2).uniform_vec(n);
        let via_mat = s.apply_mat(&x).unwrap().matvec(&x).unwrap();
        let direct = s.apply_vec(&x).unwrap();
        for (u, v) in via_mat.iter().zip(&direct) {
            assert_relative_eq!(u, v, epsilon = 1e-13, max_relative = 1e-13);
        }
    }

    #[test]
    fn diagonal_equation_has_closed_form(
        m in 2usize..=5,
        d in prop::collection::vec(0.5f64..4.0, 1..6),
        seed in any::<u64>(),
    ) {
        let n = d.len();
        let a = DenseTensor::from_fn(m, n, |idx| if idx.iter().all(|&i| i == idx[0]) { d[idx[0]] } else { 0.0 }).unwrap();
        let b: Vec<f64> = RngStream::new(seed, 0).uniform_vec(n);
        let eq = MTensorEquation::new(a, b.clone(), false).unwrap();
        let inv = 1.0 / (m - 1) as f64;
        for r in [
            solve_inexact_newton(&eq, &SolverConfig::inexact()).unwrap(),
            solve_regularized_newton(&eq, &SolverConfig::regularized()).unwrap(),
        ] {
            prop_assert!(r.converged(), "{:?}", r.status);
            for i in 0..n {
                assert_relative_eq!(r.x[i], (b[i] / d[i]).powf(inv), max_relative = 1e-8);
            }
            prop_assert!(r.x.iter().all(|v| *v > 0.0));
        }
    }

    #[test]
    fn scientific_format_round_trips(v in 1e-300f64..1e300) {
        let s = format_sci(v);
        let back: f64 = s.parse().unwrap();
        prop_assert!(((back - v) / v).abs() <= 5e-3);
        prop_assert!(s.contains('E'));
    }

    #[test]
    fn uniform_draws_lie_in_open_interval(seed in any::<u64>(), stream in any::<u64>()) {
        let mut rng = RngStream::new(seed, stream);
        for _ in 0..100 {
            let u = rng.uniform();
            prop_assert!(u > 0.0 && u < 1.0);
        }
    }
}
