mod common;

use common::*;
use nonnormal_linalg::{eigenvalues, log_abs_det, singular_values, smallest_singular, CMatrix, SmallestMode};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalue_count_and_trace(seed in any::<u64>(), n in 1usize..24) {
        let a = gaussian(n, &mut TestRng::new(seed));
        let e = eigenvalues(&a).unwrap();
        prop_assert_eq!(e.values.len(), n);
        let sum: nonnormal_linalg::C64 = e.values.iter().sum();
        prop_assert!((sum - a.trace()).norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn eigenvalues_of_small_integer_matrices(n in 1usize..6, v in prop::collection::vec(-3i32..=3, 36)) {
        // Exact power-of-two ratios between row and column sums used to make
        // balancing cycle.
        let a = CMatrix::from_fn(n, n, |i, j| nonnormal_linalg::C64::new(v[i * 6 + j] as f64, 0.0));
        let e = eigenvalues(&a).unwrap();
        prop_assert!(e.converged);
        let sum: nonnormal_linalg::C64 = e.values.iter().sum();
        prop_assert!((sum - a.trace()).norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn singular_values_unitarily_invariant(seed in any::<u64>(), n in 1usize..16) {
        let mut rng = TestRng::new(seed);
        let a = gaussian(n, &mut rng);
        let u = random_unitary(n, &mut rng);
        let v = random_unitary(n, &mut rng);
        let b = &(&u * &a) * &v;
        let sa = singular_values(&a).unwrap();
        let sb = singular_values(&b).unwrap();
        for (x, y) in sa.values.iter().zip(&sb.values) {
            prop_assert!((x - y).abs() < 1e-8);
        }
        let fro2: f64 = sa.values.iter().map(|s| s * s).sum();
        prop_assert!((fro2 - a.frobenius_norm().powi(2)).abs() <= 1e-8 * a.frobenius_norm().powi(2));
    }

    #[test]
    fn log_abs_det_is_multiplicative(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = TestRng::new(seed);
        let a = gaussian(n, &mut rng);
        let b = gaussian(n, &mut rng);
        let la = log_abs_det(&a).unwrap();
        let lb = log_abs_det(&b).unwrap();
        let lab = log_abs_det(&(&a * &b)).unwrap();
        prop_assert!((lab - la - lb).abs() <= 1e-6 * n as f64);
    }

    #[test]
    fn smallest_singular_modes_agree(seed in any::<u64>(), n in 1usize..20) {
        let a = gaussian(n, &mut TestRng::new(seed));
        let dense = smallest_singular(&a, SmallestMode::Dense).unwrap().value;
        let s = singular_values(&a).unwrap();
        prop_assume!(dense / s.largest() > 1e-12);
        let it = smallest_singular(&a, SmallestMode::InverseIteration).unwrap();
        prop_assert!((it.value - dense).abs() <= 1e-6 * dense, "{} vs {}", it.value, dense);
    }

    #[test]
    fn banded_upper_triangular_matches_gram(seed in any::<u64>(), n in 12usize..40, q in 2usize..4) {
        let mut rng = TestRng::new(seed);
        let a = CMatrix::from_fn(n, n, |i, j| if j >= i && j <= i + q { rng.complex_normal() } else { Default::default() });
        let s = singular_values(&a).unwrap();
        let gram = &a.adjoint() * &a;
        let mut want: Vec<f64> = hermitian_eigenvalues(&gram).iter().map(|x| x.max(0.0).sqrt()).collect();
        want.reverse();
        for (x, y) in s.values.iter().zip(&want) {
            prop_assert!((x - y).abs() < 1e-8 * (1.0 + s.largest()));
        }
    }
}
