use nonnormal::detequiv::{g_value, truncation_point, TruncationConfig};
use nonnormal::limitlaw::limit_logpot_toeplitz;
use nonnormal::linalg::{log_abs_det, singular_values, SmallestMode};
use nonnormal::models::{build_banded_toeplitz, build_bidiagonal, build_twisted, Generator, TwistedSymbol};
use nonnormal::rigidity::{regular_cuts, theorem31_check, witness_vectors, BlockPartition};
use nonnormal::spectra::{compare_measures, empirical_logpot, pseudospectrum_grid, GridSpec};
use nonnormal::{CMatrix, C64};
use proptest::prelude::*;

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn cvec(r: f64, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(cplx(r), len)
}

fn square(n: usize) -> impl Strategy<Value = CMatrix> {
    cvec(2.0, n * n..n * n + 1).prop_map(move |v| CMatrix::from_row_major(n, n, v).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pseudospectrum_is_one_lipschitz(m in square(6)) {
        let spec = GridSpec::square(2.0, 7);
        let f = pseudospectrum_grid(&m, &spec, SmallestMode::Dense).unwrap();
        prop_assert_eq!(f.failures, 0);
        let h = (spec.x_max - spec.x_min) / (spec.nx - 1) as f64;
        for iy in 0..spec.ny {
            for ix in 1..spec.nx {
                prop_assert!((f.at(ix, iy) - f.at(ix - 1, iy)).abs() <= h * (1.0 + 1e-9));
            }
        }
        for iy in 1..spec.ny {
            for ix in 0..spec.nx {
                prop_assert!((f.at(ix, iy) - f.at(ix, iy - 1)).abs() <= h * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn logpot_commutes_with_translation(m in square(5), w in cplx(3.0), z in cplx(3.0)) {
        let a = empirical_logpot(&m, z).unwrap();
        let b = empirical_logpot(&m.shifted(-w), z + w).unwrap();
        prop_assert!(close(a, b, 1e-8), "{} vs {}", a, b);
    }

    #[test]
    fn n_star_non_increasing_in_gamma(
        mut s in prop::collection::vec(0.0f64..0.05, 20..80),
        g1 in 0.6f64..3.0,
        dg in 0.0f64..2.0,
    ) {
        s.sort_by(f64::total_cmp);
        let lo = truncation_point(&s, &TruncationConfig::new(g1, 0.1).unwrap()).unwrap();
        let hi = truncation_point(&s, &TruncationConfig::new(g1 + dg, 0.1).unwrap()).unwrap();
        prop_assert!(hi <= lo);
    }

    #[test]
    fn compare_is_symmetric(a in cvec(1.0, 10..40), b in cvec(1.0, 10..40)) {
        let test_z = [C64::new(3.0, 0.0), C64::new(0.0, -2.5), C64::new(-2.0, 2.0)];
        let ab = compare_measures(&a, &b, &test_z).unwrap();
        let ba = compare_measures(&b, &a, &test_z).unwrap();
        prop_assert!(close(ab.logpot_rmse, ba.logpot_rmse, 1e-12));
        prop_assert!(close(ab.logpot_max, ba.logpot_max, 1e-12));
        prop_assert!(close(ab.radial_w1, ba.radial_w1, 1e-12));
        prop_assert!(close(ab.angular_ks, ba.angular_ks, 1e-12));
    }

    #[test]
    fn toeplitz_logpot_rotation_invariant(a in cvec(1.0, 2..5), theta in 0.0f64..std::f64::consts::TAU, z in cplx(3.0)) {
        let u = C64::from_polar(1.0, theta);
        let rotated: Vec<C64> = a.iter().enumerate().map(|(l, c)| c * u.powu(l as u32)).collect();
        let x = limit_logpot_toeplitz(&a, z).unwrap();
        let y = limit_logpot_toeplitz(&rotated, z).unwrap();
        prop_assert!(close(x, y, 1e-8), "{} vs {}", x, y);
    }

    #[test]
    fn witness_image_lives_on_block_ends(d in cvec(2.0, 4..40), delta in 0.2f64..0.8) {
        let n = d.len();
        let p = BlockPartition::from_cuts(regular_cuts(n, delta), n).unwrap();
        let m = build_bidiagonal(&d);
        for w in witness_vectors(&d, &p).unwrap() {
            let img = m.mul_vec(&w.embedded(n)).unwrap();
            for (k, v) in img.iter().enumerate() {
                if k + 1 != w.last && k + 2 != w.first {
                    prop_assert!(v.norm() < 1e-12, "block {}..={}, entry {}", w.first, w.last, k + 1);
                }
            }
        }
    }

    #[test]
    fn sandwich_upper_bound(d in cvec(2.0, 4..30), delta in 0.2f64..0.8) {
        let n = d.len();
        let p = BlockPartition::from_cuts(regular_cuts(n, delta), n).unwrap();
        let r = theorem31_check(&d, &p).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.upper_ok, "{} > {}", r.log_sigma_product, r.log_witness_product);
    }

    #[test]
    fn constant_twisted_is_toeplitz(a in cvec(2.0, 1..5), extra in 1usize..8) {
        let n = a.len() - 1 + extra;
        let sym = TwistedSymbol::constant(&a).unwrap();
        let t = build_twisted(&sym, n).unwrap();
        let b = build_banded_toeplitz(&sym, n).unwrap();
        prop_assert!(t.sub(&b).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn twisted_is_banded_upper_triangular(
        intercepts in prop::collection::vec(-2.0f64..2.0, 1..5),
        slope in -2.0f64..2.0,
        extra in 1usize..8,
    ) {
        let n = intercepts.len() - 1 + extra;
        let gens = intercepts.iter().map(|&c| Generator::real_affine(c, slope)).collect();
        let sym = TwistedSymbol::new(gens).unwrap();
        let m = build_twisted(&sym, n).unwrap();
        for i in 0..n {
            for j in 0..n {
                if j < i || j > i + sym.band() {
                    prop_assert_eq!(m[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn triangular_logdet_is_diagonal_sum(v in cvec(2.0, 36..37), z in cplx(1.0)) {
        let n = 6;
        let m = CMatrix::from_fn(n, n, |i, j| if j >= i { v[i * n + j] } else { C64::new(0.0, 0.0) });
        let want: f64 = (0..n).map(|i| (m[(i, i)] - z).norm().ln()).sum();
        let got = log_abs_det(&m.shifted(z)).unwrap();
        prop_assert!(close(got, want, 1e-9), "{} vs {}", got, want);
    }

    #[test]
    fn truncation_splits_the_logdet(m in square(8), z in cplx(2.0), gamma in 0.6f64..3.0) {
        let cfg = TruncationConfig::new(gamma, 0.1).unwrap();
        let t = g_value(&m, z, &cfg).unwrap();
        let kept: f64 = t.sigma_ascending[..t.n_star].iter().map(|s| s.ln()).sum();
        let lu = log_abs_det(&m.shifted(z)).unwrap();
        prop_assert!(close(t.log_det_b + kept, lu, 1e-6), "{} vs {}", t.log_det_b + kept, lu);
        let s = singular_values(&m.shifted(z)).unwrap().ascending();
        prop_assert_eq!(t.n_star, truncation_point(&s, &cfg).unwrap());
    }
}
