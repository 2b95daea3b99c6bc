mod common;

use common::*;
use nonnormal_linalg::{
    eigenvalues, hessenberg, log_abs_det, singular_values, smallest_singular, CMatrix, SmallestMode, C64,
};

#[test]
fn hessenberg_preserves_spectrum_against_charpoly_roots() {
    let mut rng = TestRng::new(11);
    for n in 2..=6 {
        let a = gaussian(n, &mut rng);
        let h = hessenberg(&a).unwrap();
        for i in 0..n {
            for j in 0..i.saturating_sub(1) {
                assert!(h[(i, j)].norm() < 1e-14);
            }
        }
        let want = poly_roots(&char_poly(&a));
        let got_h = poly_roots(&char_poly(&h));
        assert!(multiset_distance(&want, &got_h) < 1e-8, "n = {n}");
        let eig = eigenvalues(&h).unwrap();
        assert!(multiset_distance(&want, &eig.values) < 1e-8, "n = {n}");
    }
}

#[test]
fn eigenvalues_match_charpoly_roots() {
    let mut rng = TestRng::new(12);
    for trial in 0..40 {
        let n = 1 + trial % 6;
        let a = gaussian(n, &mut rng);
        let e = eigenvalues(&a).unwrap();
        assert!(e.converged);
        let want = poly_roots(&char_poly(&a));
        let d = multiset_distance(&want, &e.values);
        assert!(d < 1e-8, "trial {trial}: {d}");
    }
}

#[test]
fn singular_values_match_gram_eigenvalues() {
    let mut rng = TestRng::new(13);
    let a = gaussian(20, &mut rng);
    let s = singular_values(&a).unwrap();
    let gram = &a.adjoint() * &a;
    let mut want: Vec<f64> = hermitian_eigenvalues(&gram).iter().map(|x| x.max(0.0).sqrt()).collect();
    want.reverse();
    for (x, y) in s.values.iter().zip(&want) {
        assert!((x - y).abs() < 1e-8, "{x} vs {y}");
    }
}

#[test]
fn log_abs_det_matches_singular_value_sum() {
    let mut rng = TestRng::new(14);
    let a = gaussian(30, &mut rng);
    let via_svd: f64 = singular_values(&a).unwrap().values.iter().map(|s| s.ln()).sum();
    let via_lu = log_abs_det(&a).unwrap();
    assert!((via_svd - via_lu).abs() < 1e-6, "{via_svd} vs {via_lu}");
}

#[test]
fn unitary_smallest_singular_is_one() {
    let mut rng = TestRng::new(15);
    let u = random_unitary(12, &mut rng);
    for mode in [SmallestMode::Dense, SmallestMode::InverseIteration] {
        let s = smallest_singular(&u, mode).unwrap();
        assert!((s.value - 1.0).abs() < 1e-10, "{mode:?}: {}", s.value);
    }
}

#[test]
fn jordan_smallest_singular_scales_like_power() {
    // For J_N(z), |z| < 1, sigma_N sits within constants of |z|^N with
    // constants depending on z only.
    let z = 0.5;
    let n = 40;
    let a = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(z, 0.0)
        } else if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let s = smallest_singular(&a, SmallestMode::Dense).unwrap().value;
    let ratio = s / z.powi(n as i32);
    assert!(ratio > 0.1 && ratio < 10.0, "ratio {ratio}");
    let it = smallest_singular(&a, SmallestMode::InverseIteration).unwrap().value;
    assert!((it - s).abs() <= 1e-6 * s, "{it} vs {s}");
}
