use num_complex::Complex64;

use crate::error::Result;
use crate::householder::{apply_left, apply_right, make_reflector};
use crate::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reduces a square matrix to upper Hessenberg form by a unitary similarity.
pub fn hessenberg(a: &CMatrix) -> Result<CMatrix> {
    let n = a.square_dim()?;
    a.check_finite()?;
    let mut h = a.clone();
    reduce_in_place(&mut h, n);
    Ok(h)
}

pub(crate) fn reduce_in_place(h: &mut CMatrix, n: usize) {
    if n < 3 {
        return;
    }
    let mut x = Vec::with_capacity(n);
    for k in 0..n - 2 {
        x.clear();
        x.extend((k + 1..n).map(|i| h[(i, k)]));
        let (refl, beta) = make_reflector(&x);
        if refl.is_identity() {
            continue;
        }
        h[(k + 1, k)] = beta;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
        apply_left(h, &refl, refl.tau.conj(), k + 1, k + 1, n);
        apply_right(h, &refl, refl.tau, 0, n, k + 1);
    }
}

/// `log|det(H - z Id)|` for upper Hessenberg `H` in O(n^2) time and O(n) memory.
///
/// Gaussian elimination with partial pivoting restricted to adjacent rows; a
/// zero pivot yields `-inf`.
pub fn log_abs_det_shifted(h: &CMatrix, z: Complex64) -> f64 {
    let n = h.rows();
    if n == 0 {
        return 0.0;
    }
    debug_assert!(h.is_square());
    let mut carried: Vec<Complex64> = h.row(0).to_vec();
    carried[0] -= z;
    let mut fresh = vec![ZERO; n];
    let mut acc = 0.0;
    for k in 0..n - 1 {
        fresh[k..].copy_from_slice(&h.row(k + 1)[k..]);
        fresh[k + 1] -= z;
        if fresh[k].l1_norm() > carried[k].l1_norm() {
            std::mem::swap(&mut carried, &mut fresh);
        }
        let p = carried[k];
        if p == ZERO {
            return f64::NEG_INFINITY;
        }
        acc += p.norm().ln();
        let m = fresh[k] / p;
        if m != ZERO {
            for j in k + 1..n {
                fresh[j] -= m * carried[j];
            }
        }
        std::mem::swap(&mut carried, &mut fresh);
    }
    let last = carried[n - 1];
    if last == ZERO {
        return f64::NEG_INFINITY;
    }
    acc + last.norm().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lu::log_abs_det;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_matrix(n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| {
            let h = ((i * 7919 + j * 104729) ^ (i * j * 31)) % 1009;
            let g = ((j * 7907 + i * 104723) ^ (i * j * 17)) % 1013;
            c(h as f64 / 1009.0 - 0.5, g as f64 / 1013.0 - 0.5)
        })
    }

    #[test]
    fn two_by_two_is_untouched() {
        let a = test_matrix(2);
        assert_eq!(hessenberg(&a).unwrap(), a);
    }

    #[test]
    fn hermitian_becomes_tridiagonal() {
        let b = test_matrix(4);
        let a = b.add(&b.adjoint()).unwrap();
        let h = hessenberg(&a).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if j > i + 1 || i > j + 1 {
                    assert!(h[(i, j)].norm() < 1e-12, "({i},{j}) = {:?}", h[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn shifted_logdet_matches_dense_lu() {
        let a = test_matrix(12);
        let h = hessenberg(&a).unwrap();
        for z in [c(0.0, 0.0), c(1.5, -0.3), c(-4.0, 2.0)] {
            let want = log_abs_det(&a.shifted(z)).unwrap();
            let got = log_abs_det_shifted(&h, z);
            assert!((want - got).abs() < 1e-10, "{want} vs {got}");
        }
    }

    #[test]
    fn shifted_logdet_detects_exact_singularity() {
        let mut h = CMatrix::zeros(3, 3);
        h[(0, 1)] = c(1.0, 0.0);
        h[(1, 2)] = c(1.0, 0.0);
        assert_eq!(log_abs_det_shifted(&h, c(0.0, 0.0)), f64::NEG_INFINITY);
    }
}
