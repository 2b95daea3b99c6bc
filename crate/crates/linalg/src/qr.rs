//! Householder QR of square or tall matrices.

use num_complex::Complex64;

use crate::error::{LinalgError, Result};
use crate::householder::{apply_left, make_reflector, Reflector};
use crate::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Thin factorization `A = Q R` with `Q` (m x n) having orthonormal columns
/// and `R` (n x n) upper triangular with a real non-negative diagonal.
#[derive(Debug, Clone)]
pub struct Qr {
    pub q: CMatrix,
    pub r: CMatrix,
}

pub fn qr(a: &CMatrix) -> Result<Qr> {
    let (m, n) = (a.rows(), a.cols());
    if n == 0 || m == 0 {
        return Err(LinalgError::Empty);
    }
    if m < n {
        return Err(LinalgError::DimensionMismatch(format!(
            "QR needs rows >= cols, got {m}x{n}"
        )));
    }
    a.check_finite()?;
    let mut w = a.clone();
    let mut refl: Vec<Reflector> = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(m);
    for k in 0..n {
        x.clear();
        x.extend((k..m).map(|i| w[(i, k)]));
        let (h, beta) = make_reflector(&x);
        w[(k, k)] = beta;
        for i in k + 1..m {
            w[(i, k)] = ZERO;
        }
        apply_left(&mut w, &h, h.tau.conj(), k, k + 1, n);
        refl.push(h);
    }
    let mut r = CMatrix::from_fn(n, n, |i, j| if j >= i { w[(i, j)] } else { ZERO });
    // Q = H_0 H_1 ... H_{n-1} applied to the leading identity columns.
    let mut q = CMatrix::from_fn(m, n, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { ZERO });
    for (k, h) in refl.iter().enumerate().rev() {
        apply_left(&mut q, h, h.tau, k, k, n);
    }
    for i in 0..n {
        let d = r[(i, i)];
        let mag = d.norm();
        if mag == 0.0 || (d.im == 0.0 && d.re > 0.0) {
            continue;
        }
        let ph = d / mag;
        for x in &mut r.row_mut(i)[i..] {
            *x *= ph.conj();
        }
        r[(i, i)] = Complex64::new(mag, 0.0);
        for row in 0..m {
            q[(row, i)] *= ph;
        }
    }
    Ok(Qr { q, r })
}
