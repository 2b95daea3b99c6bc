//! Elementary Householder reflectors `H = I - tau v v^H` with `v[0] = 1`.
//!
//! Reflectors are applied only over the nonzero support of `v`, so reducing a
//! banded or triangular matrix costs proportionally to its band.

use num_complex::Complex64;

use crate::matrix::{norm2, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A reflector produced by [`make_reflector`]; `v` excludes the implicit
/// leading one and is trimmed of trailing zeros.
#[derive(Debug, Clone)]
pub struct Reflector {
    pub tau: Complex64,
    pub v: Vec<Complex64>,
}

impl Reflector {
    #[inline]
    pub fn is_identity(&self) -> bool {
        self.tau == ZERO
    }

    /// Length of the support including the leading one.
    #[inline]
    pub fn len(&self) -> usize {
        self.v.len() + 1
    }

    #[inline]
    fn comp(&self, i: usize) -> Complex64 {
        if i == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            self.v[i - 1]
        }
    }
}

/// Computes `H` with `H^H x = beta e_1`.
///
/// When the tail of `x` is exactly zero no reflection is performed and `beta`
/// is `x[0]` unchanged (possibly complex); otherwise `beta` is real. Skipping
/// keeps already-reduced structure bit-exact.
pub fn make_reflector(x: &[Complex64]) -> (Reflector, Complex64) {
    let alpha = x[0];
    let tail = &x[1..];
    let last = tail.iter().rposition(|z| *z != ZERO);
    let Some(last) = last else {
        return (Reflector { tau: ZERO, v: Vec::new() }, alpha);
    };
    let tail = &tail[..=last];
    let xnorm = norm2(tail);
    let mag = hypot3(alpha.re, alpha.im, xnorm);
    let beta = if alpha.re >= 0.0 { -mag } else { mag };
    let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
    let scale = Complex64::new(1.0, 0.0) / (alpha - beta);
    let v = tail.iter().map(|&t| t * scale).collect();
    (Reflector { tau, v }, Complex64::new(beta, 0.0))
}

fn hypot3(a: f64, b: f64, c: f64) -> f64 {
    let m = a.abs().max(b.abs()).max(c.abs());
    if m == 0.0 {
        return 0.0;
    }
    let (a, b, c) = (a / m, b / m, c / m);
    m * (a * a + b * b + c * c).sqrt()
}

/// `A[r0.., c0..c1] <- (I - t v v^H) A[r0.., c0..c1]` where `t` is passed
/// explicitly (callers use `conj(tau)` to apply `H^H`).
pub fn apply_left(a: &mut CMatrix, h: &Reflector, t: Complex64, r0: usize, c0: usize, c1: usize) {
    if h.is_identity() || c0 >= c1 {
        return;
    }
    let width = c1 - c0;
    let mut w = vec![ZERO; width];
    for i in 0..h.len() {
        let vi = h.comp(i).conj();
        let row = &a.row(r0 + i)[c0..c1];
        for (wj, &aij) in w.iter_mut().zip(row) {
            *wj += vi * aij;
        }
    }
    for i in 0..h.len() {
        let f = t * h.comp(i);
        let row = &mut a.row_mut(r0 + i)[c0..c1];
        for (aij, &wj) in row.iter_mut().zip(&w) {
            *aij -= f * wj;
        }
    }
}

/// `A[r0..r1, c0..] <- A[r0..r1, c0..] (I - t v v^H)`.
pub fn apply_right(a: &mut CMatrix, h: &Reflector, t: Complex64, r0: usize, r1: usize, c0: usize) {
    if h.is_identity() {
        return;
    }
    let len = h.len();
    for r in r0..r1 {
        let row = &mut a.row_mut(r)[c0..c0 + len];
        let mut s = row[0];
        for (x, &vj) in row[1..].iter().zip(&h.v) {
            s += *x * vj;
        }
        if s == ZERO {
            continue;
        }
        let f = t * s;
        row[0] -= f;
        for (x, &vj) in row[1..].iter_mut().zip(&h.v) {
            *x -= f * vj.conj();
        }
    }
}
