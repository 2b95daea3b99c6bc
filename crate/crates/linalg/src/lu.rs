//! LU factorization with partial pivoting and log-determinants.
//!
//! The determinant is never formed: log-moduli of the pivots are accumulated
//! and the phase is carried separately, so `N = 1000` matrices with
//! exponentially small determinants are handled without underflow.

use num_complex::Complex64;

use crate::error::Result;
use crate::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `det = exp(log_abs) * phase`, with `log_abs = -inf` for singular input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    pub phase: Complex64,
}

/// `P A = L U` stored compactly; `perm[i]` is the row of `A` moved to row `i`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
    first_zero_pivot: Option<usize>,
}

pub fn lu(a: &CMatrix) -> Result<Lu> {
    let n = a.square_dim()?;
    a.check_finite()?;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let mut first_zero_pivot = None;
    for k in 0..n {
        let (p, pmag) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag == 0.0 {
            first_zero_pivot.get_or_insert(k);
            continue;
        }
        if p != k {
            let (rk, rp) = lu.two_rows_mut(k, p);
            rk.swap_with_slice(rp);
            perm.swap(k, p);
            swaps += 1;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let (rk, ri) = lu.two_rows_mut(k, i);
            if ri[k] == ZERO {
                continue;
            }
            let l = ri[k] / pivot;
            ri[k] = l;
            for (x, &u) in ri[k + 1..].iter_mut().zip(&rk[k + 1..]) {
                *x -= l * u;
            }
        }
    }
    Ok(Lu {
        lu,
        perm,
        swaps,
        first_zero_pivot,
    })
}

impl Lu {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn is_singular(&self) -> bool {
        self.first_zero_pivot.is_some()
    }

    pub fn first_zero_pivot(&self) -> Option<usize> {
        self.first_zero_pivot
    }

    pub fn pivots(&self) -> Vec<Complex64> {
        self.lu.diagonal()
    }

    pub fn log_abs_det(&self) -> f64 {
        if self.is_singular() {
            return f64::NEG_INFINITY;
        }
        (0..self.dim()).map(|i| self.lu[(i, i)].norm().ln()).sum()
    }

    pub fn log_det(&self) -> LogDet {
        if self.is_singular() {
            return LogDet {
                log_abs: f64::NEG_INFINITY,
                phase: ZERO,
            };
        }
        let mut phase = if self.swaps % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        };
        let mut log_abs = 0.0;
        for i in 0..self.dim() {
            let p = self.lu[(i, i)];
            let m = p.norm();
            log_abs += m.ln();
            phase *= p / m;
        }
        // Renormalize the accumulated unit phase.
        phase /= phase.norm();
        LogDet { log_abs, phase }
    }

    /// Solves `A x = b`; `None` when `A` is exactly singular.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        if self.is_singular() {
            return None;
        }
        let n = self.dim();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: Complex64 = row[..i].iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: Complex64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Some(x)
    }

    /// Solves `A^H x = b`; `None` when `A` is exactly singular.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        if self.is_singular() {
            return None;
        }
        let n = self.dim();
        // U^H y = b, column-oriented so U is read by rows.
        let mut y = b.to_vec();
        for i in 0..n {
            let row = self.lu.row(i);
            y[i] /= row[i].conj();
            let yi = y[i];
            for (yj, u) in y[i + 1..].iter_mut().zip(&row[i + 1..]) {
                *yj -= u.conj() * yi;
            }
        }
        // L^H w = y
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let wi = y[i];
            for (yj, l) in y[..i].iter_mut().zip(&row[..i]) {
                *yj -= l.conj() * wi;
            }
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Some(x)
    }
}

/// `log|det A|` via LU with partial pivoting; `-inf` on an exactly zero pivot.
pub fn log_abs_det(a: &CMatrix) -> Result<f64> {
    Ok(lu(a)?.log_abs_det())
}

pub fn log_det(a: &CMatrix) -> Result<LogDet> {
    Ok(lu(a)?.log_det())
}
