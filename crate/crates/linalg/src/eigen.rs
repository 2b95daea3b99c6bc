//! Eigenvalues of general complex matrices.
//!
//! Householder reduction to Hessenberg form, then the implicit single-shift
//! QR iteration on the active window with Wilkinson shifts and occasional
//! exceptional shifts. Only eigenvalues are computed.

use num_complex::Complex64;

use crate::error::{LinalgError, Result};
use crate::hessenberg::reduce_in_place;
use crate::matrix::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Diagonal similarity scaling before the reduction.
    pub balance: bool,
    /// QR sweeps allowed per eigenvalue; the budget is shared across the matrix.
    pub sweeps_per_eigenvalue: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            balance: true,
            sweeps_per_eigenvalue: 40,
        }
    }
}

/// Eigenvalues with algebraic multiplicity, in deflation order.
///
/// When the sweep budget runs out `converged` is false and the entries of the
/// unconverged window are its current diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn eigenvalues(a: &CMatrix) -> Result<EigenResult> {
    eigenvalues_with(a, EigenOptions::default())
}

pub fn eigenvalues_with(a: &CMatrix, opts: EigenOptions) -> Result<EigenResult> {
    let n = a.square_dim()?;
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    a.check_finite()?;
    let mut h = a.clone();
    if opts.balance {
        balance(&mut h);
    }
    reduce_in_place(&mut h, n);
    Ok(hessenberg_qr(h, opts.sweeps_per_eigenvalue * n))
}

/// Parlett-Reinsch scaling by powers of two; leaves the spectrum exactly
/// unchanged and reduces the norm of badly scaled inputs.
fn balance(a: &mut CMatrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sfmin = f64::MIN_POSITIVE / f64::EPSILON;
    let sfmax = 1.0 / sfmin;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].l1_norm();
                    r += a[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut g = r / RADIX;
            let mut f = 1.0;
            while c < g && f < sfmax && c < sfmax {
                f *= RADIX;
                c *= RADIX * RADIX;
                g /= RADIX;
            }
            g = r * RADIX;
            while c > g && f > sfmin && c > sfmin {
                f /= RADIX;
                c /= RADIX * RADIX;
                g *= RADIX;
            }
            if (c + r) / f >= 0.95 * s {
                continue;
            }
            done = false;
            for x in a.row_mut(i) {
                *x /= f;
            }
            for j in 0..n {
                a[(j, i)] *= f;
            }
        }
    }
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with
/// `G [x; y] = [r; 0]` and `c` real.
#[inline]
pub(crate) fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO, x);
    }
    let ax = x.norm();
    let norm = ax.hypot(y.norm());
    if ax == 0.0 {
        let s = y.conj() / y.norm();
        return (0.0, s, Complex64::new(y.norm(), 0.0));
    }
    let alpha = x / ax;
    let c = ax / norm;
    let s = alpha * y.conj() / norm;
    (c, s, alpha * norm)
}

/// Runs the shifted QR iteration on an upper Hessenberg matrix.
pub(crate) fn hessenberg_qr(mut h: CMatrix, budget: usize) -> EigenResult {
    let n = h.rows();
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let mut values = vec![ZERO; n];
    let mut total = 0usize;
    let mut i = n as isize - 1;
    while i >= 0 {
        let iu = i as usize;
        let mut its = 0usize;
        let l = loop {
            let l = find_deflation(&h, iu, ulp, smlnum);
            if l > 0 {
                h[(l, l - 1)] = ZERO;
            }
            if l >= iu {
                break Some(l);
            }
            if total >= budget {
                break None;
            }
            let shift = choose_shift(&h, l, iu, its);
            qr_sweep(&mut h, l, iu, shift);
            its += 1;
            total += 1;
        };
        match l {
            Some(_) => {
                values[iu] = h[(iu, iu)];
                i -= 1;
            }
            None => {
                for k in 0..=iu {
                    values[k] = h[(k, k)];
                }
                return EigenResult {
                    values,
                    iterations: total,
                    converged: false,
                };
            }
        }
    }
    EigenResult {
        values,
        iterations: total,
        converged: true,
    }
}

/// Lowest row `l` of the unreduced block ending at `i`.
fn find_deflation(h: &CMatrix, i: usize, ulp: f64, smlnum: f64) -> usize {
    let mut k = i;
    while k > 0 {
        let sub = h[(k, k - 1)].l1_norm();
        if sub <= smlnum {
            break;
        }
        let mut tst = h[(k - 1, k - 1)].l1_norm() + h[(k, k)].l1_norm();
        if tst == 0.0 {
            if k >= 2 {
                tst += h[(k - 1, k - 2)].l1_norm();
            }
            if k < i {
                tst += h[(k + 1, k)].l1_norm();
            }
        }
        if sub <= ulp * tst {
            // Ahues & Tisseur conservative test.
            let up = h[(k - 1, k)].l1_norm();
            let ab = sub.max(up);
            let ba = sub.min(up);
            let d = (h[(k - 1, k - 1)] - h[(k, k)]).l1_norm();
            let hk = h[(k, k)].l1_norm();
            let aa = hk.max(d);
            let bb = hk.min(d);
            let s = aa + ab;
            if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                break;
            }
        }
        k -= 1;
    }
    k
}

fn choose_shift(h: &CMatrix, l: usize, i: usize, its: usize) -> Complex64 {
    if its > 0 && its % 10 == 0 {
        if its % 20 == 10 {
            let s = 0.75 * h[(l + 1, l)].l1_norm();
            return h[(l, l)] + s;
        }
        let s = 0.75 * h[(i, i - 1)].l1_norm();
        return h[(i, i)] + s;
    }
    // Eigenvalue of the trailing 2x2 block closer to h[i][i].
    let t = h[(i, i)];
    let u = h[(i - 1, i)].sqrt() * h[(i, i - 1)].sqrt();
    let su = u.l1_norm();
    if su == 0.0 {
        return t;
    }
    let x = (h[(i - 1, i - 1)] - t) * 0.5;
    let sx = x.l1_norm();
    let s = su.max(sx);
    let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
    if sx > 0.0 {
        let xs = x / sx;
        if xs.re * y.re + xs.im * y.im < 0.0 {
            y = -y;
        }
    }
    let den = x + y;
    if den == ZERO {
        return t;
    }
    t - u * (u / den)
}

/// One implicit single-shift QR sweep over rows and columns `l..=i`.
fn qr_sweep(h: &mut CMatrix, l: usize, i: usize, shift: Complex64) {
    for k in l..i {
        let (x, y) = if k == l {
            (h[(l, l)] - shift, h[(l + 1, l)])
        } else {
            (h[(k, k - 1)], h[(k + 1, k - 1)])
        };
        let (c, s, r) = givens(x, y);
        if k > l {
            h[(k, k - 1)] = r;
            h[(k + 1, k - 1)] = ZERO;
        }
        {
            let (rk, rk1) = h.two_rows_mut(k, k + 1);
            for j in k..=i {
                let a = rk[j];
                let b = rk1[j];
                rk[j] = a * c + s * b;
                rk1[j] = b * c - s.conj() * a;
            }
        }
        let sc = s.conj();
        for r in l..=(k + 2).min(i) {
            let a = h[(r, k)];
            let b = h[(r, k + 1)];
            h[(r, k)] = a * c + b * sc;
            h[(r, k + 1)] = b * c - a * s;
        }
    }
}
