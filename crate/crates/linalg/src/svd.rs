//! Singular values.
//!
//! The values-only path reduces to a complex bidiagonal matrix, rotates it to
//! the real bidiagonal of entry moduli, and runs the Demmel-Kahan implicit
//! QR iteration, which resolves tiny singular values to high relative
//! accuracy. Upper-triangular banded inputs use a Givens bulge-chasing
//! reduction that keeps the band. Singular vectors come from one-sided Jacobi.

use num_complex::Complex64;

use crate::eigen::givens;
use crate::error::{LinalgError, Result};
use crate::householder::{apply_left, apply_right, make_reflector};
use crate::matrix::{dot_c, norm2, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Singular values in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularValues {
    pub values: Vec<f64>,
    pub converged: bool,
}

impl SingularValues {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Non-decreasing copy.
    pub fn ascending(&self) -> Vec<f64> {
        self.values.iter().rev().copied().collect()
    }
}

pub fn singular_values(a: &CMatrix) -> Result<SingularValues> {
    let n = a.square_dim()?;
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    a.check_finite()?;
    let (d, e) = match upper_bandwidth(a) {
        Some(q) if q + 1 < n / 4 => band_bidiagonalize(a.clone(), q),
        _ => dense_bidiagonalize(a.clone()),
    };
    let mut d: Vec<f64> = d.iter().map(|z| z.norm()).collect();
    let mut e: Vec<f64> = e.iter().map(|z| z.norm()).collect();
    let converged = bidiagonal_qr(&mut d, &mut e);
    Ok(SingularValues {
        values: d,
        converged,
    })
}

/// Singular values of the real upper bidiagonal matrix with diagonal `d` and
/// superdiagonal `e` (`e.len() + 1 == d.len()`), in non-increasing order.
pub fn bidiagonal_singular_values(d: &[f64], e: &[f64]) -> Result<SingularValues> {
    if d.is_empty() {
        return Err(LinalgError::Empty);
    }
    if e.len() + 1 != d.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "superdiagonal of length {} for diagonal of length {}",
            e.len(),
            d.len()
        )));
    }
    if d.iter().chain(e).any(|x| !x.is_finite()) {
        return Err(LinalgError::InvalidArgument("non-finite bidiagonal entry".into()));
    }
    let mut d = d.to_vec();
    let mut e = e.to_vec();
    let converged = bidiagonal_qr(&mut d, &mut e);
    Ok(SingularValues {
        values: d,
        converged,
    })
}

/// `Some(q)` when `a` is upper triangular with `a[i][j] = 0` for `j > i + q`.
fn upper_bandwidth(a: &CMatrix) -> Option<usize> {
    let n = a.rows();
    let mut q = 0;
    for i in 0..n {
        let row = a.row(i);
        if row[..i].iter().any(|z| *z != ZERO) {
            return None;
        }
        if let Some(last) = row.iter().rposition(|z| *z != ZERO) {
            q = q.max(last.saturating_sub(i));
        }
    }
    Some(q)
}

fn dense_bidiagonalize(mut a: CMatrix) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = a.rows();
    let mut d = vec![ZERO; n];
    let mut e = vec![ZERO; n.saturating_sub(1)];
    let mut x = Vec::with_capacity(n);
    for k in 0..n {
        x.clear();
        x.extend((k..n).map(|i| a[(i, k)]));
        let (h, beta) = make_reflector(&x);
        d[k] = beta;
        if !h.is_identity() {
            for i in k + 1..n {
                a[(i, k)] = ZERO;
            }
            apply_left(&mut a, &h, h.tau.conj(), k, k + 1, n);
        }
        if k + 1 < n {
            // x^T H = beta e_1^T needs the reflector of conj(x).
            x.clear();
            x.extend(a.row(k)[k + 1..].iter().map(|z| z.conj()));
            let (h, beta) = make_reflector(&x);
            e[k] = beta;
            if !h.is_identity() {
                apply_right(&mut a, &h, h.tau, k + 1, n, k + 1);
            }
        }
    }
    (d, e)
}

/// Bidiagonalizes an upper-triangular matrix of upper bandwidth `q` with
/// Givens rotations, chasing each bulge off the bottom so the band is kept.
fn band_bidiagonalize(mut a: CMatrix, q: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = a.rows();
    for i in 0..n {
        let top = (i + q).min(n - 1);
        for j in (i + 2..=top).rev() {
            let (mut row, mut col) = (i, j);
            loop {
                // Right rotation on columns (col-1, col) to zero a[row][col].
                let (c, s, _) = givens(a[(row, col - 1)].conj(), a[(row, col)].conj());
                let sc = s.conj();
                let r0 = row;
                let r1 = col;
                for r in r0..=r1 {
                    let u = a[(r, col - 1)];
                    let v = a[(r, col)];
                    a[(r, col - 1)] = u * c + v * sc;
                    a[(r, col)] = v * c - u * s;
                }
                a[(row, col)] = ZERO;
                // The fill at (col, col-1) is removed by a left rotation.
                let (p, t) = (col - 1, col);
                let (c, s, r) = givens(a[(p, p)], a[(t, p)]);
                let c1 = (t + q + 1).min(n - 1);
                {
                    let (rp, rt) = a.two_rows_mut(p, t);
                    for k in p + 1..=c1 {
                        let u = rp[k];
                        let v = rt[k];
                        rp[k] = u * c + s * v;
                        rt[k] = v * c - s.conj() * u;
                    }
                    rp[p] = r;
                    rt[p] = ZERO;
                }
                let bulge = t + q;
                if bulge >= n || a[(p, bulge)] == ZERO {
                    break;
                }
                row = p;
                col = bulge;
            }
        }
    }
    let d = (0..n).map(|i| a[(i, i)]).collect();
    let e = (0..n - 1).map(|i| a[(i, i + 1)]).collect();
    (d, e)
}

/// Implicit zero-shift / shifted QR on a real upper bidiagonal matrix,
/// values only. On return `d` holds the singular values, sorted descending.
fn bidiagonal_qr(d: &mut [f64], e: &mut [f64]) -> bool {
    let n = d.len();
    let converged = if n > 1 { bdsqr(d, e) } else { true };
    for x in d.iter_mut() {
        *x = x.abs();
    }
    d.sort_by(|a, b| b.partial_cmp(a).unwrap());
    converged
}

fn bdsqr(d: &mut [f64], e: &mut [f64]) -> bool {
    const MAXITR: usize = 6;
    let n = d.len();
    let eps = f64::EPSILON / 2.0;
    let unfl = f64::MIN_POSITIVE;
    let tolmul = 10f64.max(100f64.min(eps.powf(-0.125)));
    let tol = tolmul * eps;
    let nf = n as f64;

    let mut sminoa = d[0].abs();
    if sminoa != 0.0 {
        let mut mu = sminoa;
        for i in 1..n {
            mu = d[i].abs() * (mu / (mu + e[i - 1].abs()));
            sminoa = sminoa.min(mu);
            if sminoa == 0.0 {
                break;
            }
        }
    }
    sminoa /= nf.sqrt();
    let thresh = (tol * sminoa).max(MAXITR as f64 * (nf * (nf * unfl)));

    let maxitdivn = MAXITR * n;
    let mut iterdivn = 0;
    let mut iter = 0usize;
    let mut oldll: isize = -1;
    let mut oldm: isize = -1;
    let mut idir = 0;
    let mut m = n - 1;

    'outer: while m > 0 {
        if iter >= n {
            iter -= n;
            iterdivn += 1;
            if iterdivn >= maxitdivn {
                return false;
            }
        }
        // Find the unreduced block ll..=m.
        let mut smax = d[m].abs();
        let mut split = None;
        for ll in (0..m).rev() {
            let abss = d[ll].abs();
            let abse = e[ll].abs();
            if abse <= thresh {
                split = Some(ll);
                break;
            }
            smax = smax.max(abss).max(abse);
        }
        let ll = match split {
            Some(s) => {
                e[s] = 0.0;
                if s == m - 1 {
                    m -= 1;
                    continue;
                }
                s + 1
            }
            None => 0,
        };

        if ll == m - 1 {
            let (smin, smx) = las2(d[m - 1], e[m - 1], d[m]);
            d[m - 1] = smx;
            e[m - 1] = 0.0;
            d[m] = smin;
            if m < 2 {
                break;
            }
            m -= 2;
            continue;
        }

        if ll as isize > oldm || (m as isize) < oldll {
            idir = if d[ll].abs() >= d[m].abs() { 1 } else { 2 };
        }

        let mut sminl;
        if idir == 1 {
            if e[m - 1].abs() <= tol * d[m].abs() {
                e[m - 1] = 0.0;
                continue;
            }
            let mut mu = d[ll].abs();
            sminl = mu;
            for l3 in ll..m {
                if e[l3].abs() <= tol * mu {
                    e[l3] = 0.0;
                    continue 'outer;
                }
                mu = d[l3 + 1].abs() * (mu / (mu + e[l3].abs()));
                sminl = sminl.min(mu);
            }
        } else {
            if e[ll].abs() <= tol * d[ll].abs() {
                e[ll] = 0.0;
                continue;
            }
            let mut mu = d[m].abs();
            sminl = mu;
            for l3 in (ll..m).rev() {
                if e[l3].abs() <= tol * mu {
                    e[l3] = 0.0;
                    continue 'outer;
                }
                mu = d[l3].abs() * (mu / (mu + e[l3].abs()));
                sminl = sminl.min(mu);
            }
        }
        oldll = ll as isize;
        oldm = m as isize;

        let mut shift;
        if nf * tol * (sminl / smax) <= eps.max(0.01 * tol) {
            shift = 0.0;
        } else {
            let sll;
            if idir == 1 {
                sll = d[ll].abs();
                shift = las2(d[m - 1], e[m - 1], d[m]).0;
            } else {
                sll = d[m].abs();
                shift = las2(d[ll], e[ll], d[ll + 1]).0;
            }
            if sll > 0.0 && (shift / sll) * (shift / sll) < eps {
                shift = 0.0;
            }
        }
        iter += m - ll;

        if shift == 0.0 {
            if idir == 1 {
                let mut cs = 1.0;
                let mut oldcs = 1.0;
                let mut oldsn = 0.0;
                for i in ll..m {
                    let (c1, sn, r) = lartg(d[i] * cs, e[i]);
                    cs = c1;
                    if i > ll {
                        e[i - 1] = oldsn * r;
                    }
                    let (oc, os, di) = lartg(oldcs * r, d[i + 1] * sn);
                    oldcs = oc;
                    oldsn = os;
                    d[i] = di;
                }
                let h = d[m] * cs;
                d[m] = h * oldcs;
                e[m - 1] = h * oldsn;
                if e[m - 1].abs() <= thresh {
                    e[m - 1] = 0.0;
                }
            } else {
                let mut cs = 1.0;
                let mut oldcs = 1.0;
                let mut oldsn = 0.0;
                for i in (ll + 1..=m).rev() {
                    let (c1, sn, r) = lartg(d[i] * cs, e[i - 1]);
                    cs = c1;
                    if i < m {
                        e[i] = oldsn * r;
                    }
                    let (oc, os, di) = lartg(oldcs * r, d[i - 1] * sn);
                    oldcs = oc;
                    oldsn = os;
                    d[i] = di;
                }
                let h = d[ll] * cs;
                d[ll] = h * oldcs;
                e[ll] = h * oldsn;
                if e[ll].abs() <= thresh {
                    e[ll] = 0.0;
                }
            }
        } else if idir == 1 {
            let mut f = (d[ll].abs() - shift) * (1f64.copysign(d[ll]) + shift / d[ll]);
            let mut g = e[ll];
            for i in ll..m {
                let (cosr, sinr, r) = lartg(f, g);
                if i > ll {
                    e[i - 1] = r;
                }
                f = cosr * d[i] + sinr * e[i];
                e[i] = cosr * e[i] - sinr * d[i];
                g = sinr * d[i + 1];
                d[i + 1] *= cosr;
                let (cosl, sinl, r) = lartg(f, g);
                d[i] = r;
                f = cosl * e[i] + sinl * d[i + 1];
                d[i + 1] = cosl * d[i + 1] - sinl * e[i];
                if i + 1 < m {
                    g = sinl * e[i + 1];
                    e[i + 1] *= cosl;
                }
            }
            e[m - 1] = f;
            if e[m - 1].abs() <= thresh {
                e[m - 1] = 0.0;
            }
        } else {
            let mut f = (d[m].abs() - shift) * (1f64.copysign(d[m]) + shift / d[m]);
            let mut g = e[m - 1];
            for i in (ll + 1..=m).rev() {
                let (cosr, sinr, r) = lartg(f, g);
                if i < m {
                    e[i] = r;
                }
                f = cosr * d[i] + sinr * e[i - 1];
                e[i - 1] = cosr * e[i - 1] - sinr * d[i];
                g = sinr * d[i - 1];
                d[i - 1] *= cosr;
                let (cosl, sinl, r) = lartg(f, g);
                d[i] = r;
                f = cosl * e[i - 1] + sinl * d[i - 1];
                d[i - 1] = cosl * d[i - 1] - sinl * e[i - 1];
                if i > ll + 1 {
                    g = sinl * e[i - 2];
                    e[i - 2] *= cosl;
                }
            }
            e[ll] = f;
            if e[ll].abs() <= thresh {
                e[ll] = 0.0;
            }
        }
    }
    true
}

/// Plane rotation with `[c s; -s c] [f; g] = [r; 0]`, `c >= 0`.
fn lartg(f: f64, g: f64) -> (f64, f64, f64) {
    if g == 0.0 {
        return (1.0, 0.0, f);
    }
    if f == 0.0 {
        return (0.0, g.signum(), g.abs());
    }
    let d = f.hypot(g);
    let c = f.abs() / d;
    let r = d.copysign(f);
    (c, g / r, r)
}

/// Singular values `(smin, smax)` of `[[f, g], [0, h]]`.
fn las2(f: f64, g: f64, h: f64) -> (f64, f64) {
    let fa = f.abs();
    let ga = g.abs();
    let ha = h.abs();
    let fhmn = fa.min(ha);
    let fhmx = fa.max(ha);
    if fhmn == 0.0 {
        if fhmx == 0.0 {
            return (0.0, ga);
        }
        let big = fhmx.max(ga);
        let small = fhmx.min(ga);
        return (0.0, big * (1.0 + (small / big) * (small / big)).sqrt());
    }
    if ga < fhmx {
        let as_ = 1.0 + fhmn / fhmx;
        let at = (fhmx - fhmn) / fhmx;
        let au = (ga / fhmx) * (ga / fhmx);
        let c = 2.0 / ((as_ * as_ + au).sqrt() + (at * at + au).sqrt());
        (fhmn * c, fhmx / c)
    } else {
        let au = fhmx / ga;
        if au == 0.0 {
            return ((fhmn * fhmx) / ga, ga);
        }
        let as_ = 1.0 + fhmn / fhmx;
        let at = (fhmx - fhmn) / fhmx;
        let c = 1.0 / ((1.0 + (as_ * au) * (as_ * au)).sqrt() + (1.0 + (at * au) * (at * au)).sqrt());
        let smin = 2.0 * (fhmn * c) * au;
        (smin, ga / (c + c))
    }
}

/// `A = U diag(s) V^H` with `s` non-increasing.
///
/// Columns of `u` paired with a zero singular value are left as zero vectors.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
    pub sweeps: usize,
}

/// One-sided Jacobi SVD. Cubic per sweep; meant for small and moderate `n`.
pub fn svd_jacobi(a: &CMatrix) -> Result<Svd> {
    let n = a.square_dim()?;
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    a.check_finite()?;
    // Work on columns stored as rows of the transpose for contiguous access.
    let mut w = a.transpose();
    let mut v = CMatrix::identity(n);
    let tol = f64::EPSILON * n as f64;
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (wp, wq) = w.two_rows_mut(p, q);
                let alpha = norm2(wp).powi(2);
                let beta = norm2(wq).powi(2);
                // gamma = a_p^H a_q, columns stored as rows here.
                let gamma = dot_c(wp, wq);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (xp, xq) in wp.iter_mut().zip(wq.iter_mut()) {
                    let bq = *xq * phase;
                    let ap = *xp;
                    *xp = ap * c - bq * s;
                    *xq = ap * s + bq * c;
                }
                let (vp, vq) = v.two_rows_mut(p, q);
                for (xp, xq) in vp.iter_mut().zip(vq.iter_mut()) {
                    let bq = *xq * phase;
                    let ap = *xp;
                    *xp = ap * c - bq * s;
                    *xq = ap * s + bq * c;
                }
            }
        }
        if !rotated || sweeps >= 60 {
            break;
        }
    }
    let mut order: Vec<(usize, f64)> = (0..n).map(|j| (j, norm2(w.row(j)))).collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let mut u = CMatrix::zeros(n, n);
    let mut vv = CMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        for i in 0..n {
            vv[(i, k)] = v[(j, i)];
            if sigma > 0.0 {
                u[(i, k)] = w[(j, i)] / sigma;
            }
        }
    }
    Ok(Svd {
        u,
        s,
        v: vv,
        sweeps,
    })
}
