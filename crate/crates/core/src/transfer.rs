//! Transfer matrices of banded recurrences, Lyapunov spectra of their
//! products, and the bad-z detector for block-regularized matrices.

use nonnormal_linalg::{qr, CMatrix, C64};

use crate::error::{Error, Result};
use crate::limitlaw::{symbol_roots, SymbolAtX};
use crate::models::Block;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub matrix: CMatrix,
    pub block: usize,
    pub z: C64,
}

/// The `d x d` companion-form matrix for `t = (t_0, ..., t_d)`, `d = t.len() - 1`:
/// top row `(-t_{d-1}/t_d, ..., -t_1/t_d, (z - t_0)/t_d)`, identity below.
pub fn transfer_matrix(t: &[C64], z: C64, block: usize) -> Result<TransferMatrix> {
    if t.len() < 2 {
        return Err(Error::DegenerateSymbol);
    }
    let d = t.len() - 1;
    let lead = t[d];
    if lead == ZERO {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d - 1 {
        m[(0, k)] = -t[d - 1 - k] / lead;
    }
    m[(0, d - 1)] = (z - t[0]) / lead;
    for i in 1..d {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    Ok(TransferMatrix { matrix: m, block, z })
}

/// Transfer matrix at the effective degree of `t` at `z`.
pub fn transfer_matrix_trimmed(t: &[C64], z: C64, block: usize) -> Result<TransferMatrix> {
    let s = SymbolAtX::new(t, z);
    transfer_matrix(&t[..=s.effective_degree], z, block)
}

/// `(lambda^{d-1}, ..., lambda, 1)`.
pub fn root_vector(lambda: C64, d: usize) -> Vec<C64> {
    let mut v = vec![C64::new(1.0, 0.0); d];
    for i in (0..d.saturating_sub(1)).rev() {
        v[i] = v[i + 1] * lambda;
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSpectrum {
    /// Descending.
    pub exponents: Vec<f64>,
    pub length: usize,
    /// Jackknife standard error over 10 segments, aligned with `exponents`;
    /// `None` when the product is too short to split.
    pub std_error: Option<Vec<f64>>,
}

const SEGMENTS: usize = 10;

/// Lyapunov exponents of `T_{length-1} ... T_1 T_0`, where `next(k)` yields
/// `T_k`, by QR renormalization at every step.
pub fn lyapunov_spectrum<F>(mut next: F, length: usize) -> Result<LyapunovSpectrum>
where
    F: FnMut(usize) -> Result<CMatrix>,
{
    if length == 0 {
        return Err(crate::error::invalid("product length must be positive"));
    }
    let first = next(0)?;
    let d = first.square_dim()?;
    let mut frame = CMatrix::identity(d);
    let mut sums = vec![0.0; d];
    let seg_len = length / SEGMENTS;
    let mut segments: Vec<Vec<f64>> = Vec::new();
    let mut seg_acc = vec![0.0; d];
    let mut t = first;
    for k in 0..length {
        if k > 0 {
            t = next(k)?;
        }
        let f = qr(&(&t * &frame))?;
        for i in 0..d {
            let r = f.r[(i, i)].re;
            if r == 0.0 {
                return Err(Error::SingularTransfer { index: k });
            }
            let l = r.ln();
            sums[i] += l;
            seg_acc[i] += l;
        }
        frame = f.q;
        if seg_len > 0 && (k + 1) % seg_len == 0 && segments.len() < SEGMENTS {
            segments.push(seg_acc.iter().map(|s| s / seg_len as f64).collect());
            seg_acc.iter_mut().for_each(|s| *s = 0.0);
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]));
    let exponents = order.iter().map(|&i| sums[i] / length as f64).collect();
    let std_error = (seg_len >= 2 && segments.len() == SEGMENTS).then(|| {
        order
            .iter()
            .map(|&i| {
                let vals: Vec<f64> = segments.iter().map(|s| s[i]).collect();
                jackknife_se(&vals)
            })
            .collect()
    });
    Ok(LyapunovSpectrum {
        exponents,
        length,
        std_error,
    })
}

/// Jackknife standard error of the mean of `x`.
fn jackknife_se(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let total: f64 = x.iter().sum();
    let loo: Vec<f64> = x.iter().map(|v| (total - v) / (n - 1.0)).collect();
    let mean = loo.iter().sum::<f64>() / n;
    ((n - 1.0) / n * loo.iter().map(|v| (v - mean).powi(2)).sum::<f64>()).sqrt()
}

/// `sum (mu_i v 0) + log|a_d|` from the Lyapunov spectrum of the constant
/// transfer sequence; `log|a_0 - z|` for a degree-0 symbol.
pub fn thouless_logpot(a: &[C64], z: C64, length: usize) -> Result<f64> {
    let s = SymbolAtX::new(a, z);
    if s.effective_degree == 0 {
        return Ok(s.coeffs[0].norm().ln());
    }
    let t = transfer_matrix(&a[..=s.effective_degree], z, 0)?.matrix;
    let spec = lyapunov_spectrum(|_| Ok(t.clone()), length)?;
    Ok(spec.exponents.iter().map(|m| m.max(0.0)).sum::<f64>() + s.leading().norm().ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BadZReason {
    DiscriminantSmall,
    RootNearCircle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagnostic {
    pub block: usize,
    pub degree: usize,
    /// `log(|t_d|^{d-1} prod_{l < l'} |lambda_l - lambda_l'|^2)`.
    pub log_discriminant: f64,
    /// `min_l ||lambda_l| - 1|`.
    pub circle_distance: f64,
    pub reasons: Vec<BadZReason>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BadZReport {
    pub flagged: bool,
    pub reasons: Vec<BadZReason>,
    pub blocks: Vec<BlockDiagnostic>,
}

/// Flags `z` when some block has (i) a small scaled discriminant,
/// `|t_d|^{d-1} |det V|^2 <= N^{-2 delta1 band}`, or (ii) a root with modulus
/// within `N^{-3 delta1}` of 1.
pub fn bad_z_check(blocks: &[Block], z: C64, n: usize, delta1: f64) -> Result<BadZReport> {
    let nf = n as f64;
    let band = blocks.iter().map(|b| b.coeffs.len().saturating_sub(1)).max().unwrap_or(0);
    let disc_cap = -2.0 * delta1 * band as f64 * nf.ln();
    let ring = nf.powf(-3.0 * delta1);
    let mut out = Vec::new();
    let mut all = Vec::new();
    for b in blocks {
        let s = SymbolAtX::new(&b.coeffs, z);
        let d = s.effective_degree;
        if d == 0 {
            continue;
        }
        let roots = symbol_roots(&s)?.roots;
        let mut log_disc = (d as f64 - 1.0) * s.leading().norm().ln();
        for i in 0..d {
            for j in i + 1..d {
                log_disc += 2.0 * (roots[i] - roots[j]).norm().ln();
            }
        }
        let circle_distance = roots
            .iter()
            .map(|r| (r.norm() - 1.0).abs())
            .fold(f64::INFINITY, f64::min);
        let mut reasons = Vec::new();
        if log_disc <= disc_cap {
            reasons.push(BadZReason::DiscriminantSmall);
        }
        if circle_distance <= ring {
            reasons.push(BadZReason::RootNearCircle);
        }
        all.extend(reasons.iter().copied());
        out.push(BlockDiagnostic {
            block: b.index,
            degree: d,
            log_discriminant: log_disc,
            circle_distance,
            reasons,
        });
    }
    all.sort();
    all.dedup();
    Ok(BadZReport {
        flagged: !all.is_empty(),
        reasons: all,
        blocks: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn block(coeffs: Vec<C64>) -> Block {
        Block {
            index: 0,
            start: 0,
            end: 10,
            coeffs,
        }
    }

    #[test]
    fn scalar_transfer() {
        let t = transfer_matrix(&[c(0.5, 0.0), c(2.0, 0.0)], c(1.5, 1.0), 0).unwrap();
        assert_eq!(t.matrix.rows(), 1);
        assert!((t.matrix[(0, 0)] - c(0.5, 0.5)).norm() < 1e-15);
        assert_eq!(
            transfer_matrix(&[c(1.0, 0.0), ZERO], ZERO, 0),
            Err(Error::ZeroLeadingCoefficient)
        );
    }

    #[test]
    fn constant_product_exponents() {
        let t = CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 0.5]]);
        let s = lyapunov_spectrum(|_| Ok(t.clone()), 2000).unwrap();
        assert!((s.exponents[0] - 2f64.ln()).abs() < 1e-3);
        assert!((s.exponents[1] + 2f64.ln()).abs() < 1e-3);
        let id = CMatrix::identity(3);
        let s = lyapunov_spectrum(|_| Ok(id.clone()), 50).unwrap();
        assert!(s.exponents.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn scalar_sequence_telescopes() {
        let d = [0.3, -1.7, 2.2, 0.9, -0.4, 1.1];
        let z = c(0.1, 0.2);
        let s = lyapunov_spectrum(|k| Ok(CMatrix::from_diagonal(&[z - d[k]])), d.len()).unwrap();
        let want = d.iter().map(|x| (z - x).norm().ln()).sum::<f64>() / d.len() as f64;
        assert!((s.exponents[0] - want).abs() < 1e-15);
    }

    #[test]
    fn singular_step_reports_index() {
        let s = lyapunov_spectrum(
            |k| Ok(CMatrix::from_diagonal(&[if k == 3 { ZERO } else { c(1.0, 0.0) }])),
            10,
        );
        assert_eq!(s, Err(Error::SingularTransfer { index: 3 }));
    }

    #[test]
    fn thouless_examples() {
        let v = thouless_logpot(&[ZERO, c(1.0, 0.0)], c(2.0, 0.0), 100).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-3);
        let v = thouless_logpot(&[c(5.0, 0.0)], c(1.0, 0.0), 100).unwrap();
        assert!((v - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn bad_z_examples() {
        let lam = block(vec![ZERO, c(1.0, 0.0)]);
        let r = bad_z_check(std::slice::from_ref(&lam), c(0.6, 0.8), 1000, 0.01).unwrap();
        assert!(r.flagged && r.reasons == vec![BadZReason::RootNearCircle]);
        let r = bad_z_check(&[lam], c(5.0, 0.0), 1000, 0.01).unwrap();
        assert!(!r.flagged && r.reasons.is_empty());
        // lambda^2 - 2 lambda - z has the double root 1 at z = -1.
        let sq = block(vec![c(0.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]);
        let r = bad_z_check(&[sq], c(-1.0, 0.0), 1000, 0.01).unwrap();
        assert!(r.reasons.contains(&BadZReason::DiscriminantSmall));
    }
}
