//! Deterministic equivalent of the noisy log-determinant: truncation of the
//! smallest singular values and the `-alpha (gamma - 1/2)` correction.

use nonnormal_linalg::{log_abs_det, log_det, singular_values, CMatrix, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::models::{perturb, NoiseSpec};
use crate::rng::{task, Stream};

pub const DEFAULT_ETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationConfig {
    pub gamma: f64,
    /// `epsilon_N = N^-eta`.
    #[serde(default = "default_eta")]
    pub eta: f64,
}

fn default_eta() -> f64 {
    DEFAULT_ETA
}

impl TruncationConfig {
    pub fn new(gamma: f64, eta: f64) -> Result<Self> {
        let c = Self { gamma, eta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.5 && self.gamma.is_finite()) {
            return Err(invalid(format!("gamma must exceed 1/2, got {}", self.gamma)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(invalid(format!("eta must be positive, got {}", self.eta)));
        }
        Ok(())
    }

    pub fn epsilon(&self, n: usize) -> f64 {
        (n as f64).powf(-self.eta)
    }

    /// `epsilon^-1 N^-gamma sqrt(N - i + 1)` for the 1-based index `i`.
    pub fn threshold(&self, i: usize, n: usize) -> f64 {
        let nf = n as f64;
        nf.powf(self.eta - self.gamma) * ((n + 1 - i) as f64).sqrt()
    }
}

/// Largest 1-based `i` with `sigma_i < threshold(i)`, or 1 if there is none.
pub fn truncation_point(sigma_ascending: &[f64], cfg: &TruncationConfig) -> Result<usize> {
    cfg.validate()?;
    let n = sigma_ascending.len();
    if n == 0 {
        return Err(invalid("empty singular value list"));
    }
    if let Some(p) = sigma_ascending.windows(2).position(|w| !(w[0] <= w[1])) {
        return Err(Error::Unsorted(p + 1));
    }
    Ok((1..=n)
        .rev()
        .find(|&i| sigma_ascending[i - 1] < cfg.threshold(i, n))
        .unwrap_or(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationResult {
    pub n_star: usize,
    pub sigma_ascending: Vec<f64>,
    /// `sum_{i > N*} log sigma_i`.
    pub log_det_b: f64,
    /// `N* log N / N`.
    pub alpha_hat: f64,
    pub g_value: f64,
}

/// Truncation data from an ascending singular value list of `M - z`.
pub fn truncate(sigma_ascending: Vec<f64>, cfg: &TruncationConfig) -> Result<TruncationResult> {
    let n = sigma_ascending.len();
    let n_star = truncation_point(&sigma_ascending, cfg)?;
    let nf = n as f64;
    let alpha_hat = n_star as f64 * nf.ln() / nf;
    if sigma_ascending.iter().all(|&s| s == 0.0) {
        return Ok(TruncationResult {
            n_star,
            sigma_ascending,
            log_det_b: f64::NEG_INFINITY,
            alpha_hat,
            g_value: f64::NEG_INFINITY,
        });
    }
    let log_det_b: f64 = sigma_ascending[n_star..].iter().map(|s| s.ln()).sum();
    let g_value = log_det_b / nf - alpha_hat * (cfg.gamma - 0.5);
    Ok(TruncationResult {
        n_star,
        sigma_ascending,
        log_det_b,
        alpha_hat,
        g_value,
    })
}

/// `g_N(z)` for the noise-free matrix `m`.
pub fn g_value(m: &CMatrix, z: C64, cfg: &TruncationConfig) -> Result<TruncationResult> {
    cfg.validate()?;
    let s = singular_values(&m.shifted(z))?;
    truncate(s.ascending(), cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceRow {
    pub seed: u64,
    /// `(1/N) log|det(M + N^-gamma G - z)|`.
    pub logdet_empirical: f64,
    pub g_value: f64,
    /// `logdet_empirical - g_value`.
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub truncation: TruncationResult,
    pub rows: Vec<EquivalenceRow>,
    /// Mean and max of `|discrepancy|` over finite replicas.
    pub mean_abs_discrepancy: f64,
    pub max_abs_discrepancy: f64,
    /// Replicas whose perturbed matrix was exactly singular at `z`.
    pub singular_replicas: usize,
}

/// Compares the noisy log-determinant at `z` with `g_N(z)` for each seed.
pub fn equivalence_report(m: &CMatrix, z: C64, cfg: &TruncationConfig, seeds: &[u64]) -> Result<EquivalenceReport> {
    if seeds.is_empty() {
        return Err(invalid("at least one seed is required"));
    }
    let truncation = g_value(m, z, cfg)?;
    let n = m.rows() as f64;
    let g = truncation.g_value;
    let rows = seeds
        .par_iter()
        .map(|&seed| {
            let noisy = perturb(m, &NoiseSpec::new(cfg.gamma, seed)?)?;
            let l = log_abs_det(&noisy.shifted(z))? / n;
            Ok(EquivalenceRow {
                seed,
                logdet_empirical: l,
                g_value: g,
                discrepancy: l - g,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let finite: Vec<f64> = rows
        .iter()
        .filter(|r| r.logdet_empirical.is_finite())
        .map(|r| r.discrepancy.abs())
        .collect();
    let singular_replicas = rows.len() - finite.len();
    let (mean, max) = if finite.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (
            finite.iter().sum::<f64>() / finite.len() as f64,
            finite.iter().copied().fold(0.0, f64::max),
        )
    };
    Ok(EquivalenceReport {
        truncation,
        rows,
        mean_abs_discrepancy: mean,
        max_abs_discrepancy: max,
        singular_replicas,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchurExperimentReport {
    pub reps: usize,
    pub mean_ratio: C64,
    /// Complex sample variance `sum |r - mean|^2 / (reps - 1)`.
    pub variance: f64,
    pub std_error: f64,
    pub epsilon: f64,
    /// `epsilon^2 / (1 - epsilon^2)`.
    pub variance_bound: f64,
    /// `|mean - 1| <= 4 SE`.
    pub mean_ok: bool,
    /// `variance <= 1.5 bound`.
    pub variance_ok: bool,
}

/// Monte-Carlo estimate of `det(B + X) / det(B)` for `B = diag(b_diag)` and
/// `X` an `N_context^-gamma`-scaled Ginibre block. `b_diag` sits at the
/// 1-based positions `N_context - m + 1 ..= N_context` and must clear the
/// truncation threshold there.
pub fn schur_experiment(
    b_diag: &[f64],
    cfg: &TruncationConfig,
    n_context: usize,
    reps: usize,
    seed: u64,
) -> Result<SchurExperimentReport> {
    cfg.validate()?;
    if reps < 2 {
        return Err(invalid("schur_experiment needs at least 2 replicas"));
    }
    let m = b_diag.len();
    if m == 0 || m > n_context {
        return Err(invalid(format!("block size {m} must lie in 1..={n_context}")));
    }
    if let Some(k) = b_diag.windows(2).position(|w| !(w[0] <= w[1])) {
        return Err(Error::Unsorted(k + 1));
    }
    for (k, &b) in b_diag.iter().enumerate() {
        let i = n_context - m + 1 + k;
        let thr = cfg.threshold(i, n_context);
        if !(b >= thr) {
            return Err(invalid(format!("B entry {k} = {b} is below the threshold {thr}")));
        }
    }
    let scale = (n_context as f64).powf(-cfg.gamma);
    let log_det_b: f64 = b_diag.iter().map(|b| b.ln()).sum();
    let root = Stream::new(seed, task::SCHUR);
    let ratios = (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = root.child(r as u64);
            let mut a = CMatrix::from_fn(m, m, |i, j| s.complex_normal_at(2 * (i * m + j) as u64) * scale);
            for (i, &b) in b_diag.iter().enumerate() {
                a[(i, i)] += b;
            }
            let d = log_det(&a)?;
            Ok(d.phase * (d.log_abs - log_det_b).exp())
        })
        .collect::<Result<Vec<C64>>>()?;
    let mean = ratios.iter().sum::<C64>() / reps as f64;
    let variance = ratios.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / (reps - 1) as f64;
    let std_error = (variance / reps as f64).sqrt();
    let epsilon = cfg.epsilon(n_context);
    let variance_bound = epsilon * epsilon / (1.0 - epsilon * epsilon);
    Ok(SchurExperimentReport {
        reps,
        mean_ratio: mean,
        variance,
        std_error,
        epsilon,
        variance_bound,
        mean_ok: (mean - 1.0).norm() <= 4.0 * std_error,
        variance_ok: variance <= 1.5 * variance_bound,
    })
}

/// Smallest non-decreasing diagonal on positions `first..=n_context` whose
/// entries are at least `factor` times the truncation threshold. The
/// threshold decreases in the index, so this is constant.
pub fn threshold_diagonal(cfg: &TruncationConfig, n_context: usize, first: usize, factor: f64) -> Vec<f64> {
    let mut level = 0.0f64;
    (first..=n_context)
        .map(|i| {
            level = level.max(factor * cfg.threshold(i, n_context));
            level
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> TruncationConfig {
        TruncationConfig::new(1.0, 0.1).unwrap()
    }

    #[test]
    fn fallback_to_one() {
        assert_eq!(truncation_point(&[10.0; 100], &cfg()).unwrap(), 1);
        let mut j = vec![1.0; 100];
        j[0] = 0.0;
        assert_eq!(truncation_point(&j, &cfg()).unwrap(), 1);
    }

    #[test]
    fn unsorted_is_rejected() {
        assert_eq!(truncation_point(&[1.0, 0.5, 2.0], &cfg()), Err(Error::Unsorted(1)));
    }

    #[test]
    fn scaled_identity() {
        let n = 50;
        let m = CMatrix::identity(n).scaled(C64::new(5.0, 0.0));
        let t = g_value(&m, C64::new(0.0, 0.0), &cfg()).unwrap();
        assert_eq!(t.n_star, 1);
        let nf = n as f64;
        let want = (nf - 1.0) / nf * 5f64.ln() - nf.ln() / nf * 0.5;
        assert!((t.g_value - want).abs() < 1e-12);
    }

    #[test]
    fn schur_rejects_single_replica() {
        assert!(schur_experiment(&[1e6], &cfg(), 100, 1, 0).is_err());
    }

    #[test]
    fn schur_dominant_block() {
        let r = schur_experiment(&[1e6], &TruncationConfig::new(1.0, 0.1).unwrap(), 100, 20, 5).unwrap();
        assert!((r.mean_ratio - 1.0).norm() < 1e-4);
    }
}
