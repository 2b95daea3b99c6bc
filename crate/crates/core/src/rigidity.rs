//! Small singular values of bidiagonal matrices `D + J`: partial diagonal
//! products, explicit near-kernel vectors on a block partition, the block
//! constants that control them, partition constructions, and the two-sided
//! check on the product of the smallest singular values.
//!
//! Indices follow the 1-based convention of the diagonal `d_1, ..., d_N`;
//! a partition `0 = i_1 < ... < i_{L+1} = N` has blocks `(i_j, i_{j+1}]`.

use nonnormal_linalg::{norm2, qr, singular_values, svd_jacobi, CMatrix, C64};

use crate::error::{invalid, Error, Result};
use crate::models::build_bidiagonal;
use crate::rng::{task, Stream};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// `exp(log_abs) * phase`; an exact zero has `log_abs = -inf`, `phase = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProduct {
    pub log_abs: f64,
    pub phase: C64,
}

impl LogProduct {
    pub fn value(&self) -> C64 {
        if self.log_abs == f64::NEG_INFINITY {
            ZERO
        } else {
            self.phase * self.log_abs.exp()
        }
    }
}

fn accumulate(factors: impl Iterator<Item = C64>) -> LogProduct {
    let mut log_abs = 0.0;
    let mut phase = ONE;
    for x in factors {
        let m = x.norm();
        if m == 0.0 {
            return LogProduct {
                log_abs: f64::NEG_INFINITY,
                phase: ZERO,
            };
        }
        log_abs += m.ln();
        phase *= x / m;
    }
    if phase != ONE {
        phase /= phase.norm();
    }
    LogProduct { log_abs, phase }
}

/// `prod_{i <= l < j} d_l` for `1 <= i <= j <= N + 1`.
pub fn dprod(d: &[C64], i: usize, j: usize) -> Result<LogProduct> {
    let n = d.len();
    if i < 1 || i > j || j > n + 1 {
        return Err(Error::OutOfRange(format!("dprod({i}, {j}) with N = {n}")));
    }
    Ok(accumulate(d[i - 1..j - 1].iter().copied()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    /// `0 = i_1 < ... < i_{L+1} = N`.
    pub boundaries: Vec<usize>,
}

impl BlockPartition {
    pub fn new(boundaries: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("partition of an empty index set"));
        }
        if boundaries.first() != Some(&0) || boundaries.last() != Some(&n) {
            return Err(invalid(format!("boundaries must run from 0 to {n}")));
        }
        if let Some(p) = boundaries.windows(2).position(|w| w[0] >= w[1]) {
            return Err(invalid(format!("boundaries not strictly increasing at {p}")));
        }
        Ok(Self { boundaries })
    }

    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![0, n], n)
    }

    /// Boundaries `0, cut_1, ..., N` from arbitrary cut points; cuts outside
    /// `(0, N)` are dropped.
    pub fn from_cuts(mut cuts: Vec<usize>, n: usize) -> Result<Self> {
        cuts.retain(|&c| c > 0 && c < n);
        cuts.sort_unstable();
        cuts.dedup();
        let mut b = Vec::with_capacity(cuts.len() + 2);
        b.push(0);
        b.extend(cuts);
        b.push(n);
        Self::new(b, n)
    }

    pub fn n(&self) -> usize {
        *self.boundaries.last().expect("validated")
    }

    /// Number of blocks `L`.
    pub fn len(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(i_j, i_{j+1})` pairs.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.boundaries.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn max_block_len(&self) -> usize {
        self.blocks().map(|(a, b)| b - a).max().unwrap_or(0)
    }
}

/// Near-kernel vector `v^{i,j}` of `D + J` supported on `i..=j` (1-based),
/// stored as log-moduli and phases so long blocks cannot overflow.
///
/// Entries are partial products of `-d`: `v_k = prod_{i <= l < k} (-d_l)`.
/// With this sign `(D + J) v` vanishes inside the block; the moduli equal
/// `|D^{i,k}|`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVector {
    pub first: usize,
    pub last: usize,
    pub log_moduli: Vec<f64>,
    pub phases: Vec<C64>,
    /// `log ||v||_2`.
    pub log_norm: f64,
}

impl WitnessVector {
    pub fn new(d: &[C64], first: usize, last: usize) -> Result<Self> {
        if first < 1 || first > last || last > d.len() {
            return Err(Error::OutOfRange(format!("witness support {first}..={last}, N = {}", d.len())));
        }
        let len = last - first + 1;
        let mut log_moduli = Vec::with_capacity(len);
        let mut phases = Vec::with_capacity(len);
        let (mut la, mut ph) = (0.0f64, ONE);
        for k in first..=last {
            log_moduli.push(la);
            phases.push(ph);
            let x = -d[k - 1];
            let m = x.norm();
            if m == 0.0 {
                la = f64::NEG_INFINITY;
                ph = ZERO;
            } else if la.is_finite() {
                la += m.ln();
                ph *= x / m;
            }
        }
        let log_norm = log_norm2(&log_moduli);
        Ok(Self {
            first,
            last,
            log_moduli,
            phases,
            log_norm,
        })
    }

    /// Entries on the support.
    pub fn values(&self) -> Vec<C64> {
        self.log_moduli
            .iter()
            .zip(&self.phases)
            .map(|(l, p)| if l.is_finite() { p * l.exp() } else { ZERO })
            .collect()
    }

    /// The unit vector `w = v / ||v||` on the support.
    pub fn normalized(&self) -> Vec<C64> {
        self.log_moduli
            .iter()
            .zip(&self.phases)
            .map(|(l, p)| if l.is_finite() { p * (l - self.log_norm).exp() } else { ZERO })
            .collect()
    }

    /// `w` embedded in `C^N`.
    pub fn embedded(&self, n: usize) -> Vec<C64> {
        let mut out = vec![ZERO; n];
        out[self.first - 1..self.last].copy_from_slice(&self.normalized());
        out
    }
}

/// `log sqrt(sum exp(2 l_k))`.
fn log_norm2(log_moduli: &[f64]) -> f64 {
    let m = log_moduli.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = log_moduli.iter().map(|l| (2.0 * (l - m)).exp()).sum();
    m + 0.5 * s.ln()
}

/// One witness vector per block of the partition.
pub fn witness_vectors(d: &[C64], partition: &BlockPartition) -> Result<Vec<WitnessVector>> {
    if partition.n() != d.len() {
        return Err(invalid("partition size does not match the diagonal"));
    }
    partition.blocks().map(|(a, b)| WitnessVector::new(d, a + 1, b)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DBounds {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// `max_j min(plus_j, minus_j)`.
    pub dfrak: f64,
}

/// Largest `sum_{p=s}^{r} (|D^{p,r}| + |D^{s,p}|)` over `first <= s <= r <= last`,
/// with every `|d_l|` replaced by `m(l)`.
fn block_sup(d: &[C64], first: usize, last: usize, m: impl Fn(C64) -> f64) -> f64 {
    let mut best: f64 = 0.0;
    for s in first..=last {
        // head = sum_p |D^{p,r}|, tail = sum_p |D^{s,p}|, last_prod = |D^{s,r}|.
        let (mut head, mut tail, mut last_prod) = (1.0f64, 1.0f64, 1.0f64);
        best = best.max(head + tail);
        for r in s..last {
            let a = m(d[r - 1]);
            head = head * a + 1.0;
            last_prod *= a;
            tail += last_prod;
            best = best.max(head + tail);
        }
    }
    best
}

pub fn d_bounds(d: &[C64], partition: &BlockPartition) -> Result<DBounds> {
    if partition.n() != d.len() {
        return Err(invalid("partition size does not match the diagonal"));
    }
    let mut plus = Vec::with_capacity(partition.len());
    let mut minus = Vec::with_capacity(partition.len());
    for (a, b) in partition.blocks() {
        plus.push(block_sup(d, a + 1, b, |x| x.norm()));
        minus.push(block_sup(d, a + 1, b, |x| 1.0 / x.norm()));
    }
    let dfrak = plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| p.min(*m))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DBounds { plus, minus, dfrak })
}

/// Regular cut points `floor(N^delta k)`, `k = 1..=floor(N^(1-delta))`.
pub fn regular_cuts(n: usize, delta: f64) -> Vec<usize> {
    let nf = n as f64;
    let count = nf.powf(1.0 - delta).floor() as usize;
    let step = nf.powf(delta);
    (1..=count).map(|k| (step * k as f64).floor() as usize).collect()
}

/// Partition for an i.i.d. diagonal: the regular grid plus `{x, x + 1}` for
/// every `x` in the set `G` of indices where some window product
/// `prod (|d_i|^-beta / p_beta)` containing `x` as an end reaches `N^(2 delta)`.
/// Windows are capped at length `N^delta log N`. A negative `beta` gives the
/// variant for `E log|d| < 0`, with `p_beta = E|d|^|beta|`.
pub fn iid_partition(d: &[C64], delta: f64, beta: f64, p_beta: f64) -> Result<BlockPartition> {
    let n = d.len();
    if n == 0 {
        return Err(invalid("empty diagonal"));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("delta = {delta} outside (0, 1/2)")));
    }
    if !(p_beta > 0.0 && p_beta.is_finite()) || beta == 0.0 || !beta.is_finite() {
        return Err(invalid("beta must be non-zero and p_beta positive"));
    }
    if n < 2 {
        return BlockPartition::single(n);
    }
    let nf = n as f64;
    let level = 2.0 * delta * nf.ln();
    let width = ((nf.powf(delta) * nf.ln()).ceil() as usize).clamp(1, n);
    let lp = p_beta.ln();
    // A zero entry gives +inf (beta > 0) or -inf (beta < 0); all infinities
    // share a sign, so running sums stay well defined.
    let logs: Vec<f64> = d.iter().map(|x| -beta * x.norm().ln() - lp).collect();
    let reaches = |range: &mut dyn Iterator<Item = usize>| {
        let mut s = 0.0;
        for k in range {
            s += logs[k];
            if s >= level {
                return true;
            }
        }
        false
    };
    let mut cuts = regular_cuts(n, delta);
    for j in 0..n {
        let hi = (j + width - 1).min(n - 1);
        let lo = j.saturating_sub(width - 1);
        if reaches(&mut (j..=hi)) || reaches(&mut (lo..=j).rev()) {
            cuts.push(j + 1);
            cuts.push(j + 2);
        }
    }
    BlockPartition::from_cuts(cuts, n)
}

/// Partition from the sign changes of `log|f(k/N)|` across `+-N^-delta`,
/// merged with the regular grid. Returns a warning when `f` vanishes on the
/// whole grid and only the regular grid is used.
pub fn holder_partition<F>(f: F, n: usize, delta: f64) -> Result<(BlockPartition, Option<String>)>
where
    F: Fn(f64) -> C64,
{
    if n == 0 {
        return Err(invalid("empty index set"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta = {delta} outside (0, 1)")));
    }
    let nf = n as f64;
    let logf: Vec<f64> = (1..=n).map(|k| f(k as f64 / nf).norm().ln()).collect();
    let mut cuts = regular_cuts(n, delta);
    if logf.iter().all(|&l| l == f64::NEG_INFINITY) {
        let p = BlockPartition::from_cuts(cuts, n)?;
        return Ok((p, Some("profile vanishes on the grid; using the regular partition".into())));
    }
    let h = nf.powf(-delta);
    let mut a = 1usize;
    cuts.push(a);
    loop {
        let cur = logf[a - 1];
        let next = (a + 1..=n).find(|&k| {
            let l = logf[k - 1];
            if cur < 0.0 {
                l > h
            } else if cur > 0.0 {
                l < -h
            } else {
                l.abs() > h
            }
        });
        match next {
            Some(k) => {
                cuts.push(k);
                a = k;
            }
            None => break,
        }
    }
    Ok((BlockPartition::from_cuts(cuts, n)?, None))
}

/// Constant in the lower bound of the sandwich.
pub const SANDWICH_CONSTANT: f64 = 8.0;

/// Upper-bound slack on the relative scale.
pub const UPPER_SLACK: f64 = 1e-8;

/// Dimension cap for the exact singular value oracle.
pub const THEOREM31_MAX_N: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem31Report {
    pub n: usize,
    pub blocks: usize,
    /// `sigma_{N-L}` (descending order, 1-based); `None` when `L = N`.
    pub sigma_nl: Option<f64>,
    pub dfrak: f64,
    /// `||D + J||`.
    pub norm: f64,
    /// `log` of the product of the `L` smallest singular values.
    pub log_sigma_product: f64,
    /// `log prod_k ||pi_k M w^k||`.
    pub log_witness_product: f64,
    /// `log` of `(8 (||M|| v 1) D sqrt(L))^-L prod_k ||pi_k M w^k||`.
    pub log_lower_bound: f64,
    pub gap_ok: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub converged: bool,
}

impl Theorem31Report {
    pub fn pass(&self) -> bool {
        self.gap_ok && self.lower_ok && self.upper_ok && self.converged
    }
}

/// Checks both sides of the sandwich on the `L` smallest singular values of
/// `D + J` and the gap `sigma_{N-L} >= 1 / D` against exact singular values.
pub fn theorem31_check(d: &[C64], partition: &BlockPartition) -> Result<Theorem31Report> {
    let n = d.len();
    if n > THEOREM31_MAX_N {
        return Err(invalid(format!("N = {n} exceeds {THEOREM31_MAX_N}")));
    }
    let bounds = d_bounds(d, partition)?;
    let m = build_bidiagonal(d);
    let sv = singular_values(&m)?;
    let l = partition.len();
    let norm = sv.largest();
    let sigma_nl = (l < n).then(|| sv.values[n - l - 1]);
    let log_sigma_product: f64 = sv.values[n - l..].iter().map(|s| s.ln()).sum();
    let witnesses = witness_vectors(d, partition)?;
    let mut log_witness_product = 0.0;
    for (w, (_, b)) in witnesses.iter().zip(partition.blocks()) {
        log_witness_product += dprod(d, w.first, b + 1)?.log_abs - w.log_norm;
    }
    let c = SANDWICH_CONSTANT * norm.max(1.0) * bounds.dfrak * (l as f64).sqrt();
    let log_lower_bound = log_witness_product - l as f64 * c.ln();
    let gap_ok = sigma_nl.map_or(true, |s| s >= 1.0 / bounds.dfrak);
    let lower_ok = log_lower_bound <= log_sigma_product;
    let upper_ok = log_sigma_product <= log_witness_product + UPPER_SLACK.ln_1p();
    Ok(Theorem31Report {
        n,
        blocks: l,
        sigma_nl,
        dfrak: bounds.dfrak,
        norm,
        log_sigma_product,
        log_witness_product,
        log_lower_bound,
        gap_ok,
        lower_ok,
        upper_ok,
        converged: sv.converged,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameProductReport {
    /// `min` over frames of `prod_i ||A xi_i||`.
    pub infimum: f64,
    /// The product for the right-singular frame (trial 0).
    pub singular_frame: f64,
    /// Product of the `k` smallest singular values.
    pub sigma_product: f64,
    pub trials: usize,
}

/// Minimum over orthonormal `k`-frames of `prod ||A xi_i||`: trial 0 is the
/// right-singular frame of the `k` smallest singular values, the other
/// trials are QR frames of complex Gaussian `N x k` samples.
pub fn frame_product_infimum(a: &CMatrix, k: usize, trials: usize, seed: u64) -> Result<FrameProductReport> {
    let n = a.square_dim()?;
    if k < 1 || k > n {
        return Err(invalid(format!("k = {k} outside 1..={n}")));
    }
    if trials < 1 {
        return Err(invalid("at least one trial is required"));
    }
    let svd = svd_jacobi(a)?;
    let sigma_product: f64 = svd.s[n - k..].iter().product();
    let frame_product = |xi: &CMatrix| -> Result<f64> {
        let mut p = 1.0;
        for j in 0..k {
            p *= norm2(&a.mul_vec(&xi.column(j))?);
        }
        Ok(p)
    };
    let v_small = CMatrix::from_fn(n, k, |i, j| svd.v[(i, n - k + j)]);
    let singular_frame = frame_product(&v_small)?;
    let mut infimum = singular_frame;
    let root = Stream::new(seed, task::FRAME);
    for t in 1..trials {
        let s = root.child(t as u64);
        let g = CMatrix::from_fn(n, k, |i, j| s.complex_normal_at(2 * (i * k + j) as u64));
        let q = qr(&g)?.q;
        infimum = infimum.min(frame_product(&q)?);
    }
    Ok(FrameProductReport {
        infimum,
        singular_frame,
        sigma_product,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn dprod_examples() {
        let d = vec![c(2.0); 5];
        assert_eq!(dprod(&d, 3, 3).unwrap().value(), ONE);
        assert!((dprod(&d, 1, 4).unwrap().value() - c(8.0)).norm() < 1e-14);
        assert!(dprod(&d, 0, 2).is_err());
        assert!(dprod(&d, 3, 7).is_err());
        assert!(dprod(&d, 1, 6).is_ok());
    }

    #[test]
    fn witness_of_constant_two() {
        let d = vec![c(2.0); 3];
        let p = BlockPartition::single(3).unwrap();
        let w = &witness_vectors(&d, &p).unwrap()[0];
        let v = w.values();
        for (got, want) in v.iter().zip([1.0, -2.0, 4.0]) {
            assert!((got - c(want)).norm() < 1e-14);
        }
        let mv = build_bidiagonal(&d).mul_vec(&v).unwrap();
        assert!(mv[0].norm() < 1e-14 && mv[1].norm() < 1e-14);
        assert!((mv[2] - c(8.0)).norm() < 1e-13);
    }

    #[test]
    fn witness_of_zero_diagonal_is_unit() {
        let d = vec![ZERO; 6];
        let p = BlockPartition::new(vec![0, 2, 6], 6).unwrap();
        let ws = witness_vectors(&d, &p).unwrap();
        let v = ws[1].embedded(6);
        assert_eq!(v[2], ONE);
        assert!(v.iter().enumerate().all(|(i, x)| i == 2 || *x == ZERO));
        let mv = build_bidiagonal(&d).mul_vec(&v).unwrap();
        assert_eq!(mv[1], ONE);
    }

    #[test]
    fn dbounds_constant_one() {
        let d = vec![c(1.0); 7];
        let b = d_bounds(&d, &BlockPartition::single(7).unwrap()).unwrap();
        assert_eq!(b.plus[0], 14.0);
        assert_eq!(b.minus[0], 14.0);
        assert_eq!(b.dfrak, 14.0);
    }

    #[test]
    fn dbounds_zero_entry_is_infinite_minus() {
        let d = vec![c(1.0), ZERO, c(1.0)];
        let b = d_bounds(&d, &BlockPartition::single(3).unwrap()).unwrap();
        assert_eq!(b.minus[0], f64::INFINITY);
        assert!(b.dfrak.is_finite());
    }

    #[test]
    fn partition_validation() {
        assert!(BlockPartition::new(vec![0, 3, 3, 5], 5).is_err());
        assert!(BlockPartition::new(vec![1, 5], 5).is_err());
        assert_eq!(BlockPartition::from_cuts(vec![9, 0, 2, 2], 5).unwrap().boundaries, vec![0, 2, 5]);
    }

    #[test]
    fn iid_partition_small_inputs() {
        let p = iid_partition(&[c(2.0)], 0.3, 1.0, 0.5).unwrap();
        assert_eq!(p.boundaries, vec![0, 1]);
        assert!(iid_partition(&[], 0.3, 1.0, 0.5).is_err());
    }

    #[test]
    fn holder_constant_profile_is_regular() {
        let (p, warn) = holder_partition(|_| c(2.0), 100, 0.5).unwrap();
        assert!(warn.is_none());
        let mut want = vec![0];
        want.extend(regular_cuts(100, 0.5).into_iter().filter(|&x| x < 100));
        want.push(100);
        // a_1 = 1 is always a cut.
        want.insert(1, 1);
        assert_eq!(p.boundaries, want);
        let (_, warn) = holder_partition(|_| ZERO, 100, 0.5).unwrap();
        assert!(warn.is_some());
    }

    #[test]
    fn frame_product_of_diagonal() {
        let a = CMatrix::from_diagonal(&[c(1.0), c(2.0), c(3.0)]);
        let r = frame_product_infimum(&a, 2, 1, 0).unwrap();
        assert!((r.singular_frame - 2.0).abs() < 1e-12);
        let id = CMatrix::identity(4);
        let r = frame_product_infimum(&id, 3, 10, 0).unwrap();
        assert!((r.infimum - 1.0).abs() < 1e-12);
    }
}
