//! Matrix families: banded Toeplitz, twisted Toeplitz, its block-regularized
//! version, bidiagonal `D + J`, and their Gaussian perturbations.

use nonnormal_linalg::{CMatrix, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{task, Stream};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Serde form of a complex number: `[re, im]`, or a bare real on input.
pub mod scalar {
    use nonnormal_linalg::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Real(f64),
        Pair([f64; 2]),
    }

    impl From<Repr> for C64 {
        fn from(r: Repr) -> Self {
            match r {
                Repr::Real(re) => C64::new(re, 0.0),
                Repr::Pair([re, im]) => C64::new(re, im),
            }
        }
    }

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        Repr::deserialize(d).map(C64::from)
    }

    pub mod list {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|z| [z.re, z.im]))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
            Ok(Vec::<Repr>::deserialize(d)?.into_iter().map(C64::from).collect())
        }
    }
}

/// A function `[0, 1] -> C` filling one diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Constant {
        #[serde(with = "scalar")]
        value: C64,
    },
    /// `intercept + slope * x`
    Affine {
        #[serde(with = "scalar")]
        intercept: C64,
        #[serde(with = "scalar")]
        slope: C64,
    },
    /// `sum_k coeffs[k] x^k`
    Polynomial {
        #[serde(with = "scalar::list")]
        coeffs: Vec<C64>,
    },
    /// Values on the uniform grid `k / (len - 1)`, linearly interpolated;
    /// `x` is clamped to `[0, 1]`.
    Tabulated {
        #[serde(with = "scalar::list")]
        values: Vec<C64>,
    },
}

impl Generator {
    pub fn constant(value: C64) -> Self {
        Self::Constant { value }
    }

    pub fn real_affine(intercept: f64, slope: f64) -> Self {
        Self::Affine {
            intercept: C64::new(intercept, 0.0),
            slope: C64::new(slope, 0.0),
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Self::Constant { value } => *value,
            Self::Affine { intercept, slope } => intercept + slope * x,
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c),
            Self::Tabulated { values } => {
                let m = values.len();
                if m == 1 {
                    return values[0];
                }
                let t = x.clamp(0.0, 1.0) * (m - 1) as f64;
                let k = (t.floor() as usize).min(m - 2);
                let w = t - k as f64;
                values[k] * (1.0 - w) + values[k + 1] * w
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant { .. } => true,
            Self::Affine { slope, .. } => *slope == ZERO,
            Self::Polynomial { coeffs } => coeffs.iter().skip(1).all(|c| *c == ZERO),
            Self::Tabulated { values } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        let ok = match self {
            Self::Constant { value } => finite(value),
            Self::Affine { intercept, slope } => finite(intercept) && finite(slope),
            Self::Polynomial { coeffs } => !coeffs.is_empty() && coeffs.iter().all(finite),
            Self::Tabulated { values } => !values.is_empty() && values.iter().all(finite),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("generator needs finite, non-empty coefficients"))
        }
    }
}

/// Coefficient data `f_0, ..., f_d` of a (twisted) banded Toeplitz matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedSymbol {
    pub generators: Vec<Generator>,
}

impl TwistedSymbol {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        let s = Self { generators };
        s.validate()?;
        Ok(s)
    }

    /// The constant symbol `sum_l a_l J^l`.
    pub fn constant(a: &[C64]) -> Result<Self> {
        Self::new(a.iter().map(|&v| Generator::constant(v)).collect())
    }

    pub fn from_real(a: &[f64]) -> Result<Self> {
        Self::constant(&a.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.is_empty() {
            return Err(invalid("symbol needs at least one generator"));
        }
        self.generators.iter().try_for_each(Generator::validate)
    }

    /// Band width `d`.
    pub fn band(&self) -> usize {
        self.generators.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.generators.iter().all(Generator::is_constant)
    }

    /// `(f_0(x), ..., f_d(x))`
    pub fn coefficients_at(&self, x: f64) -> Vec<C64> {
        self.generators.iter().map(|g| g.eval(x)).collect()
    }

    /// Constant coefficients, if every generator is constant.
    pub fn constant_coefficients(&self) -> Option<Vec<C64>> {
        self.is_constant().then(|| self.coefficients_at(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagonalLaw {
    /// i.i.d. uniform on the real interval `[lo, hi]`.
    UniformInterval { lo: f64, hi: f64 },
    /// i.i.d. on finitely many atoms.
    Discrete {
        #[serde(with = "scalar::list")]
        points: Vec<C64>,
        weights: Vec<f64>,
    },
    /// Deterministic `d_i = f(i / N)`.
    Profile { profile: Generator },
}

impl DiagonalLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::UniformInterval { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(invalid(format!("degenerate interval [{lo}, {hi}]")));
                }
            }
            Self::Discrete { points, weights } => {
                if points.is_empty() || points.len() != weights.len() {
                    return Err(invalid("discrete law needs matching points and weights"));
                }
                if weights.iter().any(|w| !(*w >= 0.0)) {
                    return Err(invalid("negative weight"));
                }
                let s: f64 = weights.iter().sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(invalid(format!("weights sum to {s}, not 1")));
                }
            }
            Self::Profile { profile } => profile.validate()?,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub gamma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(gamma: f64, seed: u64) -> Result<Self> {
        let s = Self { gamma, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.5) || !self.gamma.is_finite() {
            return Err(invalid(format!("gamma must exceed 1/2, got {}", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationParams {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl RegularizationParams {
    /// Checks the ranges and the coupling to `gamma` and the band width `d`.
    pub fn validate(&self, gamma: f64, d: usize) -> Result<()> {
        for (name, v) in [("delta1", self.delta1), ("delta2", self.delta2), ("delta3", self.delta3)] {
            if !(v > 0.0 && v < 0.5) {
                return Err(invalid(format!("{name} = {v} outside (0, 1/2)")));
            }
        }
        let dd = d.max(1) as f64;
        let cap = (gamma - 0.5) / (20.0 * dd * dd);
        let m = self.delta1.max(self.delta2).max(self.delta3);
        if m > cap {
            return Err(invalid(format!("max delta {m} exceeds (gamma - 1/2)/(20 d^2) = {cap}")));
        }
        if !(self.delta1 < self.delta3 / 4.0) {
            return Err(invalid("delta1 must be below delta3 / 4"));
        }
        Ok(())
    }
}

fn check_size(n: usize, d: usize) -> Result<()> {
    if n <= d {
        return Err(Error::TooSmall { n, d });
    }
    Ok(())
}

/// `sum_l a_l J^l` for a constant symbol.
pub fn build_banded_toeplitz(sym: &TwistedSymbol, n: usize) -> Result<CMatrix> {
    let a = sym
        .constant_coefficients()
        .ok_or_else(|| invalid("banded Toeplitz needs constant generators"))?;
    check_size(n, sym.band())?;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        for (l, &v) in a.iter().enumerate() {
            if i + l < n {
                m[(i, i + l)] = v;
            }
        }
    }
    Ok(m)
}

/// Entry `(i, i + l) = f_l(i / N)` with 1-based `i`.
pub fn build_twisted(sym: &TwistedSymbol, n: usize) -> Result<CMatrix> {
    sym.validate()?;
    check_size(n, sym.band())?;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        let x = (i + 1) as f64 / n as f64;
        for (l, g) in sym.generators.iter().enumerate() {
            if i + l < n {
                m[(i, i + l)] = g.eval(x);
            }
        }
    }
    Ok(m)
}

/// `D + J` with `D = diag(d)`.
pub fn build_bidiagonal(d: &[C64]) -> CMatrix {
    let n = d.len();
    let mut m = CMatrix::from_diagonal(d);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = C64::new(1.0, 0.0);
    }
    m
}

/// The Jordan block `J_N(z)`.
pub fn build_jordan(n: usize, z: C64) -> CMatrix {
    build_bidiagonal(&vec![z; n])
}

/// A maximal run of rows `start..end` (0-based) on which every diagonal of
/// the regularized matrix is constant, with those constants `t_0..t_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub coeffs: Vec<C64>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// Largest `l` with `t_l != 0`.
    pub fn effective_degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(0)
    }
}

/// Block index `floor(i N^(delta1 - 1))` of the 1-based row `i`.
pub fn block_index(i: usize, n: usize, delta1: f64) -> usize {
    (i as f64 * (n as f64).powf(delta1 - 1.0)).floor() as usize
}

/// Blocks of the regularized model: piecewise-constant coefficients sampled
/// at block left ends, thresholded at `N^-delta2`, with the last two blocks
/// replaced by their row-weighted average.
pub fn regularized_blocks(sym: &TwistedSymbol, n: usize, params: &RegularizationParams) -> Result<Vec<Block>> {
    sym.validate()?;
    check_size(n, sym.band())?;
    let nf = n as f64;
    let scale = nf.powf(params.delta1);
    let floor = nf.powf(-params.delta2);
    let mut blocks: Vec<Block> = Vec::new();
    for i in 1..=n {
        let k = block_index(i, n, params.delta1);
        match blocks.last_mut() {
            Some(b) if b.index == k => b.end = i,
            _ => {
                let x = k as f64 / scale;
                let coeffs = sym
                    .coefficients_at(x)
                    .into_iter()
                    .map(|v| if v.norm() >= floor { v } else { ZERO })
                    .collect();
                blocks.push(Block {
                    index: k,
                    start: i - 1,
                    end: i,
                    coeffs,
                });
            }
        }
    }
    if blocks.len() >= 2 {
        let last = blocks.pop().expect("two blocks");
        let prev = blocks.last_mut().expect("two blocks");
        let (wa, wb) = (prev.len() as f64, last.len() as f64);
        for (a, b) in prev.coeffs.iter_mut().zip(&last.coeffs) {
            *a = (*a * wa + *b * wb) / (wa + wb);
        }
        prev.end = last.end;
    }
    Ok(blocks)
}

pub fn build_from_blocks(blocks: &[Block], n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for b in blocks {
        for i in b.start..b.end {
            for (l, &v) in b.coeffs.iter().enumerate() {
                if i + l < n {
                    m[(i, i + l)] = v;
                }
            }
        }
    }
    m
}

/// The block-regularized twisted matrix; `gamma` is the noise exponent the
/// parameters are validated against.
pub fn build_regularized(
    sym: &TwistedSymbol,
    n: usize,
    params: &RegularizationParams,
    gamma: f64,
) -> Result<CMatrix> {
    params.validate(gamma, sym.band())?;
    let blocks = regularized_blocks(sym, n, params)?;
    Ok(build_from_blocks(&blocks, n))
}

pub fn sample_diagonal(law: &DiagonalLaw, n: usize, seed: u64) -> Result<Vec<C64>> {
    law.validate()?;
    let s = Stream::new(seed, task::DIAGONAL);
    Ok(match law {
        DiagonalLaw::UniformInterval { lo, hi } => (0..n)
            .map(|i| C64::new(lo + (hi - lo) * s.uniform_at(i as u64), 0.0))
            .collect(),
        DiagonalLaw::Discrete { points, weights } => (0..n)
            .map(|i| {
                let u = s.uniform_at(i as u64);
                let mut acc = 0.0;
                for (p, w) in points.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return *p;
                    }
                }
                *points.last().expect("non-empty")
            })
            .collect(),
        DiagonalLaw::Profile { profile } => (1..=n).map(|i| profile.eval(i as f64 / n as f64)).collect(),
    })
}

/// `N x N` matrix of i.i.d. standard complex Gaussians; entry `(i, j)` uses
/// stream draws `2(iN + j)` and `2(iN + j) + 1`.
pub fn sample_ginibre(n: usize, seed: u64) -> CMatrix {
    let s = Stream::new(seed, task::GINIBRE);
    let mut data = vec![ZERO; n * n];
    data.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
        for (j, x) in row.iter_mut().enumerate() {
            *x = s.complex_normal_at(2 * (i * n + j) as u64);
        }
    });
    CMatrix::from_row_major(n, n, data).expect("sized buffer")
}

/// `M + N^-gamma G` with `G = sample_ginibre(N, seed)`.
pub fn perturb(m: &CMatrix, noise: &NoiseSpec) -> Result<CMatrix> {
    noise.validate()?;
    let n = m.square_dim()?;
    let scale = (n as f64).powf(-noise.gamma);
    let g = sample_ginibre(n, noise.seed);
    let mut out = m.clone();
    for (o, x) in out.as_mut_slice().iter_mut().zip(g.as_slice()) {
        *o += x * scale;
    }
    Ok(out)
}
