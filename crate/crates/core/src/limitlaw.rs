//! Predicted limiting spectral laws and their logarithmic potentials.

use std::f64::consts::PI;

use nonnormal_linalg::{eigenvalues, CMatrix, C64};

use crate::error::{invalid, Error, Result};
use crate::models::{DiagonalLaw, Generator, TwistedSymbol};
use crate::quadrature::Rule;
use crate::rng::{task, Stream};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Coefficients below this fraction of the largest one count as zero when
/// the degree is determined.
pub const TRIM: f64 = 1e-14;

/// Distance to the symbol curve below which quadrature refuses to run.
pub const SINGULAR_DISTANCE: f64 = 1e-12;

/// Default number of x-panels for twisted symbols.
pub const DEFAULT_X_NODES: usize = 2048;

/// `P(lambda) = (t_0 - z) + t_1 lambda + ... + t_d lambda^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolAtX {
    pub coeffs: Vec<C64>,
    pub effective_degree: usize,
}

impl SymbolAtX {
    pub fn new(t: &[C64], z: C64) -> Self {
        let mut coeffs = t.to_vec();
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        coeffs[0] -= z;
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let effective_degree = (1..coeffs.len())
            .rev()
            .find(|&l| coeffs[l].norm() >= TRIM * scale && coeffs[l] != ZERO)
            .unwrap_or(0);
        Self {
            coeffs,
            effective_degree,
        }
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[self.effective_degree]
    }

    pub fn eval(&self, lambda: C64) -> C64 {
        self.coeffs[..=self.effective_degree]
            .iter()
            .rev()
            .fold(ZERO, |acc, &c| acc * lambda + c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<C64>,
}

/// All roots of the trimmed symbol, from the eigenvalues of its companion
/// matrix.
pub fn symbol_roots(s: &SymbolAtX) -> Result<RootSet> {
    let d = s.effective_degree;
    if d == 0 {
        return Err(Error::DegenerateSymbol);
    }
    let lead = s.leading();
    if d == 1 {
        return Ok(RootSet {
            roots: vec![-s.coeffs[0] / lead],
        });
    }
    let mut c = CMatrix::zeros(d, d);
    for k in 0..d {
        c[(0, k)] = -s.coeffs[d - 1 - k] / lead;
    }
    for i in 1..d {
        c[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    let e = eigenvalues(&c)?;
    if !e.converged {
        return Err(Error::NoConvergence {
            iterations: e.iterations,
        });
    }
    Ok(RootSet { roots: e.values })
}

fn log_plus(x: f64) -> f64 {
    x.ln().max(0.0)
}

/// Per-x Thouless value: `sum log+|lambda_j| + log|t_d|`, or `log|t_0 - z|`
/// when the symbol has degree 0.
fn thouless_value(s: &SymbolAtX) -> Result<f64> {
    if s.effective_degree == 0 {
        return Ok(s.coeffs[0].norm().ln());
    }
    let roots = symbol_roots(s)?;
    Ok(roots.roots.iter().map(|r| log_plus(r.norm())).sum::<f64>() + s.leading().norm().ln())
}

/// Closed-form log potential of the limit law of `sum a_l J^l`.
pub fn limit_logpot_toeplitz(a: &[C64], z: C64) -> Result<f64> {
    thouless_value(&SymbolAtX::new(a, z))
}

fn poly(a: &[C64], w: C64) -> C64 {
    a.iter().rev().fold(ZERO, |acc, &c| acc * w + c)
}

/// `(1/2pi) int log|P(e^{i theta}) - z| d theta` by the trapezoid rule.
pub fn limit_logpot_quadrature(a: &[C64], z: C64, nodes: usize) -> Result<f64> {
    if nodes == 0 {
        return Err(invalid("quadrature needs at least one node"));
    }
    let mut min_dist = f64::INFINITY;
    let mut sum = 0.0;
    for k in 0..nodes {
        let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
        let r = (poly(a, w) - z).norm();
        min_dist = min_dist.min(r);
        sum += r.ln();
    }
    if min_dist < SINGULAR_DISTANCE {
        return Err(Error::NearSingularity { distance: min_dist });
    }
    Ok(sum / nodes as f64)
}

/// Distance from `z` to the curve `theta -> P(e^{i theta})`.
pub fn symbol_curve_distance(a: &[C64], z: C64) -> f64 {
    let samples = 4096;
    let h = 2.0 * PI / samples as f64;
    let f = |t: f64| (poly(a, C64::from_polar(1.0, t)) - z).norm();
    let mut vals: Vec<(f64, f64)> = (0..samples).map(|k| (f(k as f64 * h), k as f64 * h)).collect();
    vals.sort_by(|p, q| p.0.total_cmp(&q.0));
    // Golden-section refinement around the best few samples.
    let g = (5f64.sqrt() - 1.0) / 2.0;
    vals.iter()
        .take(8)
        .map(|&(v0, t0)| {
            let (mut lo, mut hi) = (t0 - h, t0 + h);
            for _ in 0..60 {
                let m1 = hi - g * (hi - lo);
                let m2 = lo + g * (hi - lo);
                if f(m1) < f(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            v0.min(f((lo + hi) / 2.0))
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistedLogPot {
    pub value: f64,
    /// Degree-0 panels skipped because `|f_0(x) - z| < 1e-12`.
    pub refused: usize,
}

/// At most this many degree-0 panels may be refused.
pub const MAX_REFUSED: usize = 2;

/// x-average (midpoint rule) of the per-x Thouless value of a twisted symbol.
pub fn limit_logpot_twisted(sym: &TwistedSymbol, z: C64, x_nodes: usize) -> Result<TwistedLogPot> {
    sym.validate()?;
    if x_nodes == 0 {
        return Err(invalid("x_nodes must be positive"));
    }
    let mut sum = 0.0;
    let mut accepted = 0usize;
    let mut refused = 0usize;
    for k in 0..x_nodes {
        let x = (k as f64 + 0.5) / x_nodes as f64;
        let s = SymbolAtX::new(&sym.coefficients_at(x), z);
        if s.effective_degree == 0 && s.coeffs[0].norm() < SINGULAR_DISTANCE {
            refused += 1;
            continue;
        }
        sum += thouless_value(&s)?;
        accepted += 1;
    }
    if refused > MAX_REFUSED || accepted == 0 {
        return Err(Error::TooManyRefusedPanels {
            refused,
            limit: MAX_REFUSED,
        });
    }
    Ok(TwistedLogPot {
        value: sum / accepted as f64,
        refused,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IidMethod {
    /// Quadrature for interval and profile laws, exact sums for discrete ones.
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

const PROFILE_NODES: usize = 8192;

/// `E log|z - d_1|` (for a profile law, `int_0^1 log+|f(t) - z| dt`).
pub fn expected_log_distance(law: &DiagonalLaw, z: C64, method: IidMethod) -> Result<f64> {
    law.validate()?;
    if let IidMethod::MonteCarlo { samples, seed } = method {
        if samples == 0 {
            return Err(invalid("Monte Carlo needs at least one sample"));
        }
        let s = Stream::new(seed, task::LIMIT_LAW);
        let draw = |k: u64| -> C64 {
            let u = s.uniform_at(k);
            match law {
                DiagonalLaw::UniformInterval { lo, hi } => C64::new(lo + (hi - lo) * u, 0.0),
                DiagonalLaw::Discrete { points, weights } => {
                    let mut acc = 0.0;
                    for (p, w) in points.iter().zip(weights) {
                        acc += w;
                        if u < acc {
                            return *p;
                        }
                    }
                    *points.last().expect("validated")
                }
                DiagonalLaw::Profile { profile } => profile.eval(u),
            }
        };
        let total: f64 = (0..samples as u64)
            .map(|k| {
                let r = (z - draw(k)).norm();
                match law {
                    DiagonalLaw::Profile { .. } => log_plus(r),
                    _ => r.ln(),
                }
            })
            .sum();
        return Ok(total / samples as f64);
    }
    Ok(match law {
        DiagonalLaw::UniformInterval { lo, hi } => uniform_log_distance(*lo, *hi, z),
        DiagonalLaw::Discrete { points, weights } => points
            .iter()
            .zip(weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(p, w)| w * (z - p).norm().ln())
            .sum(),
        DiagonalLaw::Profile { profile } => {
            let h = 1.0 / PROFILE_NODES as f64;
            (0..PROFILE_NODES)
                .map(|k| log_plus((profile.eval((k as f64 + 0.5) * h) - z).norm()))
                .sum::<f64>()
                * h
        }
    })
}

/// `(1/(b-a)) int_a^b f(t) dt` for `f` with at most an integrable
/// singularity at `split`; pieces are graded geometrically towards it.
pub fn uniform_mean(a: f64, b: f64, split: f64, f: impl Fn(f64) -> f64) -> f64 {
    let rule = Rule::new(20);
    let (r, lv) = (0.15, 24);
    let c = split;
    let g = |s: f64| f(-s);
    let total = if c > a && c < b {
        rule.integrate_graded(c, b, r, lv, &f) + rule.integrate_graded(-c, -a, r, lv, g)
    } else if c <= a {
        rule.integrate_graded(a, b, r, lv, &f)
    } else {
        rule.integrate_graded(-b, -a, r, lv, g)
    };
    total / (b - a)
}

fn uniform_log_distance(a: f64, b: f64, z: C64) -> f64 {
    uniform_mean(a, b, z.re, |t| (z - t).norm().ln())
}

/// `(E log|z - d_1|) v 0` for the bidiagonal model `D + J`.
pub fn limit_logpot_iid(law: &DiagonalLaw, z: C64, method: IidMethod) -> Result<f64> {
    let e = expected_log_distance(law, z, method)?;
    Ok(if e.is_nan() { e } else { e.max(0.0) })
}

/// `count` draws of `sum_l f_l(X) U^l` with `X ~ U[0,1]`, `U` uniform on
/// the unit circle.
pub fn sample_limit_law(sym: &TwistedSymbol, count: usize, seed: u64) -> Result<Vec<C64>> {
    sym.validate()?;
    let s = Stream::new(seed, task::LIMIT_LAW);
    Ok((0..count as u64)
        .map(|k| {
            let x = s.uniform_at(2 * k);
            let u = C64::from_polar(1.0, 2.0 * PI * s.uniform_at(2 * k + 1));
            poly(&sym.coefficients_at(x), u)
        })
        .collect())
}

/// Distance from `w` to the support `{ sum_l f_l(x) e^{i l theta} }` of the
/// limit law, by scanning `x_nodes` values of `x` (exact in `theta` when
/// the band is 1, a `theta` scan otherwise).
pub fn support_distance(sym: &TwistedSymbol, w: C64, x_nodes: usize) -> f64 {
    let nx = x_nodes.max(2);
    let theta_nodes = 720;
    (0..nx)
        .map(|k| {
            let x = k as f64 / (nx - 1) as f64;
            let c = sym.coefficients_at(x);
            match c.len() {
                1 => (w - c[0]).norm(),
                2 => ((w - c[0]).norm() - c[1].norm()).abs(),
                _ => (0..theta_nodes)
                    .map(|j| (poly(&c, C64::from_polar(1.0, 2.0 * PI * j as f64 / theta_nodes as f64)) - w).norm())
                    .fold(f64::INFINITY, f64::min),
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Convenience: the Wilkinson-type symbol `f_0(x) = lo + (hi - lo) x`,
/// `f_1 = 1`.
pub fn affine_bidiagonal_symbol(lo: f64, hi: f64) -> TwistedSymbol {
    TwistedSymbol {
        generators: vec![Generator::real_affine(lo, hi - lo), Generator::constant(C64::new(1.0, 0.0))],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn roots_of_small_symbols() {
        let r = symbol_roots(&SymbolAtX::new(&[c(0.0, 0.0), c(1.0, 0.0)], c(0.3, 0.2))).unwrap();
        assert!((r.roots[0] - c(0.3, 0.2)).norm() < 1e-15);
        let r = sorted(symbol_roots(&SymbolAtX::new(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], ZERO)).unwrap().roots);
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12 && (r[1] - c(1.0, 0.0)).norm() < 1e-12);
        let r = sorted(symbol_roots(&SymbolAtX::new(&[ZERO, c(1.0, 0.0), c(1.0, 0.0)], ZERO)).unwrap().roots);
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-12 && r[1].norm() < 1e-12);
        assert_eq!(
            symbol_roots(&SymbolAtX::new(&[c(2.0, 0.0), ZERO], ZERO)),
            Err(Error::DegenerateSymbol)
        );
    }

    #[test]
    fn toeplitz_closed_forms() {
        let j = [ZERO, c(1.0, 0.0)];
        assert!((limit_logpot_toeplitz(&j, c(2.0, 0.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(limit_logpot_toeplitz(&j, c(0.5, 0.0)).unwrap(), 0.0);
        let v = limit_logpot_toeplitz(&[c(3.0, 1.0)], c(1.0, 1.0)).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        assert_eq!(limit_logpot_toeplitz(&[ZERO, ZERO], ZERO).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn quadrature_jensen() {
        let j = [ZERO, c(1.0, 0.0)];
        assert!((limit_logpot_quadrature(&j, c(2.0, 0.0), 4096).unwrap() - 2f64.ln()).abs() < 1e-10);
        assert!(limit_logpot_quadrature(&j, ZERO, 4096).unwrap().abs() < 1e-10);
        assert!(matches!(
            limit_logpot_quadrature(&j, c(1.0, 0.0), 64),
            Err(Error::NearSingularity { .. })
        ));
    }

    #[test]
    fn curve_distance_of_circle() {
        let j = [ZERO, c(1.0, 0.0)];
        assert!((symbol_curve_distance(&j, c(0.3, 0.4)) - 0.5).abs() < 1e-12);
        assert!((symbol_curve_distance(&j, c(0.0, 3.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn twisted_reduces_to_toeplitz() {
        let a = [c(0.1, 0.0), c(1.0, 0.0), c(1.0, 0.0)];
        let sym = TwistedSymbol::constant(&a).unwrap();
        let z = c(2.5, -0.7);
        let t = limit_logpot_twisted(&sym, z, 16).unwrap();
        assert_eq!(t.refused, 0);
        assert!((t.value - limit_logpot_toeplitz(&a, z).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn degree_zero_branch_and_refusal() {
        let sym = TwistedSymbol::new(vec![Generator::real_affine(-1.0, 2.0), Generator::constant(ZERO)]).unwrap();
        let z = c(0.0, 0.5);
        let t = limit_logpot_twisted(&sym, z, 4000).unwrap();
        // int_0^1 log|(-1 + 2x) - z| dx with the real antiderivative of log(u^2 + b^2)/2.
        let b: f64 = 0.5;
        let prim = |u: f64| 0.5 * (u * (u * u + b * b).ln() - 2.0 * u + 2.0 * b * (u / b).atan());
        let want = (prim(1.0) - prim(-1.0)) / 2.0;
        assert!((t.value - want).abs() < 1e-6, "{} vs {want}", t.value);
        let zero = TwistedSymbol::from_real(&[0.0, 0.0]).unwrap();
        assert!(matches!(
            limit_logpot_twisted(&zero, ZERO, 10),
            Err(Error::TooManyRefusedPanels { .. })
        ));
    }

    #[test]
    fn iid_point_masses() {
        let law = |p: C64| DiagonalLaw::Discrete {
            points: vec![p],
            weights: vec![1.0],
        };
        let e = std::f64::consts::E;
        let v = limit_logpot_iid(&law(ZERO), c(e, 0.0), IidMethod::Quadrature).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let v = limit_logpot_iid(&law(ZERO), c(1.0 / e, 0.0), IidMethod::Quadrature).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(limit_logpot_iid(&law(ZERO), ZERO, IidMethod::Quadrature).unwrap(), 0.0);
    }

    #[test]
    fn samples_of_pure_shift_lie_on_circle() {
        let sym = TwistedSymbol::from_real(&[0.0, 1.0]).unwrap();
        for w in sample_limit_law(&sym, 200, 3).unwrap() {
            assert!((w.norm() - 1.0).abs() < 1e-12);
        }
        let sym = TwistedSymbol::from_real(&[2.5]).unwrap();
        assert!(sample_limit_law(&sym, 20, 3).unwrap().iter().all(|w| *w == c(2.5, 0.0)));
    }
}
