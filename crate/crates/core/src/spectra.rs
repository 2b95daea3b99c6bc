//! Empirical spectra, log potentials, pseudospectrum grids, and distances
//! between point samples in the plane.

use std::f64::consts::PI;

use nonnormal_linalg::{
    eigenvalues, hessenberg, log_abs_det, log_abs_det_shifted, smallest_singular_warm, CMatrix, SmallestMode, C64,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub n: usize,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    pub points: Vec<C64>,
    pub meta: SpectrumMeta,
}

/// Eigenvalues of `m` with the given provenance; `meta.n` is set from `m`.
pub fn esd(m: &CMatrix, mut meta: SpectrumMeta) -> Result<SpectrumSample> {
    let e = eigenvalues(m)?;
    if !e.converged {
        return Err(Error::NoConvergence {
            iterations: e.iterations,
        });
    }
    meta.n = m.rows();
    Ok(SpectrumSample { points: e.values, meta })
}

/// `(1/N) log|det(M - z)|` via LU; `-inf` at an exact eigenvalue.
pub fn empirical_logpot(m: &CMatrix, z: C64) -> Result<f64> {
    let n = m.square_dim()?;
    Ok(log_abs_det(&m.shifted(z))? / n as f64)
}

/// Evaluates `(1/N) log|det(M - z)|` at many `z` from one Hessenberg
/// reduction, at `O(N^2)` per point.
#[derive(Debug, Clone)]
pub struct LogPotentialEvaluator {
    h: CMatrix,
}

impl LogPotentialEvaluator {
    pub fn new(m: &CMatrix) -> Result<Self> {
        Ok(Self { h: hessenberg(m)? })
    }

    pub fn eval(&self, z: C64) -> f64 {
        log_abs_det_shifted(&self.h, z) / self.h.rows() as f64
    }
}

/// Mean of `log|z - p|` over the points.
pub fn sample_logpot(points: &[C64], z: C64) -> f64 {
    points.iter().map(|p| (z - p).norm().ln()).sum::<f64>() / points.len() as f64
}

/// `count` points on the circle `|z - center| = radius`.
pub fn ring(center: C64, radius: f64, count: usize) -> Vec<C64> {
    (0..count)
        .map(|k| center + C64::from_polar(radius, 2.0 * PI * k as f64 / count as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, nodes: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
            nx: nodes,
            ny: nodes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(invalid("grid needs at least one node per axis"));
        }
        let ok = |lo: f64, hi: f64, k: usize| lo.is_finite() && hi.is_finite() && (lo < hi || (k == 1 && lo == hi));
        if !ok(self.x_min, self.x_max, self.nx) || !ok(self.y_min, self.y_max, self.ny) {
            return Err(invalid("grid ranges must be finite and increasing"));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, k: usize) -> Vec<f64> {
        if k == 1 {
            return vec![lo];
        }
        (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.ny)
    }
}

/// Row-major in `y`: `values[iy * nx + ix]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    /// Nodes whose evaluation failed; their value is NaN.
    pub failures: usize,
}

impl GridField {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.spec.nx + ix]
    }
}

/// `sigma_min(M - z)` on the grid. Rows run in parallel; inverse iteration
/// warm-starts from the previous node of the same row.
pub fn pseudospectrum_grid(m: &CMatrix, spec: &GridSpec, mode: SmallestMode) -> Result<GridField> {
    spec.validate()?;
    m.square_dim()?;
    let xs = spec.xs();
    let ys = spec.ys();
    let rows: Vec<(Vec<f64>, usize)> = ys
        .par_iter()
        .map(|&y| {
            let mut warm: Option<Vec<C64>> = None;
            let mut failures = 0;
            let row = xs
                .iter()
                .map(|&x| match smallest_singular_warm(&m.shifted(C64::new(x, y)), mode, warm.as_deref()) {
                    Ok((s, v)) => {
                        if v.is_some() {
                            warm = v;
                        }
                        s.value
                    }
                    Err(_) => {
                        failures += 1;
                        f64::NAN
                    }
                })
                .collect();
            (row, failures)
        })
        .collect();
    let failures = rows.iter().map(|r| r.1).sum();
    Ok(GridField {
        spec: *spec,
        values: rows.into_iter().flat_map(|r| r.0).collect(),
        failures,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub logpot_rmse: f64,
    pub logpot_max: f64,
    /// 1-Wasserstein distance between the laws of `|p|`.
    pub radial_w1: f64,
    /// Kolmogorov distance between the laws of `arg p`.
    pub angular_ks: f64,
    /// Fraction of `a` within 0.1 of the convex hull of the points of `b`
    /// inside `b`'s 0.999 radial quantile.
    pub coverage: f64,
    pub used_test_points: usize,
    /// Test points within 0.1 of a sample point.
    pub excluded_test_points: Vec<C64>,
}

/// Minimum distance between test points and the samples.
pub const TEST_POINT_CLEARANCE: f64 = 0.1;
const COVERAGE_DISTANCE: f64 = 0.1;
const HULL_QUANTILE: f64 = 0.999;

pub fn compare_measures(a: &[C64], b: &[C64], test_z: &[C64]) -> Result<CompareReport> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("both samples must be non-empty"));
    }
    if a.iter().chain(b).any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(invalid("samples must be finite"));
    }
    let mut excluded = Vec::new();
    let mut diffs = Vec::new();
    for &z in test_z {
        let near = a.iter().chain(b).any(|p| (z - p).norm() < TEST_POINT_CLEARANCE);
        if near {
            excluded.push(z);
        } else {
            diffs.push(sample_logpot(a, z) - sample_logpot(b, z));
        }
    }
    let (rmse, max) = if diffs.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (
            (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt(),
            diffs.iter().map(|d| d.abs()).fold(0.0, f64::max),
        )
    };
    let ra: Vec<f64> = a.iter().map(|p| p.norm()).collect();
    let rb: Vec<f64> = b.iter().map(|p| p.norm()).collect();
    let ta: Vec<f64> = a.iter().map(|p| p.arg()).collect();
    let tb: Vec<f64> = b.iter().map(|p| p.arg()).collect();
    let hull = quantile_hull(b, &rb);
    let covered = a.iter().filter(|p| hull_distance(&hull, **p) <= COVERAGE_DISTANCE).count();
    Ok(CompareReport {
        logpot_rmse: rmse,
        logpot_max: max,
        radial_w1: wasserstein1(&ra, &rb),
        angular_ks: kolmogorov(&ta, &tb),
        coverage: covered as f64 / a.len() as f64,
        used_test_points: diffs.len(),
        excluded_test_points: excluded,
    })
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `int |F_a - F_b|` for empirical distribution functions.
pub fn wasserstein1(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut prev = a[0].min(b[0]);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        total += (i as f64 / na - j as f64 / nb).abs() * (next - prev);
        prev = next;
        while i < a.len() && a[i] == next {
            i += 1;
        }
        while j < b.len() && b[j] == next {
            j += 1;
        }
    }
    total
}

/// `sup |F_a - F_b|` for empirical distribution functions.
pub fn kolmogorov(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == next {
            i += 1;
        }
        while j < b.len() && b[j] == next {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

fn quantile_hull(points: &[C64], radii: &[f64]) -> Vec<C64> {
    let r = sorted(radii);
    let k = ((HULL_QUANTILE * r.len() as f64).ceil() as usize).clamp(1, r.len()) - 1;
    let cap = r[k];
    let kept: Vec<C64> = points.iter().copied().filter(|p| p.norm() <= cap).collect();
    convex_hull(&kept)
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Counter-clockwise convex hull (monotone chain), without collinear points.
pub fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<C64> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &C64>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(a: C64, b: C64, p: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from `p` to the filled polygon `hull` (counter-clockwise).
pub fn hull_distance(hull: &[C64], p: C64) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (p - hull[0]).norm(),
        2 => segment_distance(hull[0], hull[1], p),
        k => {
            let inside = (0..k).all(|i| cross(hull[i], hull[(i + 1) % k], p) >= 0.0);
            if inside {
                0.0
            } else {
                (0..k)
                    .map(|i| segment_distance(hull[i], hull[(i + 1) % k], p))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_spectrum() {
        let d: Vec<C64> = (1..=5).map(|k| c(k as f64, 0.0)).collect();
        let s = esd(&CMatrix::from_diagonal(&d), SpectrumMeta::default()).unwrap();
        let mut re: Vec<f64> = s.points.iter().map(|p| p.re).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(s.meta.n, 5);
    }

    #[test]
    fn zero_matrix_logpot() {
        let v = empirical_logpot(&CMatrix::zeros(4, 4), c(std::f64::consts::E, 0.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let ev = LogPotentialEvaluator::new(&CMatrix::zeros(4, 4)).unwrap();
        assert!((ev.eval(c(0.0, std::f64::consts::E)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distances_of_point_masses() {
        assert_eq!(wasserstein1(&[0.0; 4], &[1.0; 3]), 1.0);
        assert_eq!(kolmogorov(&[0.0; 4], &[1.0; 3]), 1.0);
        let x = [0.3, 0.1, 0.9, 0.5];
        assert_eq!(wasserstein1(&x, &x), 0.0);
        assert_eq!(kolmogorov(&x, &x), 0.0);
    }

    #[test]
    fn hull_of_square() {
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(0.5, 0.5), c(0.5, 0.0)];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert_eq!(hull_distance(&h, c(0.5, 0.5)), 0.0);
        assert!((hull_distance(&h, c(2.0, 0.5)) - 1.0).abs() < 1e-15);
        assert!((hull_distance(&h, c(-3.0, -4.0)) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn identical_samples_compare_to_zero() {
        let a: Vec<C64> = (0..50).map(|k| C64::from_polar(1.0 + 0.01 * k as f64, 0.7 * k as f64)).collect();
        let r = compare_measures(&a, &a, &ring(c(0.0, 0.0), 4.0, 8)).unwrap();
        assert_eq!(r.logpot_max, 0.0);
        assert_eq!(r.radial_w1, 0.0);
        assert_eq!(r.angular_ks, 0.0);
        assert_eq!(r.coverage, 1.0);
        assert_eq!(r.used_test_points, 8);
    }

    #[test]
    fn near_test_points_are_excluded() {
        let a = [c(0.0, 0.0)];
        let r = compare_measures(&a, &a, &[c(0.05, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(r.excluded_test_points, vec![c(0.05, 0.0)]);
        assert_eq!(r.used_test_points, 1);
    }

    #[test]
    fn zero_matrix_grid_is_modulus() {
        let spec = GridSpec::square(1.0, 5);
        let g = pseudospectrum_grid(&CMatrix::zeros(3, 3), &spec, SmallestMode::Dense).unwrap();
        for (iy, y) in spec.ys().into_iter().enumerate() {
            for (ix, x) in spec.xs().into_iter().enumerate() {
                assert!((g.at(ix, iy) - c(x, y).norm()).abs() < 1e-15);
            }
        }
        assert_eq!(g.failures, 0);
    }
}
