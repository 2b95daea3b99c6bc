//! Gauss–Legendre rules.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        if d.is_finite() {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(t), P_n'(t))` by the three-term recurrence.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Fixed rule mapped to `[a, b]`.
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }

    /// Integral over `[a, b]` of a function with an integrable endpoint
    /// singularity at `a`, on pieces shrinking geometrically towards `a`.
    pub fn integrate_graded(&self, a: f64, b: f64, ratio: f64, levels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let len = b - a;
        // Pieces narrower than this would put nodes on top of `a`.
        let floor = 1e3 * f64::EPSILON * a.abs();
        let mut hi = len;
        let mut total = 0.0;
        for _ in 0..levels {
            let lo = hi * ratio;
            if lo.abs() < floor {
                break;
            }
            total += self.integrate(a + lo, a + hi, &mut f);
            hi = lo;
        }
        total + self.integrate(a, a + hi, &mut f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let r = Rule::new(20);
        for k in 0..40 {
            let got = r.integrate(0.0, 1.0, |x| x.powi(k));
            assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 20, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn graded_handles_log_singularity() {
        let r = Rule::new(20);
        let got = r.integrate_graded(0.0, 1.0, 0.15, 20, f64::ln);
        assert!((got + 1.0).abs() < 1e-12, "{got}");
    }
}
