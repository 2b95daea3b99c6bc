#![allow(dead_code)]

use nonnormal_linalg::{CMatrix, C64};

/// splitmix64; independent from the library's samplers on purpose.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let u = 1.0 - self.uniform();
        let v = self.uniform();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal()) * std::f64::consts::FRAC_1_SQRT_2
    }
}

pub fn gaussian(n: usize, rng: &mut TestRng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| rng.complex_normal())
}

/// Haar-like unitary: Gram-Schmidt on a Gaussian matrix, written out here so
/// the library QR is not its own oracle.
pub fn random_unitary(n: usize, rng: &mut TestRng) -> CMatrix {
    let g = gaussian(n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let p: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= nrm;
        }
        cols.push(v);
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Characteristic polynomial coefficients `c[0..=n]` (`c[n] = 1`) by the
/// Faddeev-LeVerrier recursion.
pub fn char_poly(a: &CMatrix) -> Vec<C64> {
    let n = a.rows();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = &*a * &m;
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        m = next;
        let am = &*a * &m;
        c[n - k] = -am.trace() / k as f64;
    }
    c
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
pub fn poly_roots(c: &[C64]) -> Vec<C64> {
    let n = c.len() - 1;
    let eval = |z: C64| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut r: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            let step = eval(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    // Newton polish.
    for z in &mut r {
        for _ in 0..3 {
            let (mut p, mut dp) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for &a in c.iter().rev() {
                dp = dp * *z + p;
                p = p * *z + a;
            }
            if dp.norm() > 0.0 {
                *z -= p / dp;
            }
        }
    }
    r
}

/// Smallest over all pairings of the largest pairwise distance.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n > 8 {
        let mut used = vec![false; n];
        let mut worst = 0.0f64;
        for x in a {
            let (k, d) = b
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, y)| (k, (x - y).norm()))
                .fold((usize::MAX, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
            used[k] = true;
            worst = worst.max(d);
        }
        return worst;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let d = a.iter().zip(p).map(|(x, &k)| (x - b[k]).norm()).fold(0.0, f64::max);
        best = best.min(d);
    });
    best
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic two-sided Jacobi, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut h = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| h[(i, j)].norm_sqr())
            .sum();
        if off < 1e-30 * h.frobenius_norm().powi(2) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = h[(p, q)];
                if g.norm() == 0.0 {
                    continue;
                }
                let ph = g / g.norm();
                let (app, aqq) = (h[(p, p)].re, h[(q, q)].re);
                let theta = 0.5 * (2.0 * g.norm()).atan2(aqq - app);
                let (c, s) = (theta.cos(), theta.sin());
                // Columns p, q of h times R, then rows by R^H, with
                // R = [[c, s ph], [-s conj(ph), c]].
                for i in 0..n {
                    let (x, y) = (h[(i, p)], h[(i, q)]);
                    h[(i, p)] = x * c - y * s * ph.conj();
                    h[(i, q)] = x * s * ph + y * c;
                }
                for j in 0..n {
                    let (x, y) = (h[(p, j)], h[(q, j)]);
                    h[(p, j)] = x * c - y * s * ph;
                    h[(q, j)] = x * s * ph.conj() + y * c;
                }
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}
