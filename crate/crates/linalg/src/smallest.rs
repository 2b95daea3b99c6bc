//! Smallest singular value, either from the full singular value list or by
//! inverse iteration on `(A^H A)^{-1}` through one LU factorization.

use num_complex::Complex64;

use crate::error::Result;
use crate::lu::lu;
use crate::matrix::{norm2, CMatrix};
use crate::svd::singular_values;

/// Dense SVD is used by [`SmallestMode::Auto`] up to this dimension.
pub const AUTO_DENSE_MAX: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmallestMode {
    #[default]
    Auto,
    Dense,
    InverseIteration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallestSingular {
    pub value: f64,
    /// Set when LU met an exactly zero pivot; `value` is then 0.
    pub exactly_singular: bool,
    /// Inverse-iteration steps taken (0 for the dense path).
    pub iterations: usize,
}

pub fn smallest_singular(a: &CMatrix, mode: SmallestMode) -> Result<SmallestSingular> {
    Ok(smallest_singular_warm(a, mode, None)?.0)
}

/// Like [`smallest_singular`], optionally seeding inverse iteration with
/// `start` and returning the final iterate for reuse at a nearby matrix.
pub fn smallest_singular_warm(
    a: &CMatrix,
    mode: SmallestMode,
    start: Option<&[Complex64]>,
) -> Result<(SmallestSingular, Option<Vec<Complex64>>)> {
    let n = a.square_dim()?;
    let dense = match mode {
        SmallestMode::Dense => true,
        SmallestMode::InverseIteration => false,
        SmallestMode::Auto => n <= AUTO_DENSE_MAX,
    };
    if dense {
        let s = singular_values(a)?;
        let value = s.smallest();
        return Ok((
            SmallestSingular {
                value,
                exactly_singular: false,
                iterations: 0,
            },
            None,
        ));
    }
    inverse_iteration(a, start)
}

const MAX_STEPS: usize = 500;
const REL_TOL: f64 = 1e-13;

fn inverse_iteration(
    a: &CMatrix,
    start: Option<&[Complex64]>,
) -> Result<(SmallestSingular, Option<Vec<Complex64>>)> {
    let n = a.rows();
    let f = lu(a)?;
    if f.is_singular() {
        return Ok((
            SmallestSingular {
                value: 0.0,
                exactly_singular: true,
                iterations: 0,
            },
            None,
        ));
    }
    let mut x: Vec<Complex64> = match start {
        Some(s) if s.len() == n && norm2(s) > 0.0 => s.to_vec(),
        _ => default_start(n),
    };
    normalize(&mut x);
    let mut estimate = f64::INFINITY;
    let mut steps = 0;
    while steps < MAX_STEPS {
        steps += 1;
        // ||A^{-H} x||^2 is a Rayleigh quotient of (A A^H)^{-1}.
        let w = f.solve_adjoint(&x).expect("nonsingular");
        let wn = norm2(&w);
        let next = 1.0 / wn;
        let mut y = f.solve(&w).expect("nonsingular");
        if !normalize(&mut y) {
            break;
        }
        x = y;
        let done = (next - estimate).abs() <= REL_TOL * next;
        estimate = next;
        if done {
            break;
        }
    }
    Ok((
        SmallestSingular {
            value: estimate,
            exactly_singular: false,
            iterations: steps,
        },
        Some(x),
    ))
}

fn default_start(n: usize) -> Vec<Complex64> {
    // Deterministic and generic: no symmetry that could align with a
    // structured matrix's invariant subspaces.
    (0..n)
        .map(|i| {
            let t = i as f64 + 1.0;
            Complex64::new(1.0 + 0.5 * (t * 0.7548776662466927).fract(), (t * 0.5698402909980532).fract() - 0.5)
        })
        .collect()
}

fn normalize(x: &mut [Complex64]) -> bool {
    let nrm = norm2(x);
    if nrm == 0.0 || !nrm.is_finite() {
        return false;
    }
    for v in x.iter_mut() {
        *v /= nrm;
    }
    true
}
