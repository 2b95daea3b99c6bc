//! Dense complex linear algebra for moderately sized square matrices.
//!
//! Everything here is written against [`CMatrix`], a row-major matrix of
//! [`C64`] entries. The kernels are eigenvalues (Hessenberg + shifted QR),
//! singular values (bidiagonalization + implicit-shift bidiagonal QR),
//! LU-based log-determinants, and smallest-singular-value estimation.

pub mod eigen;
pub mod error;
pub mod hessenberg;
pub mod householder;
pub mod lu;
pub mod matrix;
pub mod qr;
pub mod smallest;
pub mod svd;

pub use num_complex::Complex64 as C64;

pub use eigen::{eigenvalues, eigenvalues_with, EigenOptions, EigenResult};
pub use error::{LinalgError, Result};
pub use hessenberg::{hessenberg, log_abs_det_shifted};
pub use lu::{log_abs_det, log_det, lu, LogDet, Lu};
pub use matrix::{dot_c, norm2, CMatrix};
pub use qr::{qr, Qr};
pub use smallest::{smallest_singular, smallest_singular_warm, SmallestMode, SmallestSingular};
pub use svd::{
    bidiagonal_singular_values, singular_values, svd_jacobi, SingularValues, Svd,
};
