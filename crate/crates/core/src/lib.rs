//! Spectra of non-normal matrices under polynomially vanishing complex
//! Gaussian noise: matrix families, predicted limit laws, deterministic
//! equivalents of the log-determinant, singular-value rigidity bounds,
//! transfer-matrix Lyapunov spectra, and pseudospectrum grids.

pub mod acceptance;
pub mod detequiv;
pub mod error;
pub mod io;
pub mod limitlaw;
pub mod models;
pub mod quadrature;
pub mod rigidity;
pub mod rng;
pub mod spectra;
pub mod transfer;

pub use error::{Error, Result};
pub use nonnormal_linalg as linalg;
pub use nonnormal_linalg::{CMatrix, C64};
