//! Direct and inverse spectral problems for complex periodic Jacobi matrices.
//!
//! The matrices treated here are Hermitian tridiagonal chains closed into a
//! ring by one complex corner coupling, with one complex diagonal entry. The
//! direct path computes the full spectrum from the spectrum of the leading
//! principal submatrix; the inverse path reconstructs, from two spectra and
//! the coupling product, every matrix of the restricted (hat) subclass with
//! that data, enumerating the finite solution set branch by branch.

pub mod corpus;
pub mod direct;
pub mod error;
pub mod inverse;
pub mod matrix;
pub mod poly;
pub mod tridiag;

pub use error::{Error, Result};

/// Default base for the scale-aware equality tolerance used by feasibility
/// and verification checks.
pub const DEFAULT_TOL_BASE: f64 = 1e-8;

/// Default relative residual bound for polynomial root extraction.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

/// Default relative distance bound for reconstruction verification.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-7;
