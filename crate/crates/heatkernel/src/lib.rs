//! Heat-kernel coefficients for Laplace-type operators whose leading symbol is
//! a positive matrix rather than a scalar.
//!
//! The crate is organised bottom-up:
//!
//! * [`simplex`] evaluates the scalar simplex integrals `I_{α,k}`.
//! * [`tensor`] lifts them to matrix arguments through spectral calculus.
//! * [`moments`] provides the Gaussian ξ-moment tensors.
//! * [`symbolic`] generates the first-order symbol expansion.
//! * [`coefficients`] assembles the local densities `a₀` and `a₁`.
//! * [`torus`] checks them against spectra of operators on flat tori.

// Index loops follow the tensor notation; `!(x > 0.0)` is used to reject NaN too.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod simplex;
pub mod symbolic;
pub mod tensor;
pub mod torus;

pub use error::{Error, Result};
pub use linalg::MatrixN;
