//! Quasi-exactly solvable potentials from Darboux transformations of the
//! radial sextic oscillator.
//!
//! * [`qpoly`] — exact algebra of polynomials, rational functions and
//!   quasi-polynomial wavefunctions in `t = x²`.
//! * [`sextic`] — the sextic model, its analytic sector and the `s → 1 − s`
//!   covariance that produces complex-energy solutions.
//! * [`darboux`] — first- and second-order transformations and chain
//!   classification.
//! * [`oracle`] — residual, intertwining and factorization checks, pole and
//!   realness diagnostics, and a Numerov shooting solver.
//! * [`cli`] — job files, reports and grid sampling for the `qesdx` binary.

pub mod cli;
pub mod darboux;
mod error;
pub mod linalg;
pub mod oracle;
pub mod qpoly;
pub mod sextic;

pub use error::{Error, Result};
pub use num_complex::Complex64;
