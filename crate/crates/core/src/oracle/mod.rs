//! Independent verification: exact residuals, identity checks, diagnostics
//! and a numerical spectrum.

mod diagnostics;
mod numerov;
mod residual;

pub use diagnostics::{
    is_purely_imaginary, normalizability, normalizable, pole_scan, realness_check, Normalizability,
};
pub use numerov::{numerov_spectrum, NumerovConfig, NumerovLevel};
pub use residual::{
    factorization_check, factorization_grid_check, factorized_potentials, hamiltonian_apply,
    intertwine_check, residual, residual_with_tol, sampled_residual, ResidualReport, RESIDUAL_TOL,
};
