//! Closed-family algebra in `t = x²`: polynomials, rational functions and
//! quasi-polynomial wavefunctions.

mod poly;
mod rational;
mod roots;
mod wave;

pub use poly::{poly_roots, roots_to_poly, PolyC};
pub use rational::{rat_simplify, RationalT, RootProduct};
pub use roots::cluster_roots;
pub use wave::{
    qw_derivative, qw_eval, qw_log_derivative, qw_wronskian2, qw_wronskian3, rat_eval, QuasiWave,
    Superpotential,
};

/// Real and imaginary parts below this fraction of the operands' largest
/// coefficient are treated as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// Two roots closer than this (relative to `max(1, |r|)`) are the same root.
/// A denominator factor cancels when a numerator root lies this close.
pub const ROOT_MATCH_TOL: f64 = 1e-8;

/// Roots closer than this are merged into one multiple root when a
/// polynomial is factored.
pub const CLUSTER_TOL: f64 = 1e-5;

/// Rounding-level floor for the zero test, relative to the largest operand
/// magnitude of an operation.
pub const NOISE_TOL: f64 = 1e-13;

/// Denominator roots where the numerator is below this fraction of its
/// absolute-value Horner sum are checked against the numerator's roots.
pub const SCREEN_TOL: f64 = 1e-6;
