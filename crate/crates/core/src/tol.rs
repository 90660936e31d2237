//! Numerical tolerances shared across the crate.

/// Hermiticity check, entrywise.
pub const HERMITIAN: f64 = 1e-9;
/// Eigen-equation residual accepted from the eigensolver.
pub const EIGEN: f64 = 1e-10;
/// Principal-minor sign test.
pub const MINOR: f64 = 1e-10;
/// Smallest eigenvalue still counted as non-negative.
pub const PSD_SLACK: f64 = 1e-9;
/// Normalization and trace checks on states.
pub const STATE: f64 = 1e-9;
/// Imaginary part of an expectation value silently discarded.
pub const IMAG_DISCARD: f64 = 1e-9;
/// Imaginary part of an expectation value rejected as an input error.
pub const IMAG_REJECT: f64 = 1e-6;
/// Relative grouping width for degenerate eigenvalues.
pub const DEGENERATE: f64 = 1e-8;
/// Negativity above this is genuine in closed-form computations.
pub const NEGATIVITY: f64 = 1e-7;
/// Negativity threshold for optimizer-derived bounds.
pub const OPT_NEGATIVITY: f64 = 1e-4;
/// Constraint residual below which a witness counts as feasible.
pub const FEASIBLE: f64 = 1e-6;
/// Constraint residual above which constraints are declared infeasible.
pub const INFEASIBLE: f64 = 1e-3;
/// Certificate constraint slack.
pub const CERTIFICATE: f64 = 1e-7;
