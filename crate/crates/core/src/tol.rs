//! Tolerances shared across the crate.
//!
//! All of them are relative to the natural scale of the quantity being
//! tested unless a comment says otherwise.

/// Relative singular-value floor for full-rank checks.
pub const RANK_TOL: f64 = 1e-10;

/// Unitarity and trace preservation of inputs.
pub const UNITARY_TOL: f64 = 1e-10;

/// Hermiticity / positivity floor used by parallelity tests.
pub const PARALLEL_TOL: f64 = 1e-9;

/// Kraus operators with Hilbert-Schmidt norm below this are dropped by the zoo.
pub const ZERO_OP_TOL: f64 = 1e-12;

/// Choi eigenvalues at or below this are treated as zero.
pub const CHOI_RANK_TOL: f64 = 1e-10;

/// Eigenvalue floor for faithful density operators.
pub const FAITHFUL_TOL: f64 = 1e-10;

/// Anti-Hermiticity check on the right-hand side of the gauge equation.
pub const ANTI_HERMITIAN_TOL: f64 = 1e-8;

/// Step for finite-difference derivatives of paths and frames.
pub const FD_STEP: f64 = 1e-5;

/// Default number of grid intervals for path-ordered exponentials.
pub const DEFAULT_STEPS: usize = 1024;

/// Default number of Schroedinger steps for unitary families.
pub const DEFAULT_SCHRODINGER_STEPS: usize = 4096;

/// Re-unitarize the Schroedinger propagator every this many steps.
pub const REUNITARIZE_EVERY: usize = 64;
