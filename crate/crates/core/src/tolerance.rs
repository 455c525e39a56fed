//! Numeric tolerances used across the crate.
//!
//! Everything that compares floating-point results against an exact identity
//! reads its slack from here.

/// Identities that hold exactly in real arithmetic and involve a handful of
/// rounding steps (normalization, closed forms).
pub const EXACT: f64 = 1e-12;

/// Comparisons between two long floating-point routes (recurrence vs closed
/// form after hundreds of steps, FFT vs mean-inversion).
pub const ROUTE: f64 = 1e-10;

/// Explicit matrix products against the fast diffusion path.
pub const MATRIX: f64 = 1e-9;

/// Norm drift allowed after up to 10⁴ simulated iterations.
pub const LONG_RUN_NORM: f64 = 1e-8;

/// A state whose squared norm is further than this from 1 is refused by
/// measurement.
pub const MEASURE_NORM: f64 = 1e-6;

/// Absolute tolerance in `j` for the optimal-stopping root.
pub const STOPPING_ROOT: f64 = 1e-9;

/// Absolute tolerance for the `z = tan(z/2)` root.
pub const Z_ROOT: f64 = 1e-10;

/// `|sin α|` below this is treated as a multiple of π.
pub const SINGULAR_SIN: f64 = 1e-12;

/// Largest dimension for which explicit N×N operator matrices are built.
pub const MAX_MATRIX_DIM: usize = 64;
