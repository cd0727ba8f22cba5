//! Numerical thresholds shared by every module.
//!
//! All of them are scale aware where a scale exists, so the same checks hold
//! after rescaling the metric or the structure constants.

/// Relative threshold for singular values counted as zero in nullspace solves.
pub const NULL: f64 = 1e-9;

/// Absolute floor for eigenvalues of a positive-definite Gram matrix.
pub const POSITIVE_DEFINITE: f64 = 1e-12;

/// Relative threshold for a plane or flag Gram determinant.
pub const FLAG_RELATIVE: f64 = 1e-12;

/// Jacobi residual tolerance for structure constants with largest entry `max_c`.
pub fn jacobi(max_c: f64) -> f64 {
    1e-12 * (1.0 + max_c)
}

/// Tolerance for connection and curvature identities.
pub fn numeric(max_c: f64, max_gram: f64) -> f64 {
    1e-10 * (1.0 + max_c).powi(2) * (1.0 + max_gram)
}

/// Degeneracy threshold for a plane whose spanning vectors have squared
/// lengths `yy` and `vv`.
pub fn flag(yy: f64, vv: f64) -> f64 {
    FLAG_RELATIVE * yy * vv
}
