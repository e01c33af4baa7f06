//! Numerical tolerances shared by every module.
//!
//! All thresholds are relative unless the name says otherwise. The cluster
//! rule [`gap_tol`] is the single place where "equal eigenvalues" is decided.

use std::ops::Range;

/// Allowed relative asymmetry `|M - M*| / |M|` for a Hermitian input.
pub const HERMIT_TOL: f64 = 1e-10;
/// Allowed `|U*U - I|_F`, scaled by the dimension.
pub const UNITARY_TOL: f64 = 1e-10;
/// Relative reconstruction tolerance for the eigensolver.
pub const EIG_TOL: f64 = 1e-9;
/// Relative reconstruction tolerance for the SVD.
pub const SVD_TOL: f64 = 1e-9;
/// Default singular-value cut (relative to the largest) for numerical kernels.
pub const NULL_TOL: f64 = 1e-8;
/// Relative factor of the degeneracy threshold, see [`gap_tol`].
pub const GAP_TOL_REL: f64 = 1e-7;
/// Relative zero threshold for singular values.
pub const ZERO_TOL_REL: f64 = 1e-9;
/// Absolute zero threshold used when the largest singular value vanishes.
pub const ZERO_TOL_ABS: f64 = 1e-12;
/// Relative tolerance on `|g_i|^2 = a_i`.
pub const SPHERE_TOL: f64 = 1e-9;

/// Degeneracy threshold `1e-7 * (1 + spread)` for a set of eigenvalues.
pub fn gap_tol(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let spread = if values.is_empty() { 0.0 } else { hi - lo };
    GAP_TOL_REL * (1.0 + spread)
}

/// Splits a monotone sequence into maximal runs whose consecutive gaps are
/// below `gap` (single linkage).
pub fn clusters(values: &[f64], gap: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i - 1] - values[i]).abs() > gap {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Zero threshold for singular values with largest value `s_max`.
pub fn zero_tol(s_max: f64) -> f64 {
    if s_max > 0.0 {
        ZERO_TOL_REL * s_max
    } else {
        ZERO_TOL_ABS
    }
}
