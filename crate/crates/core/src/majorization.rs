//! Majorization and submajorization of real vectors.
//!
//! `x ≺_w y` means every partial sum of `x↓` is bounded by the matching
//! partial sum of `y↓` (up to the shorter length); `x ≺ y` additionally
//! requires equal totals. Partial sums are compared with slack
//! `-tol * (1 + max |partial sum|)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SpectrumVector;

/// Outcome of a (sub)majorization check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorizationVerdict {
    pub holds: bool,
    /// Holds, and the sorted vectors differ.
    pub strict: bool,
    /// 0-based position `j` of the first failing partial sum `∑_{i<=j}`.
    /// For a trace mismatch this is the last position.
    pub first_violation_index: Option<usize>,
    /// Minimum slack over the compared partial sums.
    pub margin: f64,
}

pub fn sort_desc(x: &[f64]) -> SpectrumVector {
    SpectrumVector::from_unsorted(x.to_vec())
}

struct PartialSums {
    first_violation: Option<usize>,
    margin: f64,
    differ: bool,
}

fn compare_partial_sums(y: &[f64], x: &[f64], tol: f64) -> PartialSums {
    let ys = sort_desc(y);
    let xs = sort_desc(x);
    let n = xs.len().min(ys.len());
    let (mut sx, mut sy) = (0.0, 0.0);
    let mut out = PartialSums { first_violation: None, margin: f64::INFINITY, differ: false };
    for j in 0..n {
        sx += xs[j];
        sy += ys[j];
        let slack = sy - sx;
        out.margin = out.margin.min(slack);
        let scale = 1.0 + sx.abs().max(sy.abs());
        if slack < -tol * scale && out.first_violation.is_none() {
            out.first_violation = Some(j);
        }
        if (xs[j] - ys[j]).abs() > tol * (1.0 + xs[j].abs().max(ys[j].abs())) {
            out.differ = true;
        }
    }
    if n == 0 {
        out.margin = 0.0;
    }
    out
}

/// Verdict for `x ≺_w y`.
pub fn submajorizes(y: &[f64], x: &[f64], tol: f64) -> MajorizationVerdict {
    let p = compare_partial_sums(y, x, tol);
    let holds = p.first_violation.is_none();
    MajorizationVerdict {
        holds,
        strict: holds && (p.differ || x.len() != y.len()),
        first_violation_index: p.first_violation,
        margin: p.margin,
    }
}

/// Verdict for `x ≺ y`; the vectors must have equal length.
pub fn majorizes(y: &[f64], x: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!("majorization of lengths {} and {}", x.len(), y.len())));
    }
    let mut p = compare_partial_sums(y, x, tol);
    let (tx, ty): (f64, f64) = (x.iter().sum(), y.iter().sum());
    let trace_gap = (tx - ty).abs();
    if trace_gap > tol * (1.0 + ty.abs()) && p.first_violation.is_none() {
        p.first_violation = Some(x.len().saturating_sub(1));
    }
    let holds = p.first_violation.is_none();
    Ok(MajorizationVerdict {
        holds,
        strict: holds && p.differ,
        first_violation_index: p.first_violation,
        margin: p.margin.min(-trace_gap),
    })
}

/// `ρ(t) = (1 - t) a + t b` for `b ≺ a`. For `t ∈ (0, 1]` and `b↓ ≠ a` the
/// result is strictly majorized by `a`.
pub fn majorization_path(a: &SpectrumVector, b: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Precondition(format!("path parameter {t} outside [0, 1]")));
    }
    let v = majorizes(a, b, 1e-9)?;
    if !v.holds {
        return Err(Error::NotMajorized(format!(
            "b is not majorized by a (partial sum {:?})",
            v.first_violation_index
        )));
    }
    Ok(a.iter().zip(b).map(|(&ai, &bi)| (1.0 - t) * ai + t * bi).collect())
}
