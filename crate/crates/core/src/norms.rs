//! Unitarily invariant norms as symmetric gauge functions of singular values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, GeneralMatrix, HermitianMatrix};

/// A unitarily invariant norm.
///
/// `Schatten { p }` always has `1 <= p < ∞`; `schatten:inf` parses to
/// [`NormSpec::Spectral`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawNorm")]
pub enum NormSpec {
    Schatten { p: f64 },
    Kyfan { k: usize },
    Spectral,
    Frobenius,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawNorm {
    Schatten { p: Option<f64> },
    Kyfan { k: usize },
    Spectral,
    Frobenius,
}

impl TryFrom<RawNorm> for NormSpec {
    type Error = Error;
    fn try_from(raw: RawNorm) -> Result<Self> {
        match raw {
            // JSON has no infinity; a missing p means p = ∞
            RawNorm::Schatten { p } => NormSpec::schatten(p.unwrap_or(f64::INFINITY)),
            RawNorm::Kyfan { k } => NormSpec::kyfan(k),
            RawNorm::Spectral => Ok(NormSpec::Spectral),
            RawNorm::Frobenius => Ok(NormSpec::Frobenius),
        }
    }
}

impl NormSpec {
    pub fn schatten(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidNorm(format!("schatten exponent {p} must be >= 1")));
        }
        Ok(if p.is_infinite() { NormSpec::Spectral } else { NormSpec::Schatten { p } })
    }

    pub fn kyfan(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidNorm("ky fan index must be positive".into()));
        }
        Ok(NormSpec::Kyfan { k })
    }

    /// Strict convexity by kind: exactly the Schatten norms with `1 < p < ∞`.
    pub fn is_strictly_convex(&self) -> bool {
        match *self {
            NormSpec::Schatten { p } => p > 1.0 && p.is_finite(),
            NormSpec::Frobenius => true,
            NormSpec::Kyfan { .. } | NormSpec::Spectral => false,
        }
    }

    pub(crate) fn require_strictly_convex(&self) -> Result<()> {
        if self.is_strictly_convex() {
            Ok(())
        } else {
            Err(Error::NotStrictlyConvex(self.to_string()))
        }
    }

    /// Schatten exponent when the norm is a Schatten norm.
    pub fn schatten_exponent(&self) -> Option<f64> {
        match *self {
            NormSpec::Schatten { p } => Some(p),
            NormSpec::Frobenius => Some(2.0),
            NormSpec::Spectral => Some(f64::INFINITY),
            NormSpec::Kyfan { .. } => None,
        }
    }

    /// Gauge function on a vector of singular values (any order, entries
    /// taken in absolute value).
    pub fn gauge(&self, values: &[f64]) -> f64 {
        let mut s: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        match *self {
            NormSpec::Spectral => s.iter().fold(0.0, |m: f64, &v| m.max(v)),
            NormSpec::Kyfan { k } => {
                s.sort_by(|a, b| b.total_cmp(a));
                s.iter().take(k).sum()
            }
            NormSpec::Frobenius => s.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormSpec::Schatten { p } => {
                let m = s.iter().fold(0.0, |m: f64, &v| m.max(v));
                if m == 0.0 {
                    return 0.0;
                }
                // scale by the largest value so large p cannot overflow
                m * s.iter().map(|v| (v / m).powf(p)).sum::<f64>().powf(1.0 / p)
            }
        }
    }

    pub fn evaluate(&self, a: &GeneralMatrix) -> f64 {
        self.gauge(&singular_values(a))
    }

    /// Same as [`NormSpec::evaluate`], using `s(M) = |λ(M)|`.
    pub fn evaluate_hermitian(&self, m: &HermitianMatrix) -> f64 {
        self.gauge(&m.eigenvalues())
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Schatten { p } => write!(f, "schatten:{p}"),
            NormSpec::Kyfan { k } => write!(f, "kyfan:{k}"),
            NormSpec::Spectral => write!(f, "spectral"),
            NormSpec::Frobenius => write!(f, "frobenius"),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s.as_str(), None),
        };
        let bad = || Error::InvalidNorm(format!("cannot parse norm `{s}`"));
        match (kind, arg) {
            ("spectral", None) => Ok(NormSpec::Spectral),
            ("frobenius", None) => Ok(NormSpec::Frobenius),
            ("schatten", Some(a)) => {
                let p = if a == "inf" { f64::INFINITY } else { a.parse().map_err(|_| bad())? };
                NormSpec::schatten(p)
            }
            ("kyfan", Some(a)) => NormSpec::kyfan(a.parse().map_err(|_| bad())?),
            _ => Err(bad()),
        }
    }
}
