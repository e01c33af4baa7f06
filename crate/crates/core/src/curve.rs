//! Explicit descent curves that witness non-minimality.
//!
//! A curve starts at the candidate (`t = 0`), stays on the relevant orbit or
//! product of spheres, and carries the objective sampled on a log-spaced grid.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::frame::FrameSequence;
use crate::io::{FrameJson, MatrixJson};
use crate::linalg::{diag, CVector, GeneralMatrix, HermitianMatrix, UnitaryMatrix, C64};

/// Number of grid points on a sampled curve.
pub const GRID_POINTS: usize = 64;
/// Smallest grid point, relative to the curve length.
pub const GRID_START: f64 = 1e-6;
/// A sampled drop counts when it exceeds `DROP_TOL * (1 + f(0))`.
pub const DROP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveKind {
    /// Rotation in the plane of joint eigenvectors `j, j + 1` (0-based `j`).
    Givens { j: usize },
    /// Numerical two-sided unitary search direction.
    SpectralPath,
    /// Phase rotation of the `index`-th joint singular pair.
    Phase { index: usize },
    /// Linear-independence escape for cluster `cluster`.
    Escape { cluster: usize },
}

/// Generator of the curve points.
#[derive(Clone, Debug)]
pub enum CurvePath {
    /// `G(t) = U(t) G0 U(t)*` with `U(t)` a rotation by `t` in the plane of
    /// basis columns `j, j + 1`.
    Givens { basis: UnitaryMatrix, g0: HermitianMatrix, j: usize },
    /// `G(t) = Z(t)* G0 Z(t)`, `Z(t) = exp(itY) exp(-itX)`: the orbit point
    /// of `Γ(exp(itX), exp(itY))`.
    TwoSidedEig { g0: HermitianMatrix, x: HermitianMatrix, y: HermitianMatrix },
    /// `B(t) = U1 U2* B V2 V1*` with `U_k = exp(itX_k)`, `V_k = exp(itY_k)`:
    /// the point of `V_s` realizing `Ξ(U1, U2, V1, V2)`.
    TwoSidedSv { b: GeneralMatrix, gens: [HermitianMatrix; 4] },
    /// `B(t) = U W(t) D_β V*`, `W(t)` the identity with `e^{it}` at `index`.
    Phase { u: UnitaryMatrix, v: UnitaryMatrix, beta: Vec<f64>, index: usize },
    /// `B(t) = U G(t) V*` for an eigenvalue-orbit curve `G(t)`.
    Lifted { u: UnitaryMatrix, v: UnitaryMatrix, inner: Box<CurvePath> },
    /// Escape curve on the product of spheres.
    Escape { g0: FrameSequence, members: Vec<usize>, z: Vec<C64>, h: CVector },
}

/// A point on a curve.
#[derive(Clone, Debug)]
pub enum CurvePoint {
    Hermitian(HermitianMatrix),
    General(GeneralMatrix),
    Frame(FrameSequence),
}

impl CurvePoint {
    pub fn into_hermitian(self) -> Option<HermitianMatrix> {
        match self {
            CurvePoint::Hermitian(h) => Some(h),
            _ => None,
        }
    }

    pub fn into_general(self) -> Option<GeneralMatrix> {
        match self {
            CurvePoint::General(m) => Some(m),
            CurvePoint::Hermitian(h) => Some(h.into_matrix()),
            CurvePoint::Frame(_) => None,
        }
    }

    pub fn into_frame(self) -> Option<FrameSequence> {
        match self {
            CurvePoint::Frame(f) => Some(f),
            _ => None,
        }
    }
}

impl Serialize for CurvePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CurvePoint::Hermitian(h) => MatrixJson::from(h.as_matrix()).serialize(s),
            CurvePoint::General(m) => MatrixJson::from(m).serialize(s),
            CurvePoint::Frame(f) => FrameJson::from(f).serialize(s),
        }
    }
}

fn scaled_exp(h: &HermitianMatrix, t: f64) -> Result<UnitaryMatrix> {
    UnitaryMatrix::exp_i(&h.scale(t))
}

/// Rotation `U(t)` acting on basis columns `j, j + 1`.
pub fn givens_unitary(basis: &UnitaryMatrix, j: usize, t: f64) -> UnitaryMatrix {
    let v = basis.as_matrix();
    let d = v.nrows();
    let (c, s) = (t.cos(), t.sin());
    let mut rot = GeneralMatrix::identity(d, d);
    rot[(j, j)] = C64::new(c, 0.0);
    rot[(j + 1, j + 1)] = C64::new(c, 0.0);
    // v_j ⊗ v_{j+1} - v_{j+1} ⊗ v_j in the basis coordinates
    rot[(j, j + 1)] = C64::new(s, 0.0);
    rot[(j + 1, j)] = C64::new(-s, 0.0);
    UnitaryMatrix::from_raw(v * rot * v.adjoint())
}

impl CurvePath {
    pub fn point(&self, t: f64) -> Result<CurvePoint> {
        Ok(match self {
            CurvePath::Givens { basis, g0, j } => {
                let u = givens_unitary(basis, *j, t);
                CurvePoint::Hermitian(g0.conjugate_by(&u.adjoint()))
            }
            CurvePath::TwoSidedEig { g0, x, y } => {
                let z = scaled_exp(y, t)?.mul(&scaled_exp(x, -t)?);
                CurvePoint::Hermitian(g0.conjugate_by(&z))
            }
            CurvePath::TwoSidedSv { b, gens } => {
                let [u1, u2, v1, v2] = gens;
                let left = scaled_exp(u1, t)?.mul(&scaled_exp(u2, t)?.adjoint());
                let right = scaled_exp(v2, t)?.mul(&scaled_exp(v1, t)?.adjoint());
                CurvePoint::General(left.as_matrix() * b * right.as_matrix())
            }
            CurvePath::Phase { u, v, beta, index } => {
                let mut w = diag(beta);
                w[(*index, *index)] *= C64::from_polar(1.0, t);
                CurvePoint::General(u.as_matrix() * w * v.as_matrix().adjoint())
            }
            CurvePath::Lifted { u, v, inner } => {
                let g = inner.point(t)?.into_general().expect("orbit curve");
                CurvePoint::General(u.as_matrix() * g * v.as_matrix().adjoint())
            }
            CurvePath::Escape { g0, members, z, h } => {
                let mut vectors = g0.vectors().to_vec();
                for (&l, &zl) in members.iter().zip(z) {
                    let al = g0.norms()[l];
                    let shrink = (1.0 - t * t * zl.norm_sqr()).max(0.0).sqrt();
                    vectors[l] = &vectors[l] * C64::new(shrink, 0.0) + h * (zl * (t * al.sqrt()));
                }
                CurvePoint::Frame(FrameSequence::new_unchecked(vectors, g0.norms().to_vec()))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveSample {
    pub t: f64,
    pub value: f64,
}

/// A sampled descent curve.
#[derive(Clone, Debug)]
pub struct DescentCurve {
    pub kind: CurveKind,
    pub path: CurvePath,
    pub t_max: f64,
    /// Objective at `t = 0`.
    pub start_value: f64,
    pub samples: Vec<CurveSample>,
    /// `f(0) - min` over the samples.
    pub verified_drop: f64,
}

/// `n` log-spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

impl DescentCurve {
    /// Samples `objective` along `path` on a log grid over `[t_lo, t_hi]`.
    pub fn sample<F>(kind: CurveKind, path: CurvePath, t_lo: f64, t_hi: f64, objective: F) -> Result<Self>
    where
        F: Fn(&CurvePoint) -> f64,
    {
        let start_value = objective(&path.point(0.0)?);
        let mut samples = Vec::with_capacity(GRID_POINTS);
        for t in log_grid(t_lo, t_hi, GRID_POINTS) {
            samples.push(CurveSample { t, value: objective(&path.point(t)?) });
        }
        let min = samples.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
        Ok(DescentCurve { kind, path, t_max: t_hi, start_value, samples, verified_drop: start_value - min })
    }

    /// The drop exceeds `DROP_TOL * (1 + f(0))`.
    pub fn is_verified(&self) -> bool {
        self.verified_drop > DROP_TOL * (1.0 + self.start_value)
    }

    /// Every sample is below the previous one (and the first below `f(0)`),
    /// up to `slack`.
    pub fn is_monotone_decreasing(&self, slack: f64) -> bool {
        let mut prev = self.start_value;
        for s in &self.samples {
            if s.value > prev + slack {
                return false;
            }
            prev = s.value;
        }
        true
    }

    /// Grid point with the lowest objective.
    pub fn best_sample(&self) -> CurveSample {
        *self
            .samples
            .iter()
            .min_by(|a, b| a.value.total_cmp(&b.value))
            .expect("non-empty grid")
    }

    pub fn point(&self, t: f64) -> Result<CurvePoint> {
        self.path.point(t)
    }
}

impl Serialize for DescentCurve {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let best = self.best_sample();
        let witness = self.path.point(best.t).ok();
        let mut st = s.serialize_struct("DescentCurve", 7)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("t_max", &self.t_max)?;
        st.serialize_field("start_value", &self.start_value)?;
        st.serialize_field("verified_drop", &self.verified_drop)?;
        st.serialize_field("best_t", &best.t)?;
        st.serialize_field("witness_point", &witness)?;
        st.serialize_field("samples", &self.samples)?;
        st.end()
    }
}
