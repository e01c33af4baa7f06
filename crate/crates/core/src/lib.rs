//! Minimizers of unitarily invariant distances over unitary orbits and
//! frame spaces.
//!
//! * [`eig_orbit`]: `Φ(G) = N(S - G)` on Hermitian orbits `O_μ`.
//! * [`sv_orbit`]: `Ψ(C) = N(A - C)` on singular-value orbits `V_s`.
//! * [`frame`]: `Θ(G) = N(S - S_G)` on frames with prescribed norms.
//!
//! Non-minimizers come with a sampled [`curve::DescentCurve`] along which
//! the objective drops.

// `!(x > y)` is used deliberately so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod eig_orbit;
pub mod error;
pub mod frame;
pub mod io;
pub mod linalg;
pub mod majorization;
pub mod norms;
pub mod random;
pub mod sv_orbit;
pub mod tol;

pub use error::{Error, Result};
pub use linalg::{CVector, GeneralMatrix, HermitianMatrix, SpectrumVector, UnitaryMatrix, C64};
pub use norms::NormSpec;
