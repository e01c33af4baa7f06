//! Distances from a Hermitian `S` to the unitary orbit
//! `O_μ = {G Hermitian : λ(G) = μ}` under a unitarily invariant norm.
//!
//! The global minimizer pairs `λ(S)↓` with `μ↓` in a common eigenbasis. For a
//! strictly convex norm every local minimizer has that form, so a candidate
//! either passes the structural test (commutes with `S`, monotone pairing of
//! spectra up to degeneracy) or admits an explicit descent curve.

use rand::Rng;
use serde::Serialize;

use crate::curve::{CurveKind, CurvePath, CurvePoint, DescentCurve, DROP_TOL};
use crate::error::{Error, Result};
use crate::io::MatrixJson;
use crate::linalg::{
    columns, commutator, compress, eigh, same_dim, GeneralMatrix, HermitianMatrix, SpectrumVector, UnitaryMatrix,
};
use crate::majorization::sort_desc;
use crate::norms::NormSpec;
use crate::random;
use crate::tol::{clusters, gap_tol};

/// The orbit `O_μ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSpec {
    pub mu: SpectrumVector,
}

impl OrbitSpec {
    pub fn new(mu: SpectrumVector) -> Self {
        OrbitSpec { mu }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// `|λ(G) - μ|_∞ <= tol * (1 + |μ|_∞)`.
    pub fn contains(&self, g: &HermitianMatrix, tol: f64) -> bool {
        g.dim() == self.dim() && orbit_residual(g, &self.mu) <= tol * (1.0 + max_abs(&self.mu))
    }
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

/// `max_i |λ_i(G) - μ_i|`.
pub fn orbit_residual(g: &HermitianMatrix, mu: &[f64]) -> f64 {
    g.eigenvalues().iter().zip(mu).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
}

/// `Φ(G) = N(S - G)`.
pub fn phi(norm: &NormSpec, s: &HermitianMatrix, g: &HermitianMatrix) -> Result<f64> {
    Ok(norm.evaluate_hermitian(&s.sub(g)?))
}

/// `G^op = ∑ μ_i v_i ⊗ v_i` for an eigenbasis `{v_i}` of `S` ordered by `λ(S)↓`.
pub fn global_minimizer_eig(s: &HermitianMatrix, mu: &SpectrumVector) -> Result<HermitianMatrix> {
    same_dim(s.dim(), mu.len(), "orbit spectrum")?;
    let (_, v) = eigh(s)?;
    Ok(HermitianMatrix::from_spectral(&v, mu))
}

/// `Γ(U, V) = U* S U - V* G0 V`.
pub fn gamma_map(s: &HermitianMatrix, g0: &HermitianMatrix, u: &UnitaryMatrix, v: &UnitaryMatrix) -> Result<HermitianMatrix> {
    same_dim(s.dim(), g0.dim(), "gamma map")?;
    same_dim(s.dim(), u.dim(), "gamma map")?;
    same_dim(s.dim(), v.dim(), "gamma map")?;
    s.conjugate_by(u).sub(&g0.conjugate_by(v))
}

/// `Δ(U, V) = N(Γ(U, V))`.
pub fn delta_map(
    norm: &NormSpec,
    s: &HermitianMatrix,
    g0: &HermitianMatrix,
    u: &UnitaryMatrix,
    v: &UnitaryMatrix,
) -> Result<f64> {
    Ok(norm.evaluate_hermitian(&gamma_map(s, g0, u, v)?))
}

/// A common eigenbasis of commuting `S` and `G0`.
#[derive(Clone, Debug)]
pub struct JointEigenbasis {
    /// Columns ordered by `λ(S)↓`, and by `G0`-eigenvalue ↓ inside each
    /// degenerate cluster of `S`.
    pub basis: UnitaryMatrix,
    /// Rayleigh quotients of `S` along the basis.
    pub lambda: Vec<f64>,
    /// Rayleigh quotients of `G0` along the basis.
    pub nu: Vec<f64>,
    /// `|V* G0 V - D_ν|_F`, nonzero when the pair does not commute exactly.
    pub offdiag_residual: f64,
}

/// Diagonalizes `S`, then diagonalizes the compression of `G0` to every
/// degenerate eigenspace of `S`.
pub fn joint_eigenbasis(s: &HermitianMatrix, g0: &HermitianMatrix) -> Result<JointEigenbasis> {
    same_dim(s.dim(), g0.dim(), "joint eigenbasis")?;
    let d = s.dim();
    let (lam, v) = eigh(s)?;
    let mut cols = Vec::with_capacity(d);
    for range in clusters(&lam, gap_tol(&lam)) {
        let q = columns(v.as_matrix(), range);
        let block = HermitianMatrix::symmetrize(compress(g0.as_matrix(), &q));
        let (_, w) = eigh(&block)?;
        cols.push(q * w.as_matrix());
    }
    let basis = GeneralMatrix::from_fn(d, d, |r, c| {
        let mut off = c;
        for m in &cols {
            if off < m.ncols() {
                return m[(r, off)];
            }
            off -= m.ncols();
        }
        unreachable!()
    });
    let rayleigh = |m: &GeneralMatrix| -> (Vec<f64>, f64) {
        let c = compress(m, &basis);
        let diag: Vec<f64> = (0..d).map(|i| c[(i, i)].re).collect();
        let off = (c - crate::linalg::diag(&diag)).norm();
        (diag, off)
    };
    let (lambda, _) = rayleigh(s.as_matrix());
    let (nu, offdiag_residual) = rayleigh(g0.as_matrix());
    Ok(JointEigenbasis { basis: UnitaryMatrix::from_raw(basis), lambda, nu, offdiag_residual })
}

/// First `j` with `ν_j < ν_{j+1}` beyond the degeneracy threshold.
fn first_misalignment(nu: &[f64]) -> Option<usize> {
    let gap = gap_tol(nu);
    nu.windows(2).position(|w| w[0] < w[1] - gap)
}

/// The Givens descent curve `G(t) = U(t) G0 U(t)*`, `t ∈ (0, π/2)`, for a
/// commuting pair whose joint basis has `ν_j < ν_{j+1}` and
/// `λ_j > λ_{j+1}` (0-based `j`). Along it `λ(S - G(t))` is strictly
/// majorized by `λ(S - G0)`, so `Φ` strictly decreases for every strictly
/// convex norm.
pub fn descent_curve_eig(
    norm: &NormSpec,
    s: &HermitianMatrix,
    g0: &HermitianMatrix,
    j: usize,
    joint_basis: &UnitaryMatrix,
) -> Result<DescentCurve> {
    let d = s.dim();
    same_dim(d, g0.dim(), "descent curve")?;
    same_dim(d, joint_basis.dim(), "descent curve")?;
    if j + 1 >= d {
        return Err(Error::Precondition(format!("index {j} has no successor in dimension {d}")));
    }
    let scale = 1.0 + s.op_norm() * g0.op_norm() + s.op_norm() + g0.op_norm();
    let comm = commutator(s.as_matrix(), g0.as_matrix())?.norm();
    if comm > 1e-6 * scale {
        return Err(Error::Precondition(format!("[S, G0] = {comm:.3e} is not zero")));
    }
    let v = joint_basis.as_matrix();
    let cs = compress(s.as_matrix(), v);
    let cg = compress(g0.as_matrix(), v);
    let lam: Vec<f64> = (0..d).map(|i| cs[(i, i)].re).collect();
    let nu: Vec<f64> = (0..d).map(|i| cg[(i, i)].re).collect();
    let off = (cs - crate::linalg::diag(&lam)).norm() + (cg - crate::linalg::diag(&nu)).norm();
    if off > 1e-6 * scale {
        return Err(Error::Precondition(format!("basis does not diagonalize both matrices ({off:.3e})")));
    }
    let (gl, gn) = (gap_tol(&lam), gap_tol(&nu));
    if !(lam[j] > lam[j + 1] + gl) {
        return Err(Error::Precondition(format!(
            "λ_j = {} must exceed λ_(j+1) = {}; equal values are resolved by transposing basis vectors",
            lam[j],
            lam[j + 1]
        )));
    }
    if !(nu[j] < nu[j + 1] - gn) {
        return Err(Error::Precondition(format!("ν_j = {} must be below ν_(j+1) = {}", nu[j], nu[j + 1])));
    }
    let path = CurvePath::Givens { basis: joint_basis.clone(), g0: g0.clone(), j };
    let t_max = std::f64::consts::FRAC_PI_2 * (1.0 - 1e-3);
    DescentCurve::sample(CurveKind::Givens { j }, path, 1e-6 * t_max, t_max, |p| hermitian_objective(norm, s, p))
}

fn hermitian_objective(norm: &NormSpec, s: &HermitianMatrix, p: &CurvePoint) -> f64 {
    match p {
        CurvePoint::Hermitian(g) => phi(norm, s, g).unwrap_or(f64::NAN),
        _ => f64::NAN,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedGlobal,
    NotLocalMin,
    Inconclusive,
}

/// Options for the certifiers.
#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub tol: f64,
    /// Seed of the numerical witness search.
    pub seed: u64,
    /// Random directions tried per radius.
    pub search_samples: usize,
    /// Search radii, tried in order.
    pub radii: Vec<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { tol: 1e-8, seed: 0, search_samples: 64, radii: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6] }
    }
}

impl CertifyOptions {
    pub fn with_tol(tol: f64) -> Self {
        CertifyOptions { tol, ..Default::default() }
    }
}

/// Outcome of [`certify_local_eig`].
#[derive(Clone, Debug)]
pub struct EigCertificate {
    pub verdict: Verdict,
    /// `|[S, G0]|_F`.
    pub commutator_residual: f64,
    pub joint_basis: Option<UnitaryMatrix>,
    /// The joint basis pairs `λ(S)↓` with `λ(G0)↓` up to degeneracy.
    pub alignment_ok: bool,
    pub descent_witness: Option<DescentCurve>,
    /// `Φ(G0)`.
    pub phi: f64,
    /// `Φ(G^op)`, the global minimum over the orbit.
    pub global_phi: f64,
}

#[derive(Serialize)]
struct EigCertificateJson<'a> {
    verdict: Verdict,
    commutator_residual: f64,
    joint_basis: Option<MatrixJson>,
    alignment_ok: bool,
    descent_witness: Option<&'a DescentCurve>,
    phi: f64,
    global_phi: f64,
}

impl Serialize for EigCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EigCertificateJson {
            verdict: self.verdict,
            commutator_residual: self.commutator_residual,
            joint_basis: self.joint_basis.as_ref().map(|u| MatrixJson::from(u.as_matrix())),
            alignment_ok: self.alignment_ok,
            descent_witness: self.descent_witness.as_ref(),
            phi: self.phi,
            global_phi: self.global_phi,
        }
        .serialize(s)
    }
}

fn unit_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermitianMatrix {
    let h = random::hermitian(rng, d);
    let n = h.as_matrix().norm();
    h.scale(1.0 / n.max(f64::MIN_POSITIVE))
}

/// Searches random two-sided perturbations `(exp(irX), exp(irY))` of `(I, I)`
/// for a value of `Δ` below `Φ(G0)`, and turns the best direction into a
/// sampled curve with a monotone decrease.
pub fn search_descent_eig(
    norm: &NormSpec,
    s: &HermitianMatrix,
    g0: &HermitianMatrix,
    opts: &CertifyOptions,
) -> Result<Option<DescentCurve>> {
    let d = s.dim();
    if d < 2 {
        return Ok(None);
    }
    let phi0 = phi(norm, s, g0)?;
    let threshold = DROP_TOL * (1.0 + phi0);
    let mut rng = random::seeded(opts.seed);
    for &r in &opts.radii {
        let mut best: Option<(f64, HermitianMatrix, HermitianMatrix)> = None;
        for _ in 0..opts.search_samples {
            let x = unit_hermitian(&mut rng, d).scale(r);
            let y = unit_hermitian(&mut rng, d).scale(r);
            let val = delta_map(norm, s, g0, &UnitaryMatrix::exp_i(&x)?, &UnitaryMatrix::exp_i(&y)?)?;
            if best.as_ref().is_none_or(|b| val < b.0) {
                best = Some((val, x, y));
            }
        }
        let Some((val, mut x, mut y)) = best else { continue };
        if val >= phi0 - threshold {
            continue;
        }
        for _ in 0..4 {
            let path = CurvePath::TwoSidedEig { g0: g0.clone(), x: x.clone(), y: y.clone() };
            let curve = DescentCurve::sample(CurveKind::SpectralPath, path, 1e-6, 1.0, |p| {
                hermitian_objective(norm, s, p)
            })?;
            if curve.is_verified() && curve.is_monotone_decreasing(1e-12 * (1.0 + phi0)) {
                return Ok(Some(curve));
            }
            // keep the decreasing part of the direction
            let t = curve.best_sample().t;
            x = x.scale(t);
            y = y.scale(t);
        }
    }
    Ok(None)
}

/// Tests whether `G0` is a local (hence global) minimizer of `Φ` on its
/// orbit for a strictly convex norm.
pub fn certify_local_eig(
    norm: &NormSpec,
    s: &HermitianMatrix,
    g0: &HermitianMatrix,
    opts: &CertifyOptions,
) -> Result<EigCertificate> {
    norm.require_strictly_convex()?;
    same_dim(s.dim(), g0.dim(), "certify")?;
    let phi0 = phi(norm, s, g0)?;
    let mu = g0.eigenvalues();
    let global_phi = phi(norm, s, &global_minimizer_eig(s, &mu)?)?;
    let comm = commutator(s.as_matrix(), g0.as_matrix())?.norm();
    let scale = 1.0 + s.op_norm() * g0.op_norm();
    let mut cert = EigCertificate {
        verdict: Verdict::Inconclusive,
        commutator_residual: comm,
        joint_basis: None,
        alignment_ok: false,
        descent_witness: None,
        phi: phi0,
        global_phi,
    };
    if comm > opts.tol * scale {
        if let Some(curve) = search_descent_eig(norm, s, g0, opts)? {
            cert.verdict = Verdict::NotLocalMin;
            cert.descent_witness = Some(curve);
        }
        return Ok(cert);
    }
    let joint = joint_eigenbasis(s, g0)?;
    cert.joint_basis = Some(joint.basis.clone());
    if let Some(j) = first_misalignment(&joint.nu) {
        let curve = descent_curve_eig(norm, s, g0, j, &joint.basis)?;
        if curve.is_verified() {
            cert.verdict = Verdict::NotLocalMin;
        }
        cert.descent_witness = Some(curve);
        return Ok(cert);
    }
    cert.alignment_ok = true;
    let lhs = s.sub(g0)?.eigenvalues();
    let lam = s.eigenvalues();
    let rhs = sort_desc(&lam.iter().zip(mu.iter()).map(|(a, b)| a - b).collect::<Vec<_>>());
    let gap = lhs.iter().zip(rhs.iter()).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    if gap <= opts.tol.max(1e-9) * scale * 10.0 {
        cert.verdict = Verdict::CertifiedGlobal;
    }
    Ok(cert)
}
