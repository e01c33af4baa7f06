//! Distances from a square `A` to the singular-value orbit
//! `V_s = {C : s(C) = s}`.
//!
//! Local minimizers of `Ψ(C) = N(A - C)` for a strictly convex norm are
//! exactly the matrices sharing an ordered SVD frame with `A`; candidates
//! that fail this get an explicit descent curve.

use rand::Rng;
use serde::Serialize;

use crate::curve::{CurveKind, CurvePath, CurvePoint, DescentCurve, DROP_TOL};
use crate::eig_orbit::{certify_local_eig, CertifyOptions, Verdict};
use crate::error::{Error, Result};
use crate::io::MatrixJson;
use crate::linalg::{
    block_diag, diag, op_norm, same_dim, singular_values, svd, GeneralMatrix, HermitianMatrix,
    SpectrumVector, UnitaryMatrix,
};
use crate::majorization::sort_desc;
use crate::norms::NormSpec;
use crate::random;
use crate::tol::{clusters, gap_tol, zero_tol};

/// The orbit `V_s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SvOrbitSpec {
    pub s: SpectrumVector,
    /// `s = 0`, whose orbit is the single point `0`.
    pub permits_zero: bool,
}

impl SvOrbitSpec {
    pub fn new(s: SpectrumVector) -> Result<Self> {
        if s.iter().any(|&x| x < 0.0) {
            return Err(Error::Precondition("singular values must be non-negative".into()));
        }
        let permits_zero = s.iter().all(|&x| x == 0.0);
        Ok(SvOrbitSpec { s, permits_zero })
    }

    pub fn dim(&self) -> usize {
        self.s.len()
    }

    pub fn contains(&self, c: &GeneralMatrix, tol: f64) -> bool {
        if c.nrows() != self.dim() || c.ncols() != self.dim() {
            return false;
        }
        let sc = singular_values(c);
        let scale = 1.0 + self.s.first().copied().unwrap_or(0.0);
        sc.iter().zip(self.s.iter()).all(|(a, b)| (a - b).abs() <= tol * scale)
    }
}

/// `Ψ(C) = N(A - C)`.
pub fn psi(norm: &NormSpec, a: &GeneralMatrix, c: &GeneralMatrix) -> Result<f64> {
    if a.shape() != c.shape() {
        return Err(Error::DimensionMismatch(format!("psi: {:?} vs {:?}", a.shape(), c.shape())));
    }
    Ok(norm.evaluate(&(a - c)))
}

/// `B^op = V* D_s U` for `A = V* D_{s(A)} U`.
pub fn global_minimizer_sv(a: &GeneralMatrix, s: &SpectrumVector) -> Result<GeneralMatrix> {
    same_dim(a.nrows(), s.len(), "orbit singular values")?;
    if s.iter().any(|&x| x < 0.0) {
        return Err(Error::Precondition("singular values must be non-negative".into()));
    }
    let dec = svd(a)?;
    Ok(dec.v.as_matrix().adjoint() * diag(s) * dec.u.as_matrix())
}

/// Simultaneous decomposition `A = U D_α V*`, `B = U D_β V*`.
#[derive(Clone, Debug)]
pub struct JointSvd {
    pub u: UnitaryMatrix,
    pub v: UnitaryMatrix,
    /// `s(A)`.
    pub alpha: SpectrumVector,
    /// Diagonal of `U* B V`; entries may be negative.
    pub beta: Vec<f64>,
    /// `|U* A V - D_α|_F`.
    pub residual_a: f64,
    /// `|U* B V - D_β|_F`.
    pub residual_b: f64,
}

#[derive(Serialize)]
struct JointSvdJson {
    u: MatrixJson,
    v: MatrixJson,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    residual_a: f64,
    residual_b: f64,
}

impl Serialize for JointSvd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JointSvdJson {
            u: MatrixJson::from(self.u.as_matrix()),
            v: MatrixJson::from(self.v.as_matrix()),
            alpha: self.alpha.to_vec(),
            beta: self.beta.clone(),
            residual_a: self.residual_a,
            residual_b: self.residual_b,
        }
        .serialize(s)
    }
}

/// `(|A*B - (A*B)*|_F, |AB* - (AB*)*|_F)`.
pub fn hermitian_residuals(a: &GeneralMatrix, b: &GeneralMatrix) -> (f64, f64) {
    let p = a.adjoint() * b;
    let q = a * b.adjoint();
    ((&p - p.adjoint()).norm(), (&q - q.adjoint()).norm())
}

fn pair_scale(a: &GeneralMatrix, b: &GeneralMatrix) -> f64 {
    (1.0 + op_norm(a)) * (1.0 + op_norm(b))
}

/// Block algorithm: an SVD of `A` splits it into scalar blocks
/// `α_i I`; `B` must be block diagonal in that frame with Hermitian blocks
/// for `α_i ≠ 0`. Hermitian blocks are diagonalized by `eigh`, the block of
/// the zero singular value by an SVD.
pub fn joint_svd(a: &GeneralMatrix, b: &GeneralMatrix, tol: f64) -> Result<JointSvd> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!("joint svd: {:?} vs {:?}", a.shape(), b.shape())));
    }
    let d = a.nrows();
    let scale = pair_scale(a, b);
    let (r1, r2) = hermitian_residuals(a, b);
    if r1.max(r2) > tol * scale {
        return Err(Error::JointSvd(format!("A*B and AB* are not Hermitian (residuals {r1:.3e}, {r2:.3e})")));
    }
    let dec = svd(a)?;
    let alpha = dec.s.clone();
    // A = L D_α R*
    let l = dec.v.as_matrix().adjoint();
    let r = dec.u.as_matrix().adjoint();
    let bb = l.adjoint() * b * &r;

    let zt = zero_tol(alpha.first().copied().unwrap_or(0.0));
    let nonzero = alpha.iter().take_while(|&&x| x >= zt).count();
    let mut blocks = clusters(&alpha[..nonzero], gap_tol(&alpha));
    if nonzero < d {
        blocks.push(nonzero..d);
    }

    let mut mask = GeneralMatrix::zeros(d, d);
    for blk in &blocks {
        for i in blk.clone() {
            for j in blk.clone() {
                mask[(i, j)] = bb[(i, j)];
            }
        }
    }
    let off = (&bb - &mask).norm();
    if off > tol * scale {
        return Err(Error::JointSvd(format!("B is not block diagonal in the SVD frame of A (off-block mass {off:.3e})")));
    }

    let mut left = Vec::with_capacity(blocks.len());
    let mut right = Vec::with_capacity(blocks.len());
    let mut beta = Vec::with_capacity(d);
    for blk in &blocks {
        let sub = bb.view((blk.start, blk.start), (blk.len(), blk.len())).into_owned();
        if blk.start >= nonzero {
            let sd = svd(&sub)?;
            left.push(sd.v.as_matrix().adjoint());
            right.push(sd.u.as_matrix().adjoint());
            beta.extend(sd.s.iter());
        } else {
            let (vals, w) = crate::linalg::eigh(&HermitianMatrix::symmetrize(sub))?;
            left.push(w.as_matrix().clone());
            right.push(w.as_matrix().clone());
            beta.extend(vals.iter());
        }
    }
    let u = l * block_diag(&left);
    let v = r * block_diag(&right);
    let residual_a = (u.adjoint() * a * &v - diag(&alpha)).norm();
    let residual_b = (u.adjoint() * b * &v - diag(&beta)).norm();
    Ok(JointSvd {
        u: UnitaryMatrix::from_raw(u),
        v: UnitaryMatrix::from_raw(v),
        alpha,
        beta,
        residual_a,
        residual_b,
    })
}

/// `s(A - B) = |s(A) - s(B)|↓` within `tol`.
pub fn sv_equality_case(a: &GeneralMatrix, b: &GeneralMatrix, tol: f64) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let (sa, sb) = (singular_values(a), singular_values(b));
    let diff = sort_desc(&sa.iter().zip(sb.iter()).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>());
    let sd = singular_values(&(a - b));
    let scale = 1.0 + sa.first().copied().unwrap_or(0.0) + sb.first().copied().unwrap_or(0.0);
    Ok(sd.iter().zip(diff.iter()).all(|(x, y)| (x - y).abs() <= tol * scale))
}

/// Whether `A` and `B` have a joint SVD with both diagonals non-negative and
/// ordered together: the other side of [`sv_equality_case`].
pub fn joint_svd_exists(a: &GeneralMatrix, b: &GeneralMatrix, tol: f64) -> bool {
    let Ok(j) = joint_svd(a, b, tol) else { return false };
    let bt = tol * pair_scale(a, b);
    if j.beta.iter().any(|&x| x < -bt) {
        return false;
    }
    let n = j.beta.len();
    let ga = gap_tol(&j.alpha).max(bt);
    for i in 0..n {
        for k in i + 1..n {
            if j.alpha[i] > j.alpha[k] + ga && j.beta[i] < j.beta[k] - bt {
                return false;
            }
        }
    }
    true
}

/// Outcome of [`certify_local_sv`].
#[derive(Clone, Debug)]
pub struct SvCertificate {
    pub verdict: Verdict,
    pub hermitian_residuals: (f64, f64),
    pub joint: Option<JointSvd>,
    pub descent_witness: Option<DescentCurve>,
    /// `Ψ(B)`.
    pub psi: f64,
    /// `Ψ(B^op)`.
    pub global_psi: f64,
}

#[derive(Serialize)]
struct SvCertificateJson<'a> {
    verdict: Verdict,
    hermitian_residuals: [f64; 2],
    joint: Option<&'a JointSvd>,
    descent_witness: Option<&'a DescentCurve>,
    psi: f64,
    global_psi: f64,
}

impl Serialize for SvCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SvCertificateJson {
            verdict: self.verdict,
            hermitian_residuals: [self.hermitian_residuals.0, self.hermitian_residuals.1],
            joint: self.joint.as_ref(),
            descent_witness: self.descent_witness.as_ref(),
            psi: self.psi,
            global_psi: self.global_psi,
        }
        .serialize(s)
    }
}

fn general_objective(norm: &NormSpec, a: &GeneralMatrix, p: &CurvePoint) -> f64 {
    match p {
        CurvePoint::General(c) => norm.evaluate(&(a - c)),
        CurvePoint::Hermitian(h) => norm.evaluate(&(a - h.as_matrix())),
        CurvePoint::Frame(_) => f64::NAN,
    }
}

fn unit_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize, r: f64) -> HermitianMatrix {
    let h = random::hermitian(rng, d);
    let n = h.as_matrix().norm().max(f64::MIN_POSITIVE);
    h.scale(r / n)
}

/// Random search over `Ξ(U1, U2, V1, V2) = N(U1* A V1 - U2* B V2)` near the
/// identity for a value below `Ψ(B)`.
pub fn search_descent_sv(
    norm: &NormSpec,
    a: &GeneralMatrix,
    b: &GeneralMatrix,
    opts: &CertifyOptions,
) -> Result<Option<DescentCurve>> {
    let d = a.nrows();
    let psi0 = psi(norm, a, b)?;
    let threshold = DROP_TOL * (1.0 + psi0);
    let mut rng = random::seeded(opts.seed);
    for &r in &opts.radii {
        let mut best: Option<(f64, [HermitianMatrix; 4])> = None;
        for _ in 0..opts.search_samples {
            let gens = [
                unit_hermitian(&mut rng, d, r),
                unit_hermitian(&mut rng, d, r),
                unit_hermitian(&mut rng, d, r),
                unit_hermitian(&mut rng, d, r),
            ];
            let path = CurvePath::TwoSidedSv { b: b.clone(), gens: gens.clone() };
            let val = general_objective(norm, a, &path.point(1.0)?);
            if best.as_ref().is_none_or(|x| val < x.0) {
                best = Some((val, gens));
            }
        }
        let Some((val, mut gens)) = best else { continue };
        if val >= psi0 - threshold {
            continue;
        }
        for _ in 0..4 {
            let path = CurvePath::TwoSidedSv { b: b.clone(), gens: gens.clone() };
            let curve =
                DescentCurve::sample(CurveKind::SpectralPath, path, 1e-6, 1.0, |p| general_objective(norm, a, p))?;
            if curve.is_verified() && curve.is_monotone_decreasing(1e-12 * (1.0 + psi0)) {
                return Ok(Some(curve));
            }
            let t = curve.best_sample().t;
            gens = gens.map(|g| g.scale(t));
        }
    }
    Ok(None)
}

/// Tests whether `B` is a local (hence global) minimizer of `Ψ` on its
/// orbit `V_{s(B)}` for a strictly convex norm.
pub fn certify_local_sv(
    norm: &NormSpec,
    a: &GeneralMatrix,
    b: &GeneralMatrix,
    opts: &CertifyOptions,
) -> Result<SvCertificate> {
    norm.require_strictly_convex()?;
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!("certify: {:?} vs {:?}", a.shape(), b.shape())));
    }
    let psi0 = psi(norm, a, b)?;
    let sb = singular_values(b);
    let global_psi = psi(norm, a, &global_minimizer_sv(a, &sb)?)?;
    let residuals = hermitian_residuals(a, b);
    let mut cert = SvCertificate {
        verdict: Verdict::Inconclusive,
        hermitian_residuals: residuals,
        joint: None,
        descent_witness: None,
        psi: psi0,
        global_psi,
    };
    if b.iter().all(|z| z.norm() == 0.0) {
        cert.verdict = Verdict::CertifiedGlobal;
        return Ok(cert);
    }
    let scale = pair_scale(a, b);
    if residuals.0.max(residuals.1) > opts.tol * scale {
        if let Some(curve) = search_descent_sv(norm, a, b, opts)? {
            cert.verdict = Verdict::NotLocalMin;
            cert.descent_witness = Some(curve);
        }
        return Ok(cert);
    }
    let Ok(joint) = joint_svd(a, b, opts.tol) else { return Ok(cert) };
    let bt = opts.tol * scale;
    if let Some(l) = joint.beta.iter().position(|&x| x < -bt) {
        let path = CurvePath::Phase { u: joint.u.clone(), v: joint.v.clone(), beta: joint.beta.clone(), index: l };
        let pi = std::f64::consts::PI;
        let curve = DescentCurve::sample(CurveKind::Phase { index: l }, path, 1e-6 * pi, pi, |p| {
            general_objective(norm, a, p)
        })?;
        if curve.is_verified() {
            cert.verdict = Verdict::NotLocalMin;
        }
        cert.descent_witness = Some(curve);
        cert.joint = Some(joint);
        return Ok(cert);
    }
    // β >= 0: B = U D_β V* lies over the Hermitian orbit problem with
    // S = D_α and G0 = D_β
    let beta: Vec<f64> = joint.beta.iter().map(|&x| x.max(0.0)).collect();
    let s = HermitianMatrix::from_diagonal(&joint.alpha);
    let g0 = HermitianMatrix::from_diagonal(&beta);
    let inner = certify_local_eig(norm, &s, &g0, opts)?;
    match inner.verdict {
        Verdict::NotLocalMin => {
            let w = inner.descent_witness.expect("witness for not_local_min");
            let path = CurvePath::Lifted { u: joint.u.clone(), v: joint.v.clone(), inner: Box::new(w.path) };
            let curve = DescentCurve::sample(w.kind, path, w.samples[0].t, w.t_max, |p| general_objective(norm, a, p))?;
            if curve.is_verified() {
                cert.verdict = Verdict::NotLocalMin;
            }
            cert.descent_witness = Some(curve);
        }
        Verdict::CertifiedGlobal => {
            if sv_equality_case(a, b, opts.tol.max(1e-9) * 10.0)? {
                cert.verdict = Verdict::CertifiedGlobal;
            }
        }
        Verdict::Inconclusive => {}
    }
    cert.joint = Some(joint);
    Ok(cert)
}
