//! Frames with prescribed norms and the distance `Θ(G) = N(S - S_G)` on the
//! product of spheres `T_d(a) = {G : |g_i|^2 = a_i}`.

use rand::Rng;
use serde::Serialize;

use crate::curve::{CurveKind, CurvePath, CurvePoint, DescentCurve};
use crate::error::{Error, Result};
use crate::linalg::{eigh, singular_values, CVector, GeneralMatrix, HermitianMatrix, C64};
use crate::norms::NormSpec;
use crate::random;
use crate::tol::{clusters, gap_tol, SPHERE_TOL};

/// A finite sequence `{g_i}` in `C^d` with `|g_i|^2 = a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSequence {
    vectors: Vec<CVector>,
    a: Vec<f64>,
}

impl FrameSequence {
    /// Validates dimensions, positivity of `a` and sphere membership.
    pub fn new(vectors: Vec<CVector>, a: Vec<f64>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Precondition("frame must contain at least one vector".into()));
        }
        if vectors.len() != a.len() {
            return Err(Error::DimensionMismatch(format!("{} vectors but {} norms", vectors.len(), a.len())));
        }
        let d = vectors[0].len();
        for (i, (g, &ai)) in vectors.iter().zip(&a).enumerate() {
            if g.len() != d {
                return Err(Error::DimensionMismatch(format!("vector {i} has length {}, expected {d}", g.len())));
            }
            if !(ai > 0.0) || !ai.is_finite() {
                return Err(Error::Precondition(format!("norm a_{i} = {ai} must be positive")));
            }
            if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            let residual = (g.norm_squared() - ai).abs() / ai;
            if residual > SPHERE_TOL {
                return Err(Error::OffSphere { index: i, residual });
            }
        }
        Ok(FrameSequence { vectors, a })
    }

    /// Rescales each vector onto its sphere. Zero vectors are rejected.
    pub fn normalized(vectors: Vec<CVector>, a: Vec<f64>) -> Result<Self> {
        let mut out = Vec::with_capacity(vectors.len());
        for (i, (g, &ai)) in vectors.into_iter().zip(&a).enumerate() {
            let n = g.norm();
            if !(n > 0.0) {
                return Err(Error::Precondition(format!("vector {i} is zero")));
            }
            out.push(g * C64::new(ai.sqrt() / n, 0.0));
        }
        FrameSequence::new(out, a)
    }

    pub(crate) fn new_unchecked(vectors: Vec<CVector>, a: Vec<f64>) -> Self {
        FrameSequence { vectors, a }
    }

    /// Random point of `T_d(a)`: normalized complex Gaussian vectors.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, a: &[f64]) -> Result<Self> {
        let vectors = (0..a.len())
            .map(|_| CVector::from_column_slice(random::complex_gaussian(rng, d, 1).as_slice()))
            .collect();
        FrameSequence::normalized(vectors, a.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn norms(&self) -> &[f64] {
        &self.a
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    /// `max_i ||g_i|^2 - a_i| / a_i`.
    pub fn sphere_residual(&self) -> f64 {
        self.vectors
            .iter()
            .zip(&self.a)
            .fold(0.0, |m: f64, (g, &ai)| m.max((g.norm_squared() - ai).abs() / ai))
    }
}

/// The `d x k` matrix with columns `g_i`.
pub fn synthesis(g: &FrameSequence) -> GeneralMatrix {
    GeneralMatrix::from_columns(g.vectors())
}

/// `S_G = ∑ g_i ⊗ g_i`.
pub fn frame_operator(g: &FrameSequence) -> HermitianMatrix {
    let t = synthesis(g);
    HermitianMatrix::symmetrize(&t * t.adjoint())
}

/// `Θ(G) = N(S - S_G)`.
pub fn theta(norm: &NormSpec, s: &HermitianMatrix, g: &FrameSequence) -> Result<f64> {
    crate::linalg::same_dim(s.dim(), g.dim(), "theta")?;
    Ok(norm.evaluate_hermitian(&s.sub(&frame_operator(g))?))
}

/// Water level `c` with `∑ (λ_i - c)^+ = t`, and the spectrum
/// `((λ_i - c)^+)_i`.
pub fn water_fill(lambda: &[f64], t: f64) -> Result<(f64, Vec<f64>)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Precondition(format!("trace budget t = {t} must be positive")));
    }
    if lambda.is_empty() {
        return Err(Error::Precondition("empty spectrum".into()));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) || lambda.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotSorted);
    }
    if lambda.iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("spectrum must be non-negative".into()));
    }
    let d = lambda.len();
    let mut c = 0.0;
    let mut partial = 0.0;
    for r in 1..=d {
        partial += lambda[r - 1];
        c = (partial - t) / r as f64;
        // c must separate the r filled levels from the rest
        if r == d || lambda[r] <= c {
            break;
        }
    }
    let spectrum = lambda.iter().map(|&l| (l - c).max(0.0)).collect();
    Ok((c, spectrum))
}

/// `min {N(S - A) : A >= 0, tr A = t}` and its minimizer
/// `A^op = ∑ (λ_i - c)^+ v_i ⊗ v_i`. With `t = ∑ a_i` this bounds `Θ` from
/// below on `T_d(a)`.
pub fn naive_lower_bound(norm: &NormSpec, s: &HermitianMatrix, t: f64) -> Result<(f64, HermitianMatrix)> {
    let (lam, v) = eigh(s)?;
    // clip round-off below zero
    let scale = 1.0 + lam.first().map(|x| x.abs()).unwrap_or(0.0);
    if lam.iter().any(|&x| x < -1e-12 * scale) {
        return Err(Error::Precondition("S must be positive semidefinite".into()));
    }
    let lam: Vec<f64> = lam.iter().map(|&x| x.max(0.0)).collect();
    let (_, spec) = water_fill(&lam, t)?;
    let a_op = HermitianMatrix::from_spectral(&v, &spec);
    Ok((norm.evaluate_hermitian(&s.sub(&a_op)?), a_op))
}

/// One cluster `J_j` of vectors sharing the fitted eigenvalue `c_j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FodCluster {
    pub c: f64,
    pub members: Vec<usize>,
    /// `dim W_j = dim span {g_l : l ∈ J_j}`.
    pub dim_w: usize,
    /// Some eigenvalue of `S - S_0` exceeds `c`, so the members must be
    /// linearly independent.
    pub independence_required: bool,
    pub independent: bool,
}

/// First failed necessary condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureWitness {
    /// `g_index` is not an eigenvector of `S - S_0`.
    Eigenvector { index: usize, residual: f64 },
    /// `S` and `S_0` do not commute.
    Commutator { residual: f64 },
    /// `λ(S - S_0) ≠ (λ(S) - λ(S_0))↓`.
    Alignment { gap: f64 },
    /// A cluster below a larger eigenvalue is linearly dependent.
    DependentCluster { cluster: usize, rank: usize, size: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum StructureVerdict {
    ConsistentWithLocalMin,
    ViolatesStructure(StructureWitness),
}

/// Necessary conditions for a local minimizer of `Θ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FodStructureReport {
    /// `|(S - S_0) g_j - c(j) g_j| / |g_j|`.
    pub eigvec_residuals: Vec<f64>,
    /// Rayleigh quotients `c(j)`.
    pub fitted_eigenvalues: Vec<f64>,
    /// `|[S, S_0]|_F`.
    pub commute_residual: f64,
    pub lidskii_gap: f64,
    pub lidskii_aligned: bool,
    /// Clusters ordered by increasing `c_j`.
    pub partition: Vec<FodCluster>,
    pub theta: f64,
    pub verdict: StructureVerdict,
}

impl FodStructureReport {
    pub fn is_consistent(&self) -> bool {
        self.verdict == StructureVerdict::ConsistentWithLocalMin
    }
}

/// Numerical rank of a set of vectors, cut relative to the largest
/// singular value.
fn numerical_rank(vectors: &[CVector], rel: f64) -> usize {
    let m = GeneralMatrix::from_columns(vectors);
    let s = singular_values(&m);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rel * top).count()
}

struct Fitted {
    m: HermitianMatrix,
    scale: f64,
    c: Vec<f64>,
    residuals: Vec<f64>,
    partition: Vec<FodCluster>,
    mu: Vec<f64>,
}

fn fit(s: &HermitianMatrix, g0: &FrameSequence, tol: f64) -> Result<Fitted> {
    crate::linalg::same_dim(s.dim(), g0.dim(), "structure check")?;
    let s0 = frame_operator(g0);
    let m = s.sub(&s0)?;
    let scale = 1.0 + s.op_norm() + s0.op_norm();
    let mut c = Vec::with_capacity(g0.len());
    let mut residuals = Vec::with_capacity(g0.len());
    for g in g0.vectors() {
        let mg = m.as_matrix() * g;
        let n2 = g.norm_squared();
        let cj = g.dotc(&mg).re / n2;
        c.push(cj);
        residuals.push((mg - g * C64::new(cj, 0.0)).norm() / n2.sqrt());
    }
    let mu = m.eigenvalues().into_vec();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&x, &y| c[x].total_cmp(&c[y]));
    let sorted: Vec<f64> = order.iter().map(|&i| c[i]).collect();
    let thr = gap_tol(&sorted).max(tol * scale);
    let mut partition = Vec::new();
    for range in clusters(&sorted, thr) {
        let members: Vec<usize> = order[range.clone()].to_vec();
        let cj = sorted[range.clone()].iter().sum::<f64>() / range.len() as f64;
        let vecs: Vec<CVector> = members.iter().map(|&l| g0.vectors()[l].clone()).collect();
        let dim_w = numerical_rank(&vecs, tol.max(1e-8));
        let independence_required = mu.iter().any(|&x| x > cj + thr);
        partition.push(FodCluster {
            c: cj,
            independent: dim_w == members.len(),
            members,
            dim_w,
            independence_required,
        });
    }
    Ok(Fitted { m, scale, c, residuals, partition, mu })
}

/// Evaluates the conditions a local minimizer of `Θ` must satisfy for a
/// strictly convex norm: every `g_j` is an eigenvector of `S - S_0`,
/// `[S, S_0] = 0`, `λ(S - S_0) = (λ(S) - λ(S_0))↓`, and every cluster lying
/// below a larger eigenvalue of `S - S_0` is linearly independent.
pub fn structure_check_local(
    norm: &NormSpec,
    s: &HermitianMatrix,
    g0: &FrameSequence,
    tol: f64,
) -> Result<FodStructureReport> {
    let sphere = g0.sphere_residual();
    if sphere > SPHERE_TOL.max(tol) {
        let index = g0
            .vectors()
            .iter()
            .zip(g0.norms())
            .position(|(g, &a)| (g.norm_squared() - a).abs() / a > SPHERE_TOL.max(tol))
            .unwrap_or(0);
        return Err(Error::OffSphere { index, residual: sphere });
    }
    let f = fit(s, g0, tol)?;
    let s0 = frame_operator(g0);
    let commute_residual = crate::linalg::commutator(s.as_matrix(), s0.as_matrix())?.norm();
    let ls = s.eigenvalues();
    let l0 = s0.eigenvalues();
    let expect = crate::majorization::sort_desc(&ls.iter().zip(l0.iter()).map(|(a, b)| a - b).collect::<Vec<_>>());
    let lidskii_gap = f.mu.iter().zip(expect.iter()).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
    let bound = tol * f.scale;
    let lidskii_aligned = lidskii_gap <= bound;

    let verdict = if let Some(index) = f.residuals.iter().position(|&r| r > bound) {
        StructureVerdict::ViolatesStructure(StructureWitness::Eigenvector { index, residual: f.residuals[index] })
    } else if commute_residual > bound * f.scale {
        StructureVerdict::ViolatesStructure(StructureWitness::Commutator { residual: commute_residual })
    } else if !lidskii_aligned {
        StructureVerdict::ViolatesStructure(StructureWitness::Alignment { gap: lidskii_gap })
    } else if let Some(j) = f.partition.iter().position(|c| c.independence_required && !c.independent) {
        let c = &f.partition[j];
        StructureVerdict::ViolatesStructure(StructureWitness::DependentCluster {
            cluster: j,
            rank: c.dim_w,
            size: c.members.len(),
        })
    } else {
        StructureVerdict::ConsistentWithLocalMin
    };
    Ok(FodStructureReport {
        eigvec_residuals: f.residuals,
        fitted_eigenvalues: f.c,
        commute_residual,
        lidskii_gap,
        lidskii_aligned,
        partition: f.partition,
        theta: norm.evaluate_hermitian(&f.m),
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialCaseVerdict {
    CertifiedGlobal,
    NotApplicable,
    Violates,
}

/// With `k >= d`, a point where every `g_i` is an eigenvector of `S - S_0`
/// for one common eigenvalue `c_1` is a global minimizer, and then
/// `λ(S_0) = ((λ_i(S) - c_1)^+)_i`.
pub fn special_case_certify(
    norm: &NormSpec,
    s: &HermitianMatrix,
    g0: &FrameSequence,
    tol: f64,
) -> Result<SpecialCaseVerdict> {
    norm.require_strictly_convex()?;
    if g0.len() < g0.dim() {
        return Err(Error::Precondition(format!("needs k >= d, got k = {} < d = {}", g0.len(), g0.dim())));
    }
    let f = fit(s, g0, tol)?;
    let bound = tol * f.scale;
    let (lo, hi) = f.c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    if f.residuals.iter().any(|&r| r > bound) || hi - lo > bound {
        return Ok(SpecialCaseVerdict::NotApplicable);
    }
    let c1 = f.c.iter().sum::<f64>() / f.c.len() as f64;
    let l0 = frame_operator(g0).eigenvalues();
    let ok = s.eigenvalues().iter().zip(l0.iter()).all(|(&l, &x)| ((l - c1).max(0.0) - x).abs() <= bound);
    Ok(if ok { SpecialCaseVerdict::CertifiedGlobal } else { SpecialCaseVerdict::Violates })
}

/// Options for [`fod_descent`].
#[derive(Clone, Debug)]
pub struct FodOptions {
    pub norm: NormSpec,
    pub max_iters: usize,
    /// Stop when the Riemannian gradient norm drops below this.
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Relative slack of the Armijo test. Rounding the vectors back onto
    /// their spheres moves `Θ^2` by about `1e-15 (1 + Θ^2)` whatever the step.
    pub noise: f64,
}

impl Default for FodOptions {
    fn default() -> Self {
        FodOptions {
            norm: NormSpec::Frobenius,
            max_iters: 20_000,
            grad_tol: 1e-10,
            armijo_c: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
            noise: 1e-14,
        }
    }
}

/// Result of [`fod_descent`].
#[derive(Clone, Debug, Serialize)]
pub struct FodRun {
    #[serde(serialize_with = "serialize_frame")]
    pub frame: FrameSequence,
    /// `Θ` after every accepted step, starting with the initial point.
    pub trace: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
}

fn serialize_frame<S: serde::Serializer>(f: &FrameSequence, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::io::FrameJson::from(f).serialize(s)
}

/// `Θ^2` and `∇_M Θ^2` at `M = S - S_G`.
fn objective_and_gradient(norm: &NormSpec, m: &HermitianMatrix) -> Result<(f64, GeneralMatrix)> {
    match *norm {
        NormSpec::Frobenius => {
            let f = m.as_matrix().norm_squared();
            Ok((f, m.as_matrix() * C64::new(2.0, 0.0)))
        }
        NormSpec::Schatten { p } if p > 1.0 => {
            let (mu, v) = eigh(m)?;
            let th = norm.gauge(&mu);
            if th == 0.0 {
                return Ok((0.0, GeneralMatrix::zeros(m.dim(), m.dim())));
            }
            // ∇Θ = Θ^{1-p} V diag(sgn μ |μ|^{p-1}) V*, scaled by 2Θ
            let w: Vec<f64> = mu.iter().map(|&x| 2.0 * x.signum() * (x.abs() / th).powf(p - 1.0) * th).collect();
            Ok((th * th, HermitianMatrix::from_spectral(&v, &w).into_matrix()))
        }
        _ => Err(Error::NotStrictlyConvex(norm.to_string())),
    }
}

/// Riemannian gradient of `Θ^2` on the product of spheres.
fn riemannian_gradient(grad_m: &GeneralMatrix, g: &FrameSequence) -> Vec<CVector> {
    g.vectors()
        .iter()
        .map(|gi| {
            let e = -(grad_m * gi) * C64::new(2.0, 0.0);
            let radial = gi.dotc(&e).re / gi.norm_squared();
            e - gi * C64::new(radial, 0.0)
        })
        .collect()
}

fn retract(g: &FrameSequence, dir: &[CVector], step: f64) -> FrameSequence {
    let vectors = g
        .vectors()
        .iter()
        .zip(dir)
        .zip(g.norms())
        .map(|((gi, di), &ai)| {
            let x = gi - di * C64::new(step, 0.0);
            let n = x.norm();
            x * C64::new(ai.sqrt() / n, 0.0)
        })
        .collect();
    FrameSequence::new_unchecked(vectors, g.norms().to_vec())
}

/// Projected gradient descent on `Θ^2` over `T_d(a)` from a random start
/// drawn with `seed`. Each step moves against the gradient, rescales every
/// vector back onto its sphere, and backtracks until the Armijo condition
/// holds.
pub fn fod_descent(s: &HermitianMatrix, a: &[f64], seed: u64, opts: &FodOptions) -> Result<FodRun> {
    let mut rng = random::seeded(seed);
    let start = FrameSequence::random(&mut rng, s.dim(), a)?;
    let mut run = fod_descent_from(s, start, opts)?;
    run.seed = seed;
    Ok(run)
}

/// [`fod_descent`] from a given starting frame.
pub fn fod_descent_from(s: &HermitianMatrix, start: FrameSequence, opts: &FodOptions) -> Result<FodRun> {
    crate::linalg::same_dim(s.dim(), start.dim(), "fod descent")?;
    let mut g = start;
    let eval = |g: &FrameSequence| -> Result<(f64, HermitianMatrix, GeneralMatrix)> {
        let m = s.sub(&frame_operator(g))?;
        let (f, grad) = objective_and_gradient(&opts.norm, &m)?;
        Ok((f, m, grad))
    };
    let frobenius = opts.norm == NormSpec::Frobenius;
    let (mut f, mut m, mut grad_m) = eval(&g)?;
    let mut trace = vec![f.sqrt()];
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    while iterations < opts.max_iters {
        let dir = riemannian_gradient(&grad_m, &g);
        let gn2: f64 = dir.iter().map(|x| x.norm_squared()).sum();
        grad_norm = gn2.sqrt();
        if grad_norm < opts.grad_tol {
            converged = true;
            break;
        }
        let mut step = 1.0 / (8.0 * frame_operator(&g).op_norm() + 1.0);
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let cand = retract(&g, &dir, step);
            let (fc, mc, gc) = eval(&cand)?;
            if !fc.is_finite() {
                return Err(Error::Diverged(iterations));
            }
            // the difference of two O(f) numbers loses the small decreases
            // near convergence; the Frobenius change has a cancellation-free form
            let delta = if frobenius { frobenius_change(&m, &g, &cand) } else { fc - f };
            if delta <= -opts.armijo_c * step * gn2 + opts.noise * (1.0 + f) {
                accepted = Some((cand, fc, mc, gc));
                break;
            }
            step *= opts.backtrack;
        }
        iterations += 1;
        let Some((cand, fc, mc, gc)) = accepted else { break };
        g = cand;
        f = fc;
        m = mc;
        grad_m = gc;
        trace.push(f.sqrt());
    }
    if !converged && grad_norm < opts.grad_tol {
        converged = true;
    }
    Ok(FodRun { frame: g, trace, grad_norm, iterations, converged, seed: 0 })
}

/// `|M - D|_F^2 - |M|_F^2 = -2 Re tr(M D) + |D|_F^2` with
/// `D = S_new - S_old = ∑ (δ_i g_i* + g_i δ_i* + δ_i δ_i*)`, `δ_i = g'_i - g_i`.
fn frobenius_change(m: &HermitianMatrix, old: &FrameSequence, new: &FrameSequence) -> f64 {
    let d = old.dim();
    let mut dm = GeneralMatrix::zeros(d, d);
    for (g, h) in old.vectors().iter().zip(new.vectors()) {
        let delta = h - g;
        dm += &delta * g.adjoint() + g * delta.adjoint() + &delta * delta.adjoint();
    }
    let cross: f64 = m.as_matrix().iter().zip(dm.iter()).map(|(x, y)| (x.conj() * y).re).sum();
    -2.0 * cross + dm.norm_squared()
}

/// Independent runs from `restarts` seeds derived from `seed`, in restart
/// order.
pub fn fod_restarts(s: &HermitianMatrix, a: &[f64], seed: u64, restarts: usize, opts: &FodOptions) -> Result<Vec<FodRun>> {
    (0..restarts.max(1)).map(|r| fod_descent(s, a, restart_seed(seed, r), opts)).collect()
}

/// Seed of restart `r`.
pub fn restart_seed(seed: u64, r: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(r as u64)
}

/// Escape curve for a linearly dependent cluster `J_j` below a larger
/// eigenvalue of `S - S_0`: with `∑ conj(z_l) a_l^{1/2} g_l = 0` and `h` a
/// unit eigenvector for the largest eigenvalue,
/// `g_l(t) = (1 - t^2|z_l|^2)^{1/2} g_l + t z_l a_l^{1/2} h` stays on the
/// spheres and strictly lowers `Θ` for small `t`.
/// Returns `None` when the cluster is independent or already on top.
pub fn escape_move(
    norm: &NormSpec,
    s: &HermitianMatrix,
    g0: &FrameSequence,
    cluster_index: usize,
    tol: f64,
) -> Result<Option<DescentCurve>> {
    let f = fit(s, g0, tol)?;
    let Some(cluster) = f.partition.get(cluster_index) else {
        return Ok(None);
    };
    if !cluster.independence_required || cluster.independent {
        return Ok(None);
    }
    let members = cluster.members.clone();
    // columns a_l^{1/2} g_l; a kernel vector w gives z = conj(w)
    let cols: Vec<CVector> = members.iter().map(|&l| &g0.vectors()[l] * C64::new(g0.norms()[l].sqrt(), 0.0)).collect();
    let t = GeneralMatrix::from_columns(&cols);
    let gram = HermitianMatrix::symmetrize(t.adjoint() * &t);
    let (_, w) = eigh(&gram)?;
    let kernel = w.column(members.len() - 1);
    let zmax = kernel.iter().fold(0.0, |m: f64, x| m.max(x.norm()));
    let z: Vec<C64> = kernel.iter().map(|x| x.conj() * (0.5 / zmax)).collect();

    let (mu, v) = eigh(&f.m)?;
    if !(mu[0] > cluster.c) {
        return Ok(None);
    }
    let mut h = v.column(0);
    // remove the component along span {g_l : l ∈ J_j}
    let (pl, pv) = eigh(&HermitianMatrix::symmetrize(&t * t.adjoint()))?;
    for (i, &x) in pl.iter().enumerate() {
        if x > 1e-12 * pl[0] {
            let q = pv.column(i);
            h -= &q * q.dotc(&h);
        }
    }
    let hn = h.norm();
    if !(hn > 0.5) {
        return Ok(None);
    }
    h /= C64::new(hn, 0.0);

    let path = CurvePath::Escape { g0: g0.clone(), members, z, h };
    let objective = |p: &CurvePoint| match p {
        CurvePoint::Frame(g) => theta(norm, s, g).unwrap_or(f64::NAN),
        _ => f64::NAN,
    };
    let curve = DescentCurve::sample(CurveKind::Escape { cluster: cluster_index }, path, 1e-6 * 0.49, 0.49, objective)?;
    Ok(Some(curve))
}
