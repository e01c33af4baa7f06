//! Seeded invariant suite over every module.
//!
//! Instance `i` of property `k` draws from its own stream, so the summary
//! is identical for a given seed whatever the number of worker threads.

use lidskii_core::eig_orbit::{self, CertifyOptions, Verdict};
use lidskii_core::frame::{self, FodOptions, FrameSequence};
use lidskii_core::linalg::{
    commutant_is_trivial, diag, dilate, eigh, pi_submersion_test, singular_values, svd,
    HermitianMatrix, SpectrumVector,
};
use lidskii_core::majorization::majorizes;
use lidskii_core::random;
use lidskii_core::sv_orbit;
use lidskii_core::tol::{EIG_TOL, SVD_TOL};
use lidskii_core::NormSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::Scale;

/// Which end of the per-instance values is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Worst {
    /// Residual-like quantity, larger is worse.
    Max,
    /// Slack-like quantity, smaller is worse.
    Min,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub instances: usize,
    pub passed: usize,
    pub worst: Worst,
    pub worst_margin: f64,
    /// First failing instance and its message.
    pub first_failure: Option<(usize, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub scale: &'static str,
    pub all_passed: bool,
    pub properties: Vec<PropertyResult>,
}

/// Value of one instance: `Ok(v)` passes with margin `v`; `Err` fails.
type Check = fn(&mut ChaCha8Rng) -> Result<f64, String>;

struct Property {
    name: &'static str,
    /// Instances at small scale; medium runs ten times as many.
    count: usize,
    worst: Worst,
    check: Check,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn dim(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

fn sorted_uniform(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    SpectrumVector::from_unsorted(random::uniform_vec(rng, d, lo, hi)).into_vec()
}

fn eigh_reconstruction(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 8);
    let m = random::hermitian(rng, d);
    let (lam, u) = eigh(&m).map_err(err)?;
    let back = HermitianMatrix::from_spectral(&u, lam.as_slice());
    let r = (m.as_matrix() - back.as_matrix()).norm() / (1.0 + m.as_matrix().norm());
    if r <= EIG_TOL { Ok(r) } else { Err(format!("d = {d}, scaled residual {r:.3e}")) }
}

fn svd_reconstruction(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 8);
    let rank = rng.random_range(0..=d);
    let a = random::complex_gaussian(rng, d, rank) * random::complex_gaussian(rng, rank, d);
    let dec = svd(&a).map_err(err)?;
    let r = (&a - dec.recompose()).norm() / (1.0 + a.norm());
    let sorted = dec.s.windows(2).all(|w| w[0] >= w[1]) && dec.s.iter().all(|&x| x >= 0.0);
    if r <= SVD_TOL && sorted { Ok(r) } else { Err(format!("d = {d}, rank {rank}, scaled residual {r:.3e}")) }
}

fn dilation_spectrum(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 6);
    let c = random::complex_gaussian(rng, d, d);
    let s = singular_values(&c);
    let lam = dilate(&c).map_err(err)?.eigenvalues();
    let expect: Vec<f64> = s.iter().copied().chain(s.iter().rev().map(|x| -x)).collect();
    let dev = lam.iter().zip(&expect).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / (1.0 + s[0]);
    if dev <= EIG_TOL { Ok(dev) } else { Err(format!("d = {d}, deviation {dev:.3e}")) }
}

fn lidskii_majorization(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 7);
    let s = random::hermitian(rng, d);
    let g = random::hermitian(rng, d);
    let diff = s.sub(&g).map_err(err)?.eigenvalues();
    let (ls, lg) = (s.eigenvalues(), g.eigenvalues());
    let shifted: Vec<f64> = ls.iter().zip(lg.iter()).map(|(a, b)| a - b).collect();
    let v = majorizes(diff.as_slice(), &shifted, 1e-9).map_err(err)?;
    let scale = 1.0 + s.op_norm() + g.op_norm();
    if v.holds { Ok(v.margin / scale) } else { Err(format!("d = {d}, margin {:.3e}", v.margin)) }
}

fn norm_for(rng: &mut ChaCha8Rng, d: usize) -> NormSpec {
    match rng.random_range(0..4) {
        0 => NormSpec::Frobenius,
        1 => NormSpec::Schatten { p: rng.random_range(1.1..4.0) },
        2 => NormSpec::Spectral,
        _ => NormSpec::Kyfan { k: rng.random_range(1..=d) },
    }
}

fn eig_global_minimizer(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 6);
    let norm = norm_for(rng, d);
    let s = random::hermitian(rng, d);
    let mu = SpectrumVector::from_unsorted(random::uniform_vec(rng, d, -2.0, 2.0));
    let g_op = eig_orbit::global_minimizer_eig(&s, &mu).map_err(err)?;
    let best = eig_orbit::phi(&norm, &s, &g_op).map_err(err)?;
    let u = random::haar(rng, d);
    let g = HermitianMatrix::from_spectral(&u, mu.as_slice());
    let other = eig_orbit::phi(&norm, &s, &g).map_err(err)?;
    let slack = (other - best) / (1.0 + best);
    if slack >= -1e-10 { Ok(slack) } else { Err(format!("{norm}: Φ(G) - Φ(G^op) = {slack:.3e}")) }
}

fn sv_global_minimizer(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 6);
    let norm = norm_for(rng, d);
    let a = random::complex_gaussian(rng, d, d);
    let sv = SpectrumVector::from_unsorted(random::uniform_vec(rng, d, 0.0, 3.0));
    let c_op = sv_orbit::global_minimizer_sv(&a, &sv).map_err(err)?;
    let best = sv_orbit::psi(&norm, &a, &c_op).map_err(err)?;
    let c = random::haar(rng, d).as_matrix() * diag(sv.as_slice()) * random::haar(rng, d).as_matrix();
    let other = sv_orbit::psi(&norm, &a, &c).map_err(err)?;
    let slack = (other - best) / (1.0 + best);
    if slack >= -1e-10 { Ok(slack) } else { Err(format!("{norm}: Ψ(C) - Ψ(C^op) = {slack:.3e}")) }
}

fn aligned_pair_certified(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 4);
    let u = random::haar(rng, d);
    let s = HermitianMatrix::from_spectral(&u, &sorted_uniform(rng, d, -2.0, 2.0));
    let g0 = HermitianMatrix::from_spectral(&u, &sorted_uniform(rng, d, -2.0, 2.0));
    let cert = eig_orbit::certify_local_eig(&NormSpec::Frobenius, &s, &g0, &CertifyOptions::default()).map_err(err)?;
    if cert.verdict == Verdict::CertifiedGlobal {
        Ok(cert.commutator_residual)
    } else {
        Err(format!("d = {d}, verdict {:?}", cert.verdict))
    }
}

fn misaligned_pair_rejected(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 2, 4);
    let u = random::haar(rng, d);
    let lam = sorted_uniform(rng, d, -2.0, 2.0);
    let mut mu: Vec<f64> = (0..d).map(|i| i as f64 + rng.random_range(0.1..0.9)).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    // swap one adjacent pair out of order
    let j = rng.random_range(0..d - 1);
    mu.swap(j, j + 1);
    let s = HermitianMatrix::from_spectral(&u, &lam);
    let g0 = HermitianMatrix::from_spectral(&u, &mu);
    let cert = eig_orbit::certify_local_eig(&NormSpec::Frobenius, &s, &g0, &CertifyOptions::default()).map_err(err)?;
    match (&cert.verdict, &cert.descent_witness) {
        (Verdict::NotLocalMin, Some(w)) if w.is_verified() => Ok(w.verified_drop),
        _ => Err(format!("d = {d}, verdict {:?}", cert.verdict)),
    }
}

fn commutant_basis_invariance(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 4);
    let s = random::hermitian(rng, d);
    let g0 = random::hermitian(rng, d);
    let u = random::haar(rng, d);
    let before = commutant_is_trivial(&s, &g0, 1e-8).map_err(err)?;
    let after = commutant_is_trivial(&s.conjugate_by(&u), &g0.conjugate_by(&u), 1e-8).map_err(err)?;
    if before == after { Ok(after.kernel_dim as f64) } else { Err(format!("{before:?} vs {after:?}")) }
}

fn pi_submersion_joint_pairs(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 3);
    let (u, v) = (random::haar(rng, d), random::haar(rng, d));
    let alpha = sorted_uniform(rng, d, 0.0, 2.0);
    let beta = random::uniform_vec(rng, d, -2.0, 2.0);
    let a = u.as_matrix() * diag(&alpha) * v.as_matrix().adjoint();
    let b = u.as_matrix() * diag(&beta) * v.as_matrix().adjoint();
    let t = pi_submersion_test(&a, &b, 1e-8).map_err(err)?;
    if !t.submersion { Ok(t.kernel_dim as f64) } else { Err(format!("d = {d}, reported a submersion")) }
}

fn joint_svd_residual(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 5);
    let (u, v) = (random::haar(rng, d), random::haar(rng, d));
    let alpha = sorted_uniform(rng, d, 0.5, 3.0);
    let beta = random::uniform_vec(rng, d, -2.0, 2.0);
    let a = u.as_matrix() * diag(&alpha) * v.as_matrix().adjoint();
    let b = u.as_matrix() * diag(&beta) * v.as_matrix().adjoint();
    let j = sv_orbit::joint_svd(&a, &b, 1e-8).map_err(err)?;
    let scale = (1.0 + a.norm()) * (1.0 + b.norm());
    let r = j.residual_a.max(j.residual_b) / scale;
    if r <= 1e-9 { Ok(r) } else { Err(format!("d = {d}, scaled residual {r:.3e}")) }
}

fn water_fill_budget(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 8);
    let lam = sorted_uniform(rng, d, 0.0, 5.0);
    let t = rng.random_range(0.1..10.0);
    let (c, spec) = frame::water_fill(&lam, t).map_err(err)?;
    let root: f64 = lam.iter().map(|&l| (l - c).max(0.0)).sum::<f64>() - t;
    let sum: f64 = spec.iter().sum::<f64>() - t;
    let r = root.abs().max(sum.abs()) / (1.0 + t);
    if r <= 1e-12 && spec.iter().all(|&x| x >= 0.0) { Ok(r) } else { Err(format!("residual {r:.3e}")) }
}

fn naive_bound_below_theta(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 1, 5);
    let k = dim(rng, 1, 7);
    let norm = norm_for(rng, d);
    let s = random::wishart(rng, d, d);
    let a = random::uniform_vec(rng, k, 0.2, 2.0);
    let g = FrameSequence::random(rng, d, &a).map_err(err)?;
    let (bound, _) = frame::naive_lower_bound(&norm, &s, a.iter().sum()).map_err(err)?;
    let th = frame::theta(&norm, &s, &g).map_err(err)?;
    let slack = (th - bound) / (1.0 + th);
    if slack >= -1e-10 { Ok(slack) } else { Err(format!("{norm}: Θ - bound = {slack:.3e}")) }
}

fn fod_trace_monotone(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let d = dim(rng, 2, 4);
    let k = dim(rng, 1, 6);
    let s = random::wishart(rng, d, d);
    let a = random::uniform_vec(rng, k, 0.2, 2.0);
    let opts = FodOptions { max_iters: 500, ..Default::default() };
    let run = frame::fod_descent(&s, &a, rng.random(), &opts).map_err(err)?;
    let rise = run.trace.windows(2).fold(0.0f64, |m, w| m.max(w[1] - w[0]));
    let slack = 1e-12 * (1.0 + run.trace[0]);
    if rise <= slack && run.frame.sphere_residual() <= 1e-9 {
        Ok(rise)
    } else {
        Err(format!("largest increase {rise:.3e}, sphere residual {:.3e}", run.frame.sphere_residual()))
    }
}

fn properties() -> Vec<Property> {
    let p = |name, count, worst, check| Property { name, count, worst, check };
    vec![
        p("eigh_reconstruction", 200, Worst::Max, eigh_reconstruction as Check),
        p("svd_reconstruction", 200, Worst::Max, svd_reconstruction),
        p("dilation_spectrum", 200, Worst::Max, dilation_spectrum),
        p("lidskii_majorization", 200, Worst::Min, lidskii_majorization),
        p("eig_global_minimizer", 200, Worst::Min, eig_global_minimizer),
        p("sv_global_minimizer", 200, Worst::Min, sv_global_minimizer),
        p("aligned_pair_certified", 40, Worst::Max, aligned_pair_certified),
        p("misaligned_pair_rejected", 40, Worst::Min, misaligned_pair_rejected),
        p("commutant_basis_invariance", 100, Worst::Max, commutant_basis_invariance),
        p("pi_submersion_joint_pairs", 50, Worst::Max, pi_submersion_joint_pairs),
        p("joint_svd_residual", 200, Worst::Max, joint_svd_residual),
        p("water_fill_budget", 200, Worst::Max, water_fill_budget),
        p("naive_bound_below_theta", 200, Worst::Min, naive_bound_below_theta),
        p("fod_trace_monotone", 20, Worst::Max, fod_trace_monotone),
    ]
}

fn run_property(seed: u64, index: usize, prop: &Property, count: usize) -> PropertyResult {
    let outcomes: Vec<Result<f64, String>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::stream(seed.wrapping_add(index as u64), i as u64);
            (prop.check)(&mut rng)
        })
        .collect();
    let values = outcomes.iter().filter_map(|o| o.as_ref().ok().copied());
    let worst_margin = match prop.worst {
        Worst::Max => values.fold(f64::NEG_INFINITY, f64::max),
        Worst::Min => values.fold(f64::INFINITY, f64::min),
    };
    let first_failure = outcomes.iter().enumerate().find_map(|(i, o)| o.as_ref().err().map(|e| (i, e.clone())));
    PropertyResult {
        name: prop.name,
        instances: count,
        passed: outcomes.iter().filter(|o| o.is_ok()).count(),
        worst: prop.worst,
        worst_margin,
        first_failure,
    }
}

/// Runs every property; medium scale runs ten times the small counts.
pub fn property_suite(seed: u64, scale: Scale) -> SuiteSummary {
    let factor = match scale {
        Scale::Small => 1,
        Scale::Medium => 10,
    };
    let properties: Vec<PropertyResult> = properties()
        .iter()
        .enumerate()
        .map(|(k, p)| run_property(seed, k, p, p.count * factor))
        .collect();
    SuiteSummary {
        seed,
        scale: if factor == 1 { "small" } else { "medium" },
        all_passed: properties.iter().all(|p| p.passed == p.instances),
        properties,
    }
}
