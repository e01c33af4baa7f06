//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p lidskii-core --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SVD};
use rand::Rng;

use lidskii_core::curve::CurveKind;
use lidskii_core::eig_orbit::{certify_local_eig, global_minimizer_eig, phi, CertifyOptions, Verdict};
use lidskii_core::frame::{
    escape_move, fod_descent, frame_operator, naive_lower_bound, restart_seed, special_case_certify,
    structure_check_local, theta, water_fill, FodOptions, FrameSequence, SpecialCaseVerdict,
};
use lidskii_core::linalg::{
    commutant_is_trivial, dilate, diag, pi_submersion_test, singular_values, CVector, GeneralMatrix, HermitianMatrix,
    SpectrumVector, UnitaryMatrix, C64,
};
use lidskii_core::majorization::{majorizes, sort_desc};
use lidskii_core::norms::NormSpec;
use lidskii_core::random::{self, seeded};
use lidskii_core::sv_orbit::{global_minimizer_sv, joint_svd, joint_svd_exists, sv_equality_case};

fn report(id: &str, ok: bool, detail: String) {
    println!("[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn sorted_uniform<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    sort_desc(&random::uniform_vec(rng, n, lo, hi)).into_vec()
}

fn conj_diag(u: &UnitaryMatrix, x: &[f64]) -> HermitianMatrix {
    HermitianMatrix::from_spectral(u, x)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()))
}

#[test]
fn ac01_lidskii_eigenvalue_inequality() {
    let start = Instant::now();
    let mut rng = seeded(101);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for n in 0..10_000 {
        let d = 2 + n % 7;
        let a = random::hermitian(&mut rng, d);
        let b = random::hermitian(&mut rng, d);
        let scale = 1.0 + a.op_norm() + b.op_norm();
        let (la, lb) = (a.eigenvalues(), b.eigenvalues());
        let x: Vec<f64> = la.iter().zip(lb.iter()).map(|(p, q)| p - q).collect();
        let y = a.sub(&b).unwrap().eigenvalues();
        let v = majorizes(&y, &x, 0.0).unwrap();
        let m = v.margin / scale;
        worst = worst.min(m);
        if m < -1e-8 {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = failures == 0 && elapsed < Duration::from_secs(30);
    report("AC-1", ok, format!("10000 pairs, worst scaled margin {worst:.3e}, {failures} failures, {elapsed:.2?}"));
    assert!(ok);
}

#[test]
fn ac02_equality_rigidity() {
    let start = Instant::now();
    let mut rng = seeded(102);
    let mut worst_eq = 0.0f64;
    for n in 0..1000 {
        let d = 2 + n % 7;
        let u = random::haar(&mut rng, d);
        let l = sorted_uniform(&mut rng, d, -3.0, 3.0);
        let m = sorted_uniform(&mut rng, d, -3.0, 3.0);
        let (a, b) = (conj_diag(&u, &l), conj_diag(&u, &m));
        let lhs = a.sub(&b).unwrap().eigenvalues();
        let rhs = sort_desc(&l.iter().zip(&m).map(|(p, q)| p - q).collect::<Vec<_>>());
        worst_eq = worst_eq.max(max_diff(&lhs, &rhs) / (1.0 + a.op_norm() + b.op_norm()));
    }
    let mut non_strict = 0;
    let mut smallest_gap = f64::INFINITY;
    let mut tested = 0;
    while tested < 1000 {
        let d = 2 + tested % 7;
        let a = random::hermitian(&mut rng, d);
        let b = random::hermitian(&mut rng, d);
        let comm = (a.as_matrix() * b.as_matrix() - b.as_matrix() * a.as_matrix()).norm();
        if comm <= 0.1 * a.op_norm() * b.op_norm() {
            continue;
        }
        tested += 1;
        let (la, lb) = (a.eigenvalues(), b.eigenvalues());
        let x: Vec<f64> = la.iter().zip(lb.iter()).map(|(p, q)| p - q).collect();
        let y = a.sub(&b).unwrap().eigenvalues();
        let gap = max_diff(&y, &sort_desc(&x));
        smallest_gap = smallest_gap.min(gap);
        let v = majorizes(&y, &x, 1e-12).unwrap();
        if !(v.holds && v.strict && gap > 0.0) {
            non_strict += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = worst_eq <= 1e-9 && non_strict == 0 && elapsed < Duration::from_secs(10);
    report(
        "AC-2",
        ok,
        format!("aligned worst deviation {worst_eq:.3e}; non-commuting smallest gap {smallest_gap:.3e}, {non_strict} non-strict; {elapsed:.2?}"),
    );
    assert!(ok);
}

#[test]
fn ac03_global_minimizer_optimality() {
    let start = Instant::now();
    let norms = [NormSpec::Frobenius, NormSpec::schatten(1.5).unwrap(), NormSpec::schatten(4.0).unwrap()];
    let mut rng = seeded(103);
    let mut worst = f64::INFINITY;
    for n in 0..200 {
        let d = 1 + n % 5;
        let s = random::hermitian(&mut rng, d);
        let mu = SpectrumVector::new(sorted_uniform(&mut rng, d, -2.0, 2.0)).unwrap();
        let gop = global_minimizer_eig(&s, &mu).unwrap();
        let best: Vec<f64> = norms.iter().map(|nm| phi(nm, &s, &gop).unwrap()).collect();
        for _ in 0..500 {
            let g = conj_diag(&random::haar(&mut rng, d), &mu);
            for (nm, b) in norms.iter().zip(&best) {
                worst = worst.min(phi(nm, &s, &g).unwrap() - b);
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst >= -1e-8 && elapsed < Duration::from_secs(60);
    report("AC-3", ok, format!("200 instances x 500 samples x 3 norms, min Φ(sample) - Φ(G^op) = {worst:.3e}, {elapsed:.2?}"));
    assert!(ok);
}

/// Distinct values with gaps at least 0.2.
fn separated<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(d);
    let mut v = rng.random_range(1.0..3.0);
    for _ in 0..d {
        x.push(v);
        v -= rng.random_range(0.2..1.0);
    }
    x
}

#[test]
fn ac04_certification_soundness() {
    let norms = [NormSpec::Frobenius, NormSpec::schatten(1.5).unwrap(), NormSpec::schatten(4.0).unwrap()];
    let mut rng = seeded(104);
    let opts = CertifyOptions::default();
    let mut bad_misaligned = 0;
    let mut smallest_drop = f64::INFINITY;
    for n in 0..100 {
        let d = 2 + n % 4;
        let nm = &norms[n % 3];
        let u = random::haar(&mut rng, d);
        let lam = separated(&mut rng, d);
        let mut nu = separated(&mut rng, d);
        // swap one adjacent pair so the pairing is not monotone
        let j = rng.random_range(0..d - 1);
        nu.swap(j, j + 1);
        let (s, g0) = (conj_diag(&u, &lam), conj_diag(&u, &nu));
        let c = certify_local_eig(nm, &s, &g0, &opts).unwrap();
        let ok = c.verdict == Verdict::NotLocalMin
            && c.descent_witness.as_ref().is_some_and(|w| {
                smallest_drop = smallest_drop.min(w.verified_drop);
                matches!(w.kind, CurveKind::Givens { .. }) && w.verified_drop > 1e-10
            });
        if !ok {
            bad_misaligned += 1;
        }
    }
    let mut bad_aligned = 0;
    let mut worst = f64::INFINITY;
    for n in 0..100 {
        let d = 2 + n % 4;
        let nm = &norms[n % 3];
        let u = random::haar(&mut rng, d);
        let s = conj_diag(&u, &sorted_uniform(&mut rng, d, -2.0, 2.0));
        let mu = sorted_uniform(&mut rng, d, -2.0, 2.0);
        let g0 = conj_diag(&u, &mu);
        let c = certify_local_eig(nm, &s, &g0, &opts).unwrap();
        if c.verdict != Verdict::CertifiedGlobal || c.descent_witness.is_some() {
            bad_aligned += 1;
        }
        let phi0 = phi(nm, &s, &g0).unwrap();
        for _ in 0..10_000 {
            let g = conj_diag(&random::haar(&mut rng, d), &mu);
            worst = worst.min(phi(nm, &s, &g).unwrap() - phi0);
        }
    }
    let ok = bad_misaligned == 0 && bad_aligned == 0 && worst >= -1e-8;
    report(
        "AC-4",
        ok,
        format!("misaligned failures {bad_misaligned} (smallest drop {smallest_drop:.3e}); aligned failures {bad_aligned}, min Φ(sample) - Φ(G0) = {worst:.3e}"),
    );
    assert!(ok);
}

#[test]
fn ac05_dilation_spectrum() {
    let mut rng = seeded(105);
    let mut worst = 0.0f64;
    for n in 0..1000 {
        let d = 1 + n % 6;
        let c = random::complex_gaussian(&mut rng, d, d);
        let s = singular_values(&c);
        let mut expect = s.to_vec();
        expect.extend(s.iter().rev().map(|x| -x));
        let l = dilate(&c).unwrap().eigenvalues();
        worst = worst.max(max_diff(&l, &expect) / (1.0 + s[0]));
    }
    let ok = worst < 1e-9;
    report("AC-5", ok, format!("1000 matrices, worst scaled deviation {worst:.3e}"));
    assert!(ok);
}

/// `A = U D_α V*`, `B = U (⊕ H_i ⊕ K) V*` with Hermitian `H_i` on the
/// clusters of `α` and an arbitrary `K` on the zero cluster.
fn hypothesis_pair<R: Rng>(rng: &mut R, d: usize) -> (GeneralMatrix, GeneralMatrix) {
    let u = random::haar(rng, d);
    let v = random::haar(rng, d);
    let mut sizes = Vec::new();
    let mut left = d;
    while left > 0 {
        let k = rng.random_range(1..=left.min(3));
        sizes.push(k);
        left -= k;
    }
    let with_zero = sizes.len() > 1 && rng.random_bool(0.5);
    let mut alpha = Vec::new();
    let mut level: f64 = rng.random_range(2.0..4.0);
    let mut inner = GeneralMatrix::zeros(d, d);
    let mut off = 0;
    for (i, &k) in sizes.iter().enumerate() {
        let last = i + 1 == sizes.len();
        let zero = last && with_zero;
        let a = if zero { 0.0 } else { level };
        alpha.extend(std::iter::repeat_n(a, k));
        let blk = if zero {
            random::complex_gaussian(rng, k, k)
        } else {
            random::hermitian(rng, k).into_matrix()
        };
        inner.view_mut((off, off), (k, k)).copy_from(&blk);
        off += k;
        level -= rng.random_range(0.3..0.8);
        level = level.max(0.1);
    }
    let (um, vm) = (u.as_matrix(), v.as_matrix());
    (um * diag(&alpha) * vm.adjoint(), um * inner * vm.adjoint())
}

#[test]
fn ac06_joint_svd() {
    let mut rng = seeded(106);
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut eq_failures = 0;
    let mut zero_blocks = 0;
    for n in 0..500 {
        let d = 1 + n % 6;
        let (a, b) = hypothesis_pair(&mut rng, d);
        let scale = (1.0 + a.norm()) * (1.0 + b.norm());
        match joint_svd(&a, &b, 1e-8) {
            Ok(j) => {
                if j.alpha.iter().any(|&x| x == 0.0 || x < 1e-9) {
                    zero_blocks += 1;
                }
                let r = j.residual_a.max(j.residual_b) / scale;
                worst = worst.max(r);
                if r >= 1e-8 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
        let bop = global_minimizer_sv(&a, &singular_values(&b)).unwrap();
        if !sv_equality_case(&a, &bop, 1e-8).unwrap() {
            eq_failures += 1;
        }
    }
    let ok = failures == 0 && eq_failures == 0;
    report(
        "AC-6",
        ok,
        format!("500 pairs ({zero_blocks} with zero blocks), worst scaled residual {worst:.3e}, {failures} failures, {eq_failures} equality failures"),
    );
    assert!(ok);
}

#[test]
fn ac07_sv_equality_characterization() {
    let mut rng = seeded(107);
    let mut pos_fail = 0;
    for n in 0..500 {
        let d = 1 + n % 6;
        let u = random::haar(&mut rng, d);
        let v = random::haar(&mut rng, d);
        let mut alpha = sorted_uniform(&mut rng, d, 0.0, 3.0);
        let mut beta = sorted_uniform(&mut rng, d, 0.0, 3.0);
        if n % 5 == 0 {
            // exact zeros and repeats
            alpha[d - 1] = 0.0;
            if d > 1 {
                beta[1] = beta[0];
            }
        }
        let (um, vm) = (u.as_matrix(), v.as_matrix());
        let a = um * diag(&alpha) * vm.adjoint();
        let b = um * diag(&beta) * vm.adjoint();
        if !sv_equality_case(&a, &b, 1e-8).unwrap() || !joint_svd_exists(&a, &b, 1e-7) {
            pos_fail += 1;
        }
    }
    let mut neg_fail = 0;
    let mut tested = 0;
    while tested < 500 {
        let d = 2 + tested % 5;
        let a = random::complex_gaussian(&mut rng, d, d);
        let b = random::complex_gaussian(&mut rng, d, d);
        let p = a.adjoint() * &b;
        let scale = singular_values(&a)[0] * singular_values(&b)[0];
        if (&p - p.adjoint()).norm() <= 0.1 * scale {
            continue;
        }
        tested += 1;
        if sv_equality_case(&a, &b, 1e-8).unwrap() || joint_svd_exists(&a, &b, 1e-7) {
            neg_fail += 1;
        }
    }
    let ok = pos_fail == 0 && neg_fail == 0;
    report("AC-7", ok, format!("500 positives ({pos_fail} missed), 500 negatives ({neg_fail} false equalities)"));
    assert!(ok);
}

fn bisection_level(lambda: &[f64], t: f64) -> f64 {
    let f = |c: f64| lambda.iter().map(|l| (l - c).max(0.0)).sum::<f64>() - t;
    let (mut lo, mut hi) = (lambda[lambda.len() - 1] - t, lambda[0]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn ac08_water_filling() {
    let start = Instant::now();
    let mut rng = seeded(108);
    let mut worst_root = 0.0f64;
    let mut worst_level = 0.0f64;
    for n in 0..1000 {
        let d = 1 + n % 6;
        let lambda = sorted_uniform(&mut rng, d, 0.0, 5.0);
        let t = rng.random_range(0.01..10.0);
        let (c, spec) = water_fill(&lambda, t).unwrap();
        worst_root = worst_root.max((spec.iter().sum::<f64>() - t).abs());
        worst_level = worst_level.max((c - bisection_level(&lambda, t)).abs());
    }
    let norms = [NormSpec::Frobenius, NormSpec::schatten(3.0).unwrap()];
    let mut worst_gap = f64::INFINITY;
    for n in 0..20 {
        let d = 1 + n % 5;
        let s = random::wishart(&mut rng, d, d);
        let t = rng.random_range(0.1..2.0) * s.trace().max(0.1);
        for nm in &norms {
            let (bound, a_op) = naive_lower_bound(nm, &s, t).unwrap();
            assert!((a_op.trace() - t).abs() < 1e-9 * (1.0 + t));
            for _ in 0..10_000 {
                let rank = rng.random_range(1..=d);
                let w = random::wishart(&mut rng, d, rank);
                let a = w.scale(t / w.trace());
                worst_gap = worst_gap.min(nm.evaluate_hermitian(&s.sub(&a).unwrap()) - bound);
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst_root < 1e-10 && worst_level < 1e-9 && worst_gap >= -1e-8 && elapsed < Duration::from_secs(60);
    report(
        "AC-8",
        ok,
        format!("root residual {worst_root:.3e}, level vs bisection {worst_level:.3e}, min D(A) - D(A^op) = {worst_gap:.3e}, {elapsed:.2?}"),
    );
    assert!(ok);
}

#[test]
fn ac09_fod_structure_at_converged_points() {
    let start = Instant::now();
    let mut rng = seeded(109);
    let f = NormSpec::Frobenius;
    let opts = FodOptions::default();
    let (mut converged, mut runs, mut violations, mut special, mut special_fail) = (0, 0, 0, 0, 0);
    let mut worst_bound_gap = 0.0f64;
    for n in 0..100 {
        let d = 1 + n % 4;
        let k = d + n % 3;
        let s = random::wishart(&mut rng, d, d);
        let a = random::uniform_vec(&mut rng, k, 0.2, 2.0);
        let t: f64 = a.iter().sum();
        let (bound, _) = naive_lower_bound(&f, &s, t).unwrap();
        for r in 0..8 {
            runs += 1;
            let run = fod_descent(&s, &a, restart_seed(n as u64, r), &opts).unwrap();
            if run.grad_norm >= 1e-9 {
                continue;
            }
            converged += 1;
            let rep = structure_check_local(&f, &s, &run.frame, 1e-6).unwrap();
            if !rep.is_consistent() {
                violations += 1;
            }
            match special_case_certify(&f, &s, &run.frame, 1e-6).unwrap() {
                SpecialCaseVerdict::NotApplicable => {}
                v => {
                    special += 1;
                    let th = theta(&f, &s, &run.frame).unwrap();
                    worst_bound_gap = worst_bound_gap.max((th - bound).abs());
                    if v != SpecialCaseVerdict::CertifiedGlobal || (th - bound).abs() > 1e-6 {
                        special_fail += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = violations == 0 && special_fail == 0 && elapsed < Duration::from_secs(300);
    report(
        "AC-9",
        ok,
        format!(
            "{converged}/{runs} runs reached gradient < 1e-9; {violations} structure violations; {special} special-case points, {special_fail} failures, worst |Θ - bound| {worst_bound_gap:.3e}; {elapsed:.2?}"
        ),
    );
    assert!(ok);
}

/// A frame with a linearly dependent cluster of eigenvectors of `S - S_0`
/// for an eigenvalue `c` below the top of the spectrum.
fn dependent_configuration<R: Rng>(rng: &mut R, d: usize) -> (HermitianMatrix, FrameSequence, usize) {
    let u = random::haar(rng, d);
    let w = if d >= 3 && rng.random_bool(0.5) { 2 } else { 1 };
    let members = w + rng.random_range(1..=2);
    let c = rng.random_range(-1.0..1.0);
    let mut vectors = Vec::new();
    let mut a = Vec::new();
    for _ in 0..members {
        let coeffs = random::complex_gaussian(rng, w, 1);
        let g = CVector::from_column_slice((u.as_matrix().columns(0, w) * coeffs).as_slice());
        a.push(g.norm_squared());
        vectors.push(g);
    }
    let mut m = vec![c; d];
    for x in m.iter_mut().skip(w) {
        *x = c + rng.random_range(0.5..2.0);
    }
    // an independent vector on one of the remaining eigenvectors
    if w < d - 1 {
        let g = u.column(d - 1) * C64::new(rng.random_range(0.5..1.5), 0.0);
        a.push(g.norm_squared());
        vectors.push(g);
    }
    let frame = FrameSequence::new(vectors, a).unwrap();
    let s = frame_operator(&frame).add(&conj_diag(&u, &m)).unwrap();
    (s, frame, members)
}

#[test]
fn ac10_escape_move() {
    let mut rng = seeded(110);
    let norms = [NormSpec::Frobenius, NormSpec::schatten(1.5).unwrap(), NormSpec::schatten(3.0).unwrap()];
    let mut failures = 0;
    let mut worst_sphere = 0.0f64;
    let mut smallest_drop = f64::INFINITY;
    for n in 0..50 {
        let d = 2 + n % 4;
        let nm = &norms[n % 3];
        let (s, g0, members) = dependent_configuration(&mut rng, d);
        let rep = structure_check_local(nm, &s, &g0, 1e-8).unwrap();
        let Some(j) = rep.partition.iter().position(|c| c.members.len() >= members && c.independence_required)
        else {
            failures += 1;
            continue;
        };
        let Some(curve) = escape_move(nm, &s, &g0, j, 1e-8).unwrap() else {
            failures += 1;
            continue;
        };
        for smp in &curve.samples {
            let p = curve.point(smp.t).unwrap().into_frame().unwrap();
            worst_sphere = worst_sphere.max(p.sphere_residual());
        }
        let drop = curve.start_value - curve.best_sample().value;
        smallest_drop = smallest_drop.min(drop);
        if !(curve.is_verified() && drop > 1e-12) {
            failures += 1;
        }
    }
    let ok = failures == 0 && worst_sphere < 1e-10;
    report("AC-10", ok, format!("50 configurations, {failures} failures, smallest drop {smallest_drop:.3e}, worst sphere residual {worst_sphere:.3e}"));
    assert!(ok);
}

/// Real form of `z ↦ M1 z + M2 conj(z)` on `(Re z, Im z)`.
fn realify(m1: &GeneralMatrix, m2: &GeneralMatrix) -> DMatrix<f64> {
    let (r, c) = m1.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let (p, q) = (m1[(i, j)], m2[(i, j)]);
            out[(i, j)] = p.re + q.re;
            out[(i, j + c)] = -p.im + q.im;
            out[(i + r, j)] = p.im + q.im;
            out[(i + r, j + c)] = p.re - q.re;
        }
    }
    out
}

fn kron(a: &GeneralMatrix, b: &GeneralMatrix) -> GeneralMatrix {
    a.kronecker(b)
}

/// Permutation with `vec(Z^T) = P vec(Z)` (column-major vec).
fn transpose_perm(d: usize) -> GeneralMatrix {
    let mut p = GeneralMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            p[(j + i * d, i + j * d)] = C64::new(1.0, 0.0);
        }
    }
    p
}

fn stack(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, blocks[0].ncols());
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, 0), b.shape()).copy_from(b);
        off += b.nrows();
    }
    out
}

fn brute_kernel_dim(m: &DMatrix<f64>, tol: f64) -> usize {
    let n = m.ncols();
    let mut sq = DMatrix::zeros(m.nrows().max(n), n);
    sq.view_mut((0, 0), m.shape()).copy_from(m);
    let s = SVD::new(sq, false, false).singular_values;
    let top = s.max();
    if top == 0.0 {
        return n;
    }
    s.iter().filter(|&&x| x <= tol * top).count()
}

/// Kernel of `Y ↦ ([Y, S], [Y, G])` over traceless Hermitian `Y`, with the
/// Hermitian and trace constraints imposed as extra equations on `C^{d×d}`.
fn brute_commutant_dim(s: &HermitianMatrix, g: &HermitianMatrix) -> usize {
    let d = s.dim();
    let id = GeneralMatrix::identity(d, d);
    let zero = GeneralMatrix::zeros(d * d, d * d);
    let p = transpose_perm(d);
    let comm = |x: &GeneralMatrix| kron(&x.transpose(), &id) - kron(&id, x);
    let herm = realify(&GeneralMatrix::identity(d * d, d * d), &(-&p));
    let mut tr = GeneralMatrix::zeros(1, d * d);
    for i in 0..d {
        tr[(0, i + i * d)] = C64::new(1.0, 0.0);
    }
    let sys = stack(&[
        realify(&comm(s.as_matrix()), &zero),
        realify(&comm(g.as_matrix()), &zero),
        herm,
        realify(&tr, &GeneralMatrix::zeros(1, d * d)),
    ]);
    brute_kernel_dim(&sys, 1e-8)
}

/// Kernel of `Z ↦ (AZ* - ZA*, A*Z - Z*A, BZ* - ZB*, B*Z - Z*B)` on
/// `C^{d×d}` as a real-linear map.
fn brute_pi_dim(a: &GeneralMatrix, b: &GeneralMatrix) -> usize {
    let d = a.nrows();
    let id = GeneralMatrix::identity(d, d);
    let p = transpose_perm(d);
    let block = |x: &GeneralMatrix| {
        // vec(X Z*) = (I ⊗ X) P conj(vec Z), vec(Z X*) = (conj(X) ⊗ I) vec Z
        let first = realify(&-kron(&x.conjugate(), &id), &(kron(&id, x) * &p));
        // vec(X* Z) = (I ⊗ X*) vec Z, vec(Z* X) = (X^T ⊗ I) P conj(vec Z)
        let second = realify(&kron(&id, &x.adjoint()), &-(kron(&x.transpose(), &id) * &p));
        [first, second]
    };
    let [a1, a2] = block(a);
    let [b1, b2] = block(b);
    brute_kernel_dim(&stack(&[a1, a2, b1, b2]), 1e-8)
}

#[test]
fn ac11_null_space_criteria() {
    let mut rng = seeded(111);
    let mut disagree = 0;
    let mut degenerate_nontrivial = 0;
    for n in 0..250 {
        let d = 2 + n % 4;
        let degenerate = n >= 200;
        let (s, g) = if degenerate {
            let u = random::haar(&mut rng, d);
            let mut x = random::uniform_vec(&mut rng, d, -2.0, 2.0);
            x[1] = x[0];
            (conj_diag(&u, &x), conj_diag(&u, &random::uniform_vec(&mut rng, d, -2.0, 2.0)))
        } else {
            (random::hermitian(&mut rng, d), random::hermitian(&mut rng, d))
        };
        let t = commutant_is_trivial(&s, &g, 1e-8).unwrap();
        let brute = brute_commutant_dim(&s, &g);
        if t.kernel_dim != brute || t.trivial != (brute == 0) {
            disagree += 1;
        }
        if degenerate && !t.trivial {
            degenerate_nontrivial += 1;
        }
    }
    for n in 0..250 {
        let d = 2 + n % 4;
        let degenerate = n >= 200;
        let (a, b) = if degenerate {
            let u = random::haar(&mut rng, d);
            let v = random::haar(&mut rng, d);
            let (um, vm) = (u.as_matrix(), v.as_matrix());
            (
                um * diag(&random::uniform_vec(&mut rng, d, 0.0, 2.0)) * vm.adjoint(),
                um * diag(&random::uniform_vec(&mut rng, d, -2.0, 2.0)) * vm.adjoint(),
            )
        } else {
            (random::complex_gaussian(&mut rng, d, d), random::complex_gaussian(&mut rng, d, d))
        };
        let t = pi_submersion_test(&a, &b, 1e-8).unwrap();
        let brute = brute_pi_dim(&a, &b);
        if t.kernel_dim != brute || t.submersion != (brute == 0) {
            disagree += 1;
        }
        if degenerate && !t.submersion {
            degenerate_nontrivial += 1;
        }
    }
    let ok = disagree == 0 && degenerate_nontrivial == 100;
    report(
        "AC-11",
        ok,
        format!("500 instances, {disagree} disagreements with brute force; {degenerate_nontrivial}/100 degenerate instances detected"),
    );
    assert!(ok);
}
