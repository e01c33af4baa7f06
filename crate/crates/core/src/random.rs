//! Seeded random matrix ensembles. Every sampler takes the generator
//! explicitly; there is no global randomness.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{GeneralMatrix, HermitianMatrix, UnitaryMatrix, C64};

/// Deterministic generator for a seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian entries (`E|z|^2 = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> GeneralMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(h * re, h * im)
    })
}

/// GUE-like Hermitian matrix `(X + X*) / 2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermitianMatrix {
    HermitianMatrix::symmetrize(complex_gaussian(rng, d, d))
}

/// Random positive semidefinite matrix `X X*` with `X` of size `d x rank`.
pub fn wishart<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> HermitianMatrix {
    let x = complex_gaussian(rng, d, rank);
    HermitianMatrix::symmetrize(&x * x.adjoint())
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn haar<R: Rng + ?Sized>(rng: &mut R, d: usize) -> UnitaryMatrix {
    let z = complex_gaussian(rng, d, d);
    let (q, r) = z.qr().unpack();
    let mut q = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::from_raw(q)
}

/// Uniform random vector of reals in `[lo, hi)`.
pub fn uniform_vec<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}
