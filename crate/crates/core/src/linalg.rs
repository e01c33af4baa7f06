//! Dense complex matrix primitives.
//!
//! Conventions: `x ⊗ y` is the rank-one map `z ↦ <z, y> x`, i.e. `x y*`.
//! The SVD is returned as `A = V* D_s U`, and every downstream routine uses
//! that orientation.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random;
use crate::tol::{EIG_TOL, HERMIT_TOL, SVD_TOL, UNITARY_TOL};

pub type C64 = num_complex::Complex64;
pub type GeneralMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn check_finite(m: &GeneralMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn check_square(m: &GeneralMatrix) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() })
    }
}

pub(crate) fn same_dim(a: usize, b: usize, what: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("{what}: {a} vs {b}")))
    }
}

/// Embeds a real matrix given in row-major order.
pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> GeneralMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count");
    DMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)))
}

/// Diagonal matrix `D_x`.
pub fn diag(x: &[f64]) -> GeneralMatrix {
    DMatrix::from_diagonal(&DVector::from_iterator(x.len(), x.iter().map(|&v| C64::new(v, 0.0))))
}

/// Spectral (operator) norm.
pub fn op_norm(m: &GeneralMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &GeneralMatrix, b: &GeneralMatrix) -> Result<GeneralMatrix> {
    check_square(a)?;
    check_square(b)?;
    same_dim(a.nrows(), b.nrows(), "commutator")?;
    Ok(a * b - b * a)
}

/// Hermitian matrix, stored symmetrized.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(GeneralMatrix);

impl HermitianMatrix {
    /// Validates `|M - M*|_F <= HERMIT_TOL * |M|_F` and stores `(M + M*) / 2`.
    pub fn new(m: GeneralMatrix) -> Result<Self> {
        check_square(&m)?;
        check_finite(&m)?;
        let asym = (&m - m.adjoint()).norm();
        let scale = m.norm();
        if asym > HERMIT_TOL * scale.max(f64::MIN_POSITIVE) && asym > 0.0 {
            return Err(Error::NotHermitian(asym / scale.max(f64::MIN_POSITIVE)));
        }
        Ok(Self::symmetrize(m))
    }

    /// `(M + M*) / 2` without validation.
    pub fn symmetrize(m: GeneralMatrix) -> Self {
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        HermitianMatrix(h)
    }

    pub fn from_real(d: usize, entries: &[f64]) -> Result<Self> {
        Self::new(from_real(d, d, entries))
    }

    pub fn from_diagonal(x: &[f64]) -> Self {
        HermitianMatrix(diag(x))
    }

    pub fn identity(d: usize) -> Self {
        HermitianMatrix(GeneralMatrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        HermitianMatrix(GeneralMatrix::zeros(d, d))
    }

    /// `∑ x_i v_i ⊗ v_i` for the columns `v_i` of `basis`.
    pub fn from_spectral(basis: &UnitaryMatrix, x: &[f64]) -> Self {
        let v = basis.as_matrix();
        Self::symmetrize(v * diag(x) * v.adjoint())
    }

    /// Rank-one `g ⊗ g`.
    pub fn outer(g: &CVector) -> Self {
        Self::symmetrize(g * g.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &GeneralMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> GeneralMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `U* M U`.
    pub fn conjugate_by(&self, u: &UnitaryMatrix) -> Self {
        let u = u.as_matrix();
        Self::symmetrize(u.adjoint() * &self.0 * u)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<Self> {
        same_dim(self.dim(), other.dim(), "hermitian difference")?;
        Ok(HermitianMatrix(&self.0 - &other.0))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Result<Self> {
        same_dim(self.dim(), other.dim(), "hermitian sum")?;
        Ok(HermitianMatrix(&self.0 + &other.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        HermitianMatrix(&self.0 * C64::new(c, 0.0))
    }

    /// Eigenvalues, non-increasing.
    pub fn eigenvalues(&self) -> SpectrumVector {
        let vals = self.0.clone().symmetric_eigenvalues();
        SpectrumVector::from_unsorted(vals.iter().copied().collect())
    }

    pub fn op_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(GeneralMatrix);

impl UnitaryMatrix {
    /// Validates `|U*U - I|_F <= UNITARY_TOL * d`.
    pub fn new(m: GeneralMatrix) -> Result<Self> {
        let d = check_square(&m)?;
        check_finite(&m)?;
        let u = UnitaryMatrix(m);
        let r = u.unitarity_residual();
        if r > UNITARY_TOL * (d.max(1) as f64) {
            return Err(Error::NotUnitary(r));
        }
        Ok(u)
    }

    pub(crate) fn from_raw(m: GeneralMatrix) -> Self {
        UnitaryMatrix(m)
    }

    pub fn identity(d: usize) -> Self {
        UnitaryMatrix(GeneralMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &GeneralMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> GeneralMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> Self {
        UnitaryMatrix(&self.0 * &other.0)
    }

    pub fn column(&self, i: usize) -> CVector {
        self.0.column(i).into_owned()
    }

    /// `|U*U - I|_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        (self.0.adjoint() * &self.0 - GeneralMatrix::identity(d, d)).norm()
    }

    /// `exp(i H)` for Hermitian `H`.
    pub fn exp_i(h: &HermitianMatrix) -> Result<Self> {
        let (vals, v) = eigh(h)?;
        let d = h.dim();
        let phases = DVector::from_iterator(d, vals.iter().map(|&x| C64::from_polar(1.0, x)));
        let vm = v.as_matrix();
        Ok(UnitaryMatrix(vm * DMatrix::from_diagonal(&phases) * vm.adjoint()))
    }

    /// Block diagonal `U ⊕ V`.
    pub fn direct_sum(blocks: &[GeneralMatrix]) -> Self {
        UnitaryMatrix(block_diag(blocks))
    }
}

pub(crate) fn block_diag(blocks: &[GeneralMatrix]) -> GeneralMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = GeneralMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((off, off), (k, k)).copy_from(b);
        off += k;
    }
    out
}

/// Real vector sorted non-increasingly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpectrumVector(Vec<f64>);

impl SpectrumVector {
    /// Rejects unsorted or non-finite input.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotSorted);
        }
        Ok(SpectrumVector(values))
    }

    /// Sorts non-increasingly; ties keep their original order.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        SpectrumVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for SpectrumVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for SpectrumVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        SpectrumVector::new(v)
    }
}

impl From<SpectrumVector> for Vec<f64> {
    fn from(v: SpectrumVector) -> Vec<f64> {
        v.0
    }
}

fn descending_order(vals: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    idx
}

/// Hermitian eigendecomposition `M = V D_λ V*` with `λ` non-increasing.
pub fn eigh(m: &HermitianMatrix) -> Result<(SpectrumVector, UnitaryMatrix)> {
    let d = m.dim();
    if d == 0 {
        return Ok((SpectrumVector(vec![]), UnitaryMatrix::identity(0)));
    }
    let eig = SymmetricEigen::try_new(m.0.clone(), f64::EPSILON, 0)
        .ok_or(Error::EigenNoConvergence { residual: f64::NAN })?;
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = descending_order(&vals);
    let sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let v = GeneralMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    let rec = &v * diag(&sorted) * v.adjoint();
    let residual = (&m.0 - rec).norm();
    if !(residual <= EIG_TOL * (1.0 + m.0.norm())) {
        return Err(Error::EigenNoConvergence { residual });
    }
    Ok((SpectrumVector(sorted), UnitaryMatrix(v)))
}

/// Singular value decomposition `A = V* D_s U`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub v: UnitaryMatrix,
    pub s: SpectrumVector,
    pub u: UnitaryMatrix,
}

impl Svd {
    /// `V* D_s U`.
    pub fn recompose(&self) -> GeneralMatrix {
        self.v.as_matrix().adjoint() * diag(&self.s) * self.u.as_matrix()
    }
}

/// SVD of a square matrix in the `A = V* D_s U` orientation, `s` non-negative
/// and non-increasing, ties broken by the solver's column order.
pub fn svd(a: &GeneralMatrix) -> Result<Svd> {
    let d = check_square(a)?;
    check_finite(a)?;
    if d == 0 {
        return Ok(Svd {
            v: UnitaryMatrix::identity(0),
            s: SpectrumVector(vec![]),
            u: UnitaryMatrix::identity(0),
        });
    }
    let bound = SVD_TOL * (1.0 + a.norm());
    let mut worst = f64::NAN;
    // The unordered solver occasionally returns an inconsistent factorization
    // when an exact zero singular value sits next to a repeated one. A looser
    // threshold or a fixed pre-rotation avoids it.
    for factor in [5.0, 50.0, 500.0] {
        if let Some(out) = svd_attempt(a, None, factor * f64::EPSILON) {
            let residual = (a - out.recompose()).norm();
            if residual <= bound {
                return Ok(out);
            }
            worst = residual;
        }
    }
    for index in 0..4 {
        let q = random::haar(&mut random::stream(0x5D, index), d);
        if let Some(out) = svd_attempt(a, Some(&q), 5.0 * f64::EPSILON) {
            let residual = (a - out.recompose()).norm();
            if residual <= bound {
                return Ok(out);
            }
            worst = residual;
        }
    }
    Err(Error::SvdNoConvergence { residual: worst })
}

fn svd_attempt(a: &GeneralMatrix, rotation: Option<&UnitaryMatrix>, eps: f64) -> Option<Svd> {
    let d = a.nrows();
    let target = match rotation {
        Some(q) => a * q.as_matrix(),
        None => a.clone(),
    };
    let dec = SVD::try_new_unordered(target, true, true, eps, 0)?;
    let left = dec.u?;
    let mut right = dec.v_t?;
    if let Some(q) = rotation {
        right *= q.as_matrix().adjoint();
    }
    let vals: Vec<f64> = dec.singular_values.iter().copied().collect();
    let order = descending_order(&vals);
    let s: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let vstar = GeneralMatrix::from_fn(d, d, |r, c| left[(r, order[c])]);
    let u = GeneralMatrix::from_fn(d, d, |r, c| right[(order[r], c)]);
    Some(Svd { v: UnitaryMatrix(vstar.adjoint()), s: SpectrumVector(s), u: UnitaryMatrix(u) })
}

/// Singular values, non-increasing.
pub fn singular_values(a: &GeneralMatrix) -> SpectrumVector {
    if a.is_empty() {
        return SpectrumVector(vec![]);
    }
    SpectrumVector::from_unsorted(a.clone().singular_values().iter().copied().collect())
}

/// The Hermitian dilation `[[0, C], [C*, 0]]`, whose spectrum is
/// `(s(C), -reverse(s(C)))`.
pub fn dilate(c: &GeneralMatrix) -> Result<HermitianMatrix> {
    let d = check_square(c)?;
    let mut out = GeneralMatrix::zeros(2 * d, 2 * d);
    out.view_mut((0, d), (d, d)).copy_from(c);
    out.view_mut((d, 0), (d, d)).copy_from(&c.adjoint());
    Ok(HermitianMatrix(out))
}

/// Haar-random unitary, deterministic in `seed`.
pub fn haar_unitary(d: usize, seed: u64) -> UnitaryMatrix {
    random::haar(&mut random::seeded(seed), d)
}

/// Haar-random unitary drawn from an existing generator.
pub fn haar_unitary_from<R: Rng + ?Sized>(rng: &mut R, d: usize) -> UnitaryMatrix {
    random::haar(rng, d)
}

/// Orthonormal basis (real inner product `Re tr(X* Y)`) of the trace-zero
/// Hermitian matrices.
pub fn traceless_hermitian_basis(d: usize) -> Vec<GeneralMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            let mut x = GeneralMatrix::zeros(d, d);
            x[(i, j)] = C64::new(r, 0.0);
            x[(j, i)] = C64::new(r, 0.0);
            basis.push(x);
            let mut y = GeneralMatrix::zeros(d, d);
            y[(i, j)] = C64::new(0.0, r);
            y[(j, i)] = C64::new(0.0, -r);
            basis.push(y);
        }
    }
    for m in 1..d {
        let norm = ((m * (m + 1)) as f64).sqrt();
        let mut x = GeneralMatrix::zeros(d, d);
        for i in 0..m {
            x[(i, i)] = C64::new(1.0 / norm, 0.0);
        }
        x[(m, m)] = C64::new(-(m as f64) / norm, 0.0);
        basis.push(x);
    }
    basis
}

/// Orthonormal real basis `{E_ij, i E_ij}` of all complex `d x d` matrices.
pub fn complex_matrix_basis(d: usize) -> Vec<GeneralMatrix> {
    let mut basis = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            let mut x = GeneralMatrix::zeros(d, d);
            x[(i, j)] = ONE;
            basis.push(x);
            let mut y = GeneralMatrix::zeros(d, d);
            y[(i, j)] = I;
            basis.push(y);
        }
    }
    basis
}

/// Stacks real and imaginary parts of each matrix, column-major.
pub(crate) fn realify(blocks: &[GeneralMatrix], out: &mut Vec<f64>) {
    for b in blocks {
        for z in b.iter() {
            out.push(z.re);
            out.push(z.im);
        }
    }
}

/// Assembles the real matrix of a real-linear map given on a basis.
pub(crate) fn assemble<F>(basis: &[GeneralMatrix], map: F) -> DMatrix<f64>
where
    F: Fn(&GeneralMatrix) -> Vec<GeneralMatrix>,
{
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|x| {
            let mut v = Vec::new();
            realify(&map(x), &mut v);
            v
        })
        .collect();
    let rows = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r])
}

/// Dimension of the numerical kernel of a real matrix (singular values below
/// `tol * σ_max`) and a unit kernel vector when it is nontrivial.
pub fn numerical_kernel(m: &DMatrix<f64>, tol: f64) -> (usize, Option<DVector<f64>>) {
    let n = m.ncols();
    if n == 0 {
        return (0, None);
    }
    if m.nrows() == 0 || m.iter().all(|&x| x == 0.0) {
        let mut w = DVector::zeros(n);
        w[0] = 1.0;
        return (n, Some(w));
    }
    // pad to at least square so the thin SVD exposes every right singular vector
    let padded;
    let m = if m.nrows() < n {
        padded = {
            let mut p = DMatrix::zeros(n, n);
            p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let dec = m.clone().svd(false, true);
    let vt = dec.v_t.expect("v_t requested");
    let s = &dec.singular_values;
    let smax = s.max();
    let cut = tol * smax;
    let mut kernel = 0;
    let mut smallest = (f64::INFINITY, 0);
    for (k, &sv) in s.iter().enumerate() {
        if sv < cut {
            kernel += 1;
        }
        if sv < smallest.0 {
            smallest = (sv, k);
        }
    }
    if kernel == 0 {
        return (0, None);
    }
    let w = vt.row(smallest.1).transpose();
    (kernel, Some(w))
}

/// Result of [`commutant_is_trivial`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CommutantTest {
    pub trivial: bool,
    pub kernel_dim: usize,
}

/// Decides `{S, G0}' = C·I` through the kernel of
/// `Y ↦ ([Y, S], [Y, G0])` on trace-zero Hermitian `Y`. Equivalently, whether
/// `Γ(U, V) = U*SU - V*G0V` is a submersion at `(I, I)`.
pub fn commutant_is_trivial(s: &HermitianMatrix, g0: &HermitianMatrix, tol: f64) -> Result<CommutantTest> {
    same_dim(s.dim(), g0.dim(), "commutant test")?;
    let basis = traceless_hermitian_basis(s.dim());
    let (sm, gm) = (s.as_matrix(), g0.as_matrix());
    let sys = assemble(&basis, |y| vec![y * sm - sm * y, y * gm - gm * y]);
    let (kernel_dim, _) = numerical_kernel(&sys, tol);
    Ok(CommutantTest { trivial: kernel_dim == 0, kernel_dim })
}

/// Result of [`pi_submersion_test`].
#[derive(Clone, Debug, PartialEq)]
pub struct PiSubmersionTest {
    pub submersion: bool,
    pub kernel_dim: usize,
    /// Unit Frobenius-norm `Z` with `A*Z, AZ*, B*Z, BZ*` Hermitian.
    pub witness: Option<GeneralMatrix>,
}

/// Decides whether `Π_(A,B)` is a submersion at `(I, I, I, I)`: true iff the
/// only `Z` with `A*Z, AZ*, B*Z, BZ*` all Hermitian is `Z = 0`.
pub fn pi_submersion_test(a: &GeneralMatrix, b: &GeneralMatrix, tol: f64) -> Result<PiSubmersionTest> {
    let d = check_square(a)?;
    same_dim(d, check_square(b)?, "pi submersion test")?;
    let basis = complex_matrix_basis(d);
    let (ah, bh) = (a.adjoint(), b.adjoint());
    let sys = assemble(&basis, |z| {
        let zh = z.adjoint();
        vec![
            a * &zh - z * &ah,
            &ah * z - &zh * a,
            b * &zh - z * &bh,
            &bh * z - &zh * b,
        ]
    });
    let (kernel_dim, w) = numerical_kernel(&sys, tol);
    let witness = w.map(|w| {
        let mut z = GeneralMatrix::zeros(d, d);
        for (k, x) in basis.iter().enumerate() {
            z += x * C64::new(w[k], 0.0);
        }
        let n = z.norm();
        z / C64::new(n, 0.0)
    });
    Ok(PiSubmersionTest { submersion: kernel_dim == 0, kernel_dim, witness })
}

/// Compression of `m` to the span of the given orthonormal columns:
/// returns `Q* M Q`.
pub(crate) fn compress(m: &GeneralMatrix, q: &GeneralMatrix) -> GeneralMatrix {
    q.adjoint() * m * q
}

/// Columns `range` of `u` as a matrix.
pub(crate) fn columns(u: &GeneralMatrix, range: std::ops::Range<usize>) -> GeneralMatrix {
    u.columns(range.start, range.len()).into_owned()
}
