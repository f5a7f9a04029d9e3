//! Dense complex linear algebra on small operators.
//!
//! Every operator in the crate is a [`HermitianOperator`] or a [`PositiveOperator`]
//! (a Hermitian operator with a cached, clipped spectrum and a numerical rank).
//! The rank of a positive operator is decided once, at construction, against
//! `rank_tol = dim * ||A||_2 * cutoff`; everything downstream (supports, kernels,
//! generalized inverses) agrees with that decision.

mod compensated;
mod functions;
mod spectral;

pub use functions::{
    congruence_root, embed_site, excision, exp_hermitian, exp_i_hermitian, expm, geometric_mean, kernel_basis,
    kron, log_pd, pinv_psd, sqrt_psd, support_basis, support_projector, tensor_power,
};
pub use spectral::{eig_hermitian, SpectralDecomposition};

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Dense complex matrix used as the working representation everywhere.
pub type CMat = DMatrix<C64>;

/// Relative rank cutoff used when none is configured.
pub const DEFAULT_CUTOFF: f64 = 1e-11;
/// Relative Hermiticity tolerance: `||A - A^H||_max <= tol * max(1, ||A||_max)`.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-12;

static PROCESS_CUTOFF: OnceLock<f64> = OnceLock::new();

/// Sets the process-wide default rank cutoff. Can only be done once; later calls fail.
pub fn set_default_cutoff(cutoff: f64) -> Result<()> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
    }
    PROCESS_CUTOFF
        .set(cutoff)
        .map_err(|_| Error::InvalidArgument("default cutoff already set".into()))
}

/// The rank cutoff used by constructors that are not given one explicitly.
pub fn default_cutoff() -> f64 {
    PROCESS_CUTOFF.get().copied().unwrap_or(DEFAULT_CUTOFF)
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest entry modulus, `||A||_max`.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * re(0.5)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// A finite, row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(CMat);

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::BadShape { rows, cols, got: entries.len() });
        }
        Self::from_matrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_matrix(m: CMat) -> Result<Self> {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.0.is_square()
    }
}

/// Validates Hermiticity within the default tolerance and returns `(A + A^H)/2`.
pub fn hermitize(a: &ComplexMatrix) -> Result<HermitianOperator> {
    hermitize_with_tol(a, DEFAULT_HERMITIAN_TOL)
}

/// As [`hermitize`], with tolerance `tol * max(1, ||A||_max)`.
pub fn hermitize_with_tol(a: &ComplexMatrix, tol: f64) -> Result<HermitianOperator> {
    let m = a.matrix();
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let violation = max_abs(&(m - m.adjoint()));
    let tol = tol * max_abs(m).max(1.0);
    if violation > tol {
        return Err(Error::NotHermitianWithinTol { violation, tol });
    }
    Ok(HermitianOperator { mat: hermitian_part(m) })
}

/// Self-adjoint operator on `C^d`, stored exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMat,
}

impl HermitianOperator {
    /// Checks finiteness and Hermiticity (default tolerance), then symmetrizes.
    pub fn new(m: CMat) -> Result<Self> {
        hermitize(&ComplexMatrix::from_matrix(m)?)
    }

    /// Symmetrizes without checking; for matrices Hermitian by construction.
    pub(crate) fn from_hermitian_unchecked(m: CMat) -> Self {
        Self { mat: hermitian_part(&m) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: CMat::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: CMat::identity(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self { mat: CMat::from_fn(n, n, |i, j| if i == j { re(diag[i]) } else { re(0.0) }) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { mat: &self.mat * re(s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { mat: &self.mat + &other.mat }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { mat: &self.mat - &other.mat }
    }

    /// `X^H A X`, Hermitian for any `X`, accumulated in double-double so that
    /// small compressions keep full relative accuracy.
    pub fn congruence(&self, x: &CMat) -> Self {
        Self::from_hermitian_unchecked(hermitian_part(&compensated::congruence(&self.mat, x)))
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.mat)
    }
}

/// Positive semidefinite operator with its spectrum cached.
///
/// Eigenvalues in `[-rank_tol, 0)` are clipped to zero; anything more negative
/// is rejected with [`Error::NotPositive`].
#[derive(Debug, Clone)]
pub struct PositiveOperator {
    base: HermitianOperator,
    spectrum: SpectralDecomposition,
    rank: usize,
    rank_tol: f64,
    cutoff: f64,
}

impl PositiveOperator {
    pub fn new(base: HermitianOperator) -> Result<Self> {
        Self::with_cutoff(base, default_cutoff())
    }

    pub fn with_cutoff(base: HermitianOperator, cutoff: f64) -> Result<Self> {
        Self::with_tolerance(base, cutoff, 0.0)
    }

    /// Like [`with_cutoff`](Self::with_cutoff) but the rank tolerance never drops
    /// below `floor`. Used for operators derived from a parent whose scale should
    /// decide what counts as zero (a vanishing singular part, say).
    pub fn with_tolerance(base: HermitianOperator, cutoff: f64, floor: f64) -> Result<Self> {
        let spectrum = eig_hermitian(&base)?;
        Self::from_parts(base, spectrum, cutoff, floor, None)
    }

    /// For operators positive by construction (parts of a decomposition, say):
    /// every negative eigenvalue is rounding error and is clipped, whatever its size.
    /// Returns the operator and the largest clipped magnitude. The stored matrix is
    /// left untouched, so sums of parts still reproduce their parent exactly.
    pub(crate) fn from_derived(base: HermitianOperator, cutoff: f64, floor: f64) -> Result<(Self, f64)> {
        let spectrum = eig_hermitian(&base)?;
        let clipped = spectrum.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(-x));
        Ok((Self::from_parts(base, spectrum, cutoff, floor, Some(f64::INFINITY))?, clipped))
    }

    /// Convenience: validate a raw matrix as Hermitian then positive.
    pub fn from_matrix(m: CMat) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(diag))
    }

    /// Builds `U diag(values) U^H` from an already orthonormal basis, skipping the eigensolver.
    pub(crate) fn from_spectrum(spectrum: SpectralDecomposition, cutoff: f64) -> Result<Self> {
        let base = HermitianOperator::from_hermitian_unchecked(spectrum.reconstruct());
        let spectrum = spectrum.sorted_descending();
        Self::from_parts(base, spectrum, cutoff, 0.0, None)
    }

    /// `clip` bounds the negative eigenvalues that are silently zeroed (default `rank_tol`).
    fn from_parts(
        base: HermitianOperator,
        mut spectrum: SpectralDecomposition,
        cutoff: f64,
        floor: f64,
        clip: Option<f64>,
    ) -> Result<Self> {
        let dim = base.dim();
        let norm2 = spectrum.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let rank_tol = (dim as f64 * norm2 * cutoff).max(floor);
        let min = spectrum.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -clip.unwrap_or(rank_tol) {
            return Err(Error::NotPositive { min_eigenvalue: min, rank_tol });
        }
        for v in spectrum.eigenvalues.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let rank = spectrum.eigenvalues.iter().filter(|&&v| v > rank_tol).count();
        Ok(Self { base, spectrum, rank, rank_tol, cutoff })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.base
    }

    pub fn matrix(&self) -> &CMat {
        self.base.matrix()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// Eigenvalues, descending, clipped at zero.
    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.eigenvalues.as_slice()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Spectral norm `||A||_2`.
    pub fn norm2(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Smallest eigenvalue above the rank tolerance, if any.
    pub fn min_positive_eigenvalue(&self) -> Option<f64> {
        (self.rank > 0).then(|| self.eigenvalues()[self.rank - 1])
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.rank == self.dim()
    }

    pub fn trace(&self) -> f64 {
        self.base.trace()
    }

    /// Rebuilds with a different cutoff (reuses the cached spectrum).
    pub fn recut(&self, cutoff: f64) -> Result<Self> {
        Self::from_parts(self.base.clone(), self.spectrum.clone(), cutoff, 0.0, None)
    }
}
