use nalgebra::DVector;

use super::{
    c, max_abs, spectral::SpectralDecomposition, CMat, C64, ComplexMatrix, HermitianOperator,
    PositiveOperator,
};
use crate::error::{Error, Result};

/// Orthonormal basis (columns) of `supp A`, ordered by eigenvalue, descending.
pub fn support_basis(a: &PositiveOperator) -> CMat {
    a.spectrum().columns(0, a.rank())
}

/// Orthonormal basis (columns) of `ker A`.
pub fn kernel_basis(a: &PositiveOperator) -> CMat {
    a.spectrum().columns(a.rank(), a.dim() - a.rank())
}

/// Orthogonal projector onto `supp A`.
pub fn support_projector(a: &PositiveOperator) -> HermitianOperator {
    let rank = a.rank();
    HermitianOperator::from_hermitian_unchecked(
        a.spectrum().map_indexed(|k, _| if k < rank { 1.0 } else { 0.0 }),
    )
}

/// Positive square root.
pub fn sqrt_psd(a: &PositiveOperator) -> PositiveOperator {
    let values = a.spectrum().eigenvalues.map(|x| x.max(0.0).sqrt());
    PositiveOperator::from_spectrum(a.spectrum().with_eigenvalues(values), a.cutoff())
        .expect("square root of a positive spectrum is positive")
}

/// Matrix logarithm of a strictly positive operator.
pub fn log_pd(a: &PositiveOperator) -> Result<HermitianOperator> {
    require_strictly_positive(a)?;
    Ok(HermitianOperator::from_hermitian_unchecked(a.spectrum().map(f64::ln)))
}

/// Moore-Penrose inverse: eigenvalues above the rank tolerance inverted, the rest zeroed.
pub fn pinv_psd(a: &PositiveOperator) -> PositiveOperator {
    let tol = a.rank_tol();
    let values = a.spectrum().eigenvalues.map(|x| if x > tol { 1.0 / x } else { 0.0 });
    PositiveOperator::from_spectrum(a.spectrum().with_eigenvalues(values), a.cutoff())
        .expect("generalized inverse of a positive spectrum is positive")
}

/// Operator geometric mean `A # B = A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}`,
/// the unique positive solution of `B = X A^{-1} X`.
pub fn geometric_mean(a: &PositiveOperator, b: &PositiveOperator) -> Result<PositiveOperator> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    require_strictly_positive(a)?;
    require_strictly_positive(b)?;
    let half = a.spectrum().map(f64::sqrt);
    let inv_half = a.spectrum().map(|x| 1.0 / x.sqrt());
    let inner = HermitianOperator::from_hermitian_unchecked(&inv_half * b.matrix() * &inv_half);
    let inner = PositiveOperator::with_cutoff(inner, a.cutoff())?;
    let root = sqrt_psd(&inner);
    let x = HermitianOperator::from_hermitian_unchecked(&half * root.matrix() * &half);
    PositiveOperator::with_cutoff(x, a.cutoff())
}

/// Newton steps used by [`congruence_root`] after the closed-form start.
const CONGRUENCE_NEWTON_STEPS: usize = 8;

/// The positive solution `X` of `X W X = T` for `W > 0` and `T >= 0`, i.e. `T # W^{-1}`.
///
/// Works in the eigenbasis of `W = V S V^H`: with `C = S^{1/2} V^H T V S^{1/2}` the
/// solution is `X = V S^{-1/2} C^{1/2} S^{-1/2} V^H`. When `W` has a wide spread of
/// eigenvalues the square root of the graded matrix `C` is refined by Newton steps
/// on `Y^2 = C`, which keeps `X W X - T` at rounding level where the plain
/// geometric-mean formula loses every digit.
pub fn congruence_root(target: &HermitianOperator, weight: &PositiveOperator) -> Result<PositiveOperator> {
    if target.dim() != weight.dim() {
        return Err(Error::DimensionMismatch { expected: weight.dim(), got: target.dim() });
    }
    require_strictly_positive(weight)?;
    let r = weight.dim();
    let spec = weight.spectrum();
    let v = &spec.eigenvectors;
    let half: Vec<f64> = spec.eigenvalues.iter().map(|x| x.sqrt()).collect();
    let inv_half: Vec<f64> = half.iter().map(|x| 1.0 / x).collect();
    let graded = |m: &CMat, d: &[f64]| CMat::from_fn(r, r, |i, j| m[(i, j)] * d[i] * d[j]);
    // Y-coordinates: Y = S^{1/2} V^H X V S^{1/2}, in which X W X = T reads Y^2 = C.
    let to_y = |m: &CMat| graded(&(v.adjoint() * m * v), &half);
    let from_y = |m: &CMat| super::hermitian_part(&(v * graded(m, &inv_half) * v.adjoint()));
    let t = target.matrix();
    let w = weight.matrix();

    // C = K^H K with K = T^{1/2} V S^{1/2}; the SVD of K gives C^{1/2} without
    // squaring the condition number.
    let t_spec = super::eig_hermitian(target)?;
    if let Some(&min) = t_spec.eigenvalues.iter().next_back() {
        let tol = r as f64 * t_spec.eigenvalues[0].abs().max(min.abs()) * weight.cutoff();
        if min < -tol {
            return Err(Error::NotPositive { min_eigenvalue: min, rank_tol: tol });
        }
    }
    let k = t_spec.map(|x| x.max(0.0).sqrt()) * v * CMat::from_fn(r, r, |i, j| {
        if i == j { c(half[i], 0.0) } else { c(0.0, 0.0) }
    });
    let mut y = polar_positive_factor(&k)?;
    let mut x = from_y(&y);
    let mut residual = t - &x * w * &x;
    let mut last = max_abs(&residual);
    for _ in 0..CONGRUENCE_NEWTON_STEPS {
        if last == 0.0 {
            break;
        }
        // Y dY + dY Y = C - Y^2 with the right-hand side taken from the X-level
        // residual, solved in the eigenbasis of Y.
        let ys = super::eig_hermitian(&HermitianOperator::from_hermitian_unchecked(y.clone()))?;
        let u = &ys.eigenvectors;
        let rhs = u.adjoint() * to_y(&residual) * u;
        let step = CMat::from_fn(r, r, |a, b| {
            let s = ys.eigenvalues[a] + ys.eigenvalues[b];
            if s > 0.0 { rhs[(a, b)] / s } else { c(0.0, 0.0) }
        });
        y = super::hermitian_part(&(&y + u * step * u.adjoint()));
        let next_x = from_y(&y);
        residual = t - &next_x * w * &next_x;
        let res = max_abs(&residual);
        if res < last {
            (x, last) = (next_x, res);
        }
    }
    // With T singular, X is singular too and its null directions are only fixed
    // to about eps / min(W); the rounding there may come out slightly negative.
    let (x, _) = PositiveOperator::from_derived(HermitianOperator::from_hermitian_unchecked(x), weight.cutoff(), 0.0)?;
    Ok(x)
}

/// `(K^H K)^{1/2} = W diag(s) W^H` from the SVD `K = U diag(s) W^H`.
fn polar_positive_factor(k: &CMat) -> Result<CMat> {
    let n = k.nrows();
    let svd = faer::Mat::<C64>::from_fn(n, n, |i, j| k[(i, j)])
        .svd()
        .map_err(|_| Error::ConvergenceFailure)?;
    let (s, w) = (svd.S(), svd.V());
    let w = CMat::from_fn(n, n, |i, j| w[(i, j)]);
    let mut scaled = w.clone();
    for j in 0..n {
        let sj = s[j].re;
        scaled.column_mut(j).scale_mut(sj);
    }
    Ok(super::hermitian_part(&(scaled * w.adjoint())))
}

/// Compression of `sigma` to `supp rho`, as an `r x r` matrix in the eigenbasis
/// of `rho` (eigenvalues descending), `r = rank rho`.
pub fn excision(sigma: &PositiveOperator, rho: &PositiveOperator) -> Result<HermitianOperator> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    if rho.is_zero() {
        return Err(Error::ZeroRho);
    }
    Ok(sigma.hermitian().congruence(&support_basis(rho)))
}

/// Matrix exponential.
///
/// Hermitian and anti-Hermitian inputs go through the eigendecomposition;
/// general input uses Pade scaling and squaring.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = a.matrix();
    if !m.is_square() {
        return Err(Error::NonSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let scale = max_abs(m).max(1.0);
    let tol = 1e-14 * scale;
    let out = if max_abs(&(m - m.adjoint())) <= tol {
        exp_hermitian(&HermitianOperator::from_hermitian_unchecked(m.clone()), 1.0)?
    } else if max_abs(&(m + m.adjoint())) <= tol {
        // A = iH with H = -iA
        let h = HermitianOperator::from_hermitian_unchecked(m * c(0.0, -1.0));
        exp_i_hermitian(&h, 1.0)?
    } else {
        m.clone().exp()
    };
    ComplexMatrix::from_matrix(out).map_err(|_| Error::Overflow)
}

/// `exp(t H)` for Hermitian `H`.
pub fn exp_hermitian(h: &HermitianOperator, t: f64) -> Result<CMat> {
    let spec = super::eig_hermitian(h)?;
    let out = spec.map(|x| (t * x).exp());
    if out.iter().any(|z| !z.re.is_finite()) {
        return Err(Error::Overflow);
    }
    Ok(out)
}

/// `exp(i t H)` for Hermitian `H` (unitary).
pub fn exp_i_hermitian(h: &HermitianOperator, t: f64) -> Result<CMat> {
    let spec = super::eig_hermitian(h)?;
    Ok(spec.map_complex(|x| c(0.0, t * x).exp()))
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `a^{(x) n}`.
pub fn tensor_power(a: &CMat, n: usize) -> CMat {
    assert!(n >= 1, "tensor power needs n >= 1");
    let mut out = a.clone();
    for _ in 1..n {
        out = out.kronecker(a);
    }
    out
}

/// `I^{(x) k} (x) op (x) I^{(x) (n-k-1)}` (site index `k` counted from zero).
pub fn embed_site(op: &CMat, k: usize, n: usize) -> CMat {
    assert!(k < n, "site index out of range");
    let d = op.nrows();
    let left = CMat::identity(d.pow(k as u32), d.pow(k as u32));
    let right = CMat::identity(d.pow((n - k - 1) as u32), d.pow((n - k - 1) as u32));
    left.kronecker(op).kronecker(&right)
}

fn require_strictly_positive(a: &PositiveOperator) -> Result<()> {
    if !a.is_strictly_positive() {
        return Err(Error::SingularInput { min_eigenvalue: a.min_eigenvalue(), rank_tol: a.rank_tol() });
    }
    Ok(())
}

impl SpectralDecomposition {
    /// `U diag(f(k, lambda_k)) U^H`.
    pub(crate) fn map_indexed(&self, f: impl Fn(usize, f64) -> f64) -> CMat {
        let values = DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().enumerate().map(|(k, &x)| f(k, x)),
        );
        self.with_eigenvalues(values).reconstruct()
    }
}
