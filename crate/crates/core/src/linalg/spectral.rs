use faer::{Mat, Side};
use nalgebra::DVector;

use super::{c, hermitian_part, re, CMat, HermitianOperator, C64};
use crate::error::{Error, Result};

/// Eigenvalues closer than this (relative to the spectral radius) share an eigenspace.
const CLUSTER_REL_TOL: f64 = 1e-12;

/// `A = U diag(eigenvalues) U^H`, eigenvalues descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMat,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> CMat {
        self.map(|x| x)
    }

    /// `U diag(f(lambda)) U^H`, symmetrized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMat {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            scaled.column_mut(j).scale_mut(s);
        }
        hermitian_part(&(scaled * self.eigenvectors.adjoint()))
    }

    /// `U diag(f(lambda)) U^H` for a complex-valued spectral function (not symmetrized).
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> CMat {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= s;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Columns `range` of the eigenvector matrix.
    pub fn columns(&self, start: usize, count: usize) -> CMat {
        self.eigenvectors.columns(start, count).into_owned()
    }

    pub(crate) fn with_eigenvalues(&self, values: DVector<f64>) -> Self {
        Self { eigenvalues: values, eigenvectors: self.eigenvectors.clone() }
    }

    pub(crate) fn sorted_descending(self) -> Self {
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.eigenvalues[b].total_cmp(&self.eigenvalues[a]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&k| self.eigenvalues[k]));
        let eigenvectors = CMat::from_fn(n, n, |i, j| self.eigenvectors[(i, order[j])]);
        Self { eigenvalues, eigenvectors }
    }
}

/// Hermitian eigendecomposition with a reproducible basis.
///
/// Eigenvalues are sorted descending. Inside each (numerically) degenerate
/// eigenspace the basis is rebuilt by pivoted Gram-Schmidt on the projected
/// standard basis vectors, which also fixes eigenvector phases: the pivot
/// component of every eigenvector is real and positive.
pub fn eig_hermitian(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let m = a.matrix();
    let eig = Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)])
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure)?;
    let (values, vectors) = (eig.S(), eig.U());
    let raw = SpectralDecomposition {
        eigenvalues: DVector::from_fn(n, |k, _| values[k].re),
        eigenvectors: CMat::from_fn(n, n, |i, j| vectors[(i, j)]),
    }
    .sorted_descending();

    let radius = raw.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let tol = CLUSTER_REL_TOL * radius;
    let mut vectors = raw.eigenvectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && raw.eigenvalues[end - 1] - raw.eigenvalues[end] <= tol {
            end += 1;
        }
        let block = raw.eigenvectors.columns(start, end - start).into_owned();
        let canon = canonical_basis(&block);
        vectors.columns_mut(start, end - start).copy_from(&canon);
        start = end;
    }
    Ok(SpectralDecomposition { eigenvalues: raw.eigenvalues, eigenvectors: vectors })
}

/// Orthonormal basis of `span(q)` obtained from the projected standard basis.
fn canonical_basis(q: &CMat) -> CMat {
    let (n, m) = q.shape();
    // coefficient of e_k in the q-basis: conj(q[k, :])
    let mut coeffs: Vec<DVector<C64>> =
        (0..n).map(|k| DVector::from_iterator(m, q.row(k).iter().map(|z| z.conj()))).collect();
    let mut out = CMat::zeros(n, m);
    for col in 0..m {
        let norms: Vec<f64> = coeffs.iter().map(|v| v.norm()).collect();
        let best = norms.iter().copied().fold(0.0, f64::max);
        let pivot = norms.iter().position(|&x| x >= best * (1.0 - 1e-8)).unwrap_or(0);
        let u = &coeffs[pivot] / c(norms[pivot], 0.0);
        for v in coeffs.iter_mut() {
            let proj = u.dotc(v);
            *v -= &u * proj;
        }
        out.set_column(col, &(q * &u));
    }
    // Re-orthonormalize once to remove drift from the projections.
    let mut result = out.clone();
    for j in 0..m {
        let mut v = out.column(j).into_owned();
        for k in 0..j {
            let prev = result.column(k).into_owned();
            let proj = prev.dotc(&v);
            v -= prev * proj;
        }
        let nrm = v.norm();
        result.set_column(j, &(v / re(nrm)));
    }
    result
}
