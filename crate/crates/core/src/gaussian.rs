//! Quantum Gaussian states on a CCR algebra, through their characteristic and
//! quasi-characteristic functions.
//!
//! `N(h, J)` has mean `h` (real) and `J = V + iS` with `V` symmetric and `S`
//! skew-symmetric. Index contraction follows the convention
//! `xi_t^i xi_u^j J_{ji}`: the *second* vector's index goes into `J`'s first slot.
//! With `J` Hermitian that is `xi_u^T J xi_t`, and swapping the two vectors
//! conjugates nothing — it transposes `J`, which matters whenever `S != 0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{c, eig_hermitian, max_abs, CMat, HermitianOperator, C64};

/// Smallest eigenvalue of `J` tolerated as rounding.
const J_PSD_TOL: f64 = 1e-12;
/// Hermiticity tolerance on `J`, relative to `max(1, ||J||_max)`.
const J_HERMITIAN_TOL: f64 = 1e-12;

/// The Gaussian state `N(h, J)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    mean: Vec<f64>,
    j: CMat,
}

impl GaussianSpec {
    /// Validates `J = J^H` and `J >= -1e-12`, and symmetrizes `J`.
    pub fn new(mean: Vec<f64>, j: CMat) -> Result<Self> {
        if !j.is_square() {
            return Err(Error::NonSquare { rows: j.nrows(), cols: j.ncols() });
        }
        if j.nrows() != mean.len() {
            return Err(Error::DimensionMismatch { expected: mean.len(), got: j.nrows() });
        }
        if let Some(k) = mean.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: k, col: 0 });
        }
        let violation = max_abs(&(&j - j.adjoint()));
        let tol = J_HERMITIAN_TOL * max_abs(&j).max(1.0);
        if violation > tol {
            return Err(Error::NotHermitianWithinTol { violation, tol });
        }
        let herm = HermitianOperator::new(j)?;
        if herm.dim() > 0 {
            let min = eig_hermitian(&herm)?.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            if min < -J_PSD_TOL {
                return Err(Error::NotPositive { min_eigenvalue: min, rank_tol: J_PSD_TOL });
            }
        }
        Ok(Self { mean, j: herm.into_matrix() })
    }

    /// Centred state `N(0, J)`.
    pub fn centered(j: CMat) -> Result<Self> {
        Self::new(vec![0.0; j.nrows()], j)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn j(&self) -> &CMat {
        &self.j
    }

    /// Covariance `V = Re J`.
    pub fn v(&self) -> DMatrix<f64> {
        self.j.map(|z| z.re)
    }

    /// Symplectic part `S = Im J`.
    pub fn s(&self) -> DMatrix<f64> {
        self.j.map(|z| z.im)
    }

    /// `Re J > 0`, required of a q-LAN limit.
    pub fn has_positive_definite_covariance(&self) -> bool {
        let v = self.v().map(|x| c(x, 0.0));
        match eig_hermitian(&HermitianOperator::from_hermitian_unchecked(v)) {
            Ok(spec) => spec.eigenvalues.iter().all(|&x| x > J_PSD_TOL),
            Err(_) => false,
        }
    }
}

/// Ordered list `xi_1, ..., xi_s` of complex vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct QcfQuery {
    xis: Vec<Vec<C64>>,
}

impl QcfQuery {
    pub fn new(xis: Vec<Vec<C64>>) -> Result<Self> {
        let first = xis
            .first()
            .ok_or_else(|| Error::InvalidArgument("a query needs at least one vector".into()))?;
        let d = first.len();
        for (t, xi) in xis.iter().enumerate() {
            if xi.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: xi.len() });
            }
            if let Some(i) = xi.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite { row: t, col: i });
            }
        }
        Ok(Self { xis })
    }

    /// Query made of real vectors.
    pub fn real(xis: &[Vec<f64>]) -> Result<Self> {
        Self::new(xis.iter().map(|v| v.iter().map(|&x| c(x, 0.0)).collect()).collect())
    }

    /// The single real vector `xi`.
    pub fn single(xi: &[f64]) -> Self {
        Self::real(&[xi.to_vec()]).expect("a single finite vector is a valid query")
    }

    pub fn xis(&self) -> &[Vec<C64>] {
        &self.xis
    }

    pub fn len(&self) -> usize {
        self.xis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xis.is_empty()
    }

    /// Length of each vector.
    pub fn dim(&self) -> usize {
        self.xis[0].len()
    }

    pub fn is_real(&self) -> bool {
        self.xis.iter().flatten().all(|z| z.im == 0.0)
    }

    /// Largest Euclidean norm among the vectors.
    pub fn max_norm(&self) -> f64 {
        self.xis
            .iter()
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// `exp(i xi.h - xi^T V xi / 2)` for real `xi`.
pub fn char_fn(spec: &GaussianSpec, xi: &[f64]) -> Result<C64> {
    if xi.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: xi.len() });
    }
    let d = spec.dim();
    let shift: f64 = xi.iter().zip(&spec.mean).map(|(x, h)| x * h).sum();
    let mut quad = 0.0;
    for i in 0..d {
        for j in 0..d {
            quad += xi[i] * xi[j] * spec.j[(i, j)].re;
        }
    }
    Ok(c(-0.5 * quad, shift).exp())
}

/// Quasi-characteristic function
/// `exp( sum_t (i xi_t^i h_i - xi_t^i xi_t^j J_ji / 2) - sum_{t<u} xi_t^i xi_u^j J_ji )`.
///
/// A single real vector is routed through [`char_fn`], so both agree bit for bit.
pub fn qcf(spec: &GaussianSpec, query: &QcfQuery) -> Result<C64> {
    if query.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: query.dim() });
    }
    if query.len() == 1 && query.is_real() {
        let xi: Vec<f64> = query.xis[0].iter().map(|z| z.re).collect();
        return char_fn(spec, &xi);
    }
    let xis = query.xis();
    let mut exponent = c(0.0, 0.0);
    for (t, xi) in xis.iter().enumerate() {
        let shift: C64 = xi.iter().zip(&spec.mean).map(|(x, h)| x * h).sum();
        exponent += c(0.0, 1.0) * shift - 0.5 * contract(&spec.j, xi, xi);
        for xu in &xis[t + 1..] {
            exponent -= contract(&spec.j, xi, xu);
        }
    }
    Ok(exponent.exp())
}

/// `sum_{ij} a^i b^j J_{ji}`.
fn contract(j: &CMat, a: &[C64], b: &[C64]) -> C64 {
    let d = a.len();
    let mut acc = c(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += a[i] * b[k] * j[(k, i)];
        }
    }
    acc
}

/// Limit `N((Re tau) h, Sigma)` of the Le Cam third lemma.
///
/// `sigma` is `r x r` Hermitian PSD, `tau` is `r x d` and `h` has `d` components.
pub fn lecam_limit_spec(sigma: &CMat, tau: &CMat, h: &[f64]) -> Result<GaussianSpec> {
    if tau.nrows() != sigma.nrows() {
        return Err(Error::DimensionMismatch { expected: sigma.nrows(), got: tau.nrows() });
    }
    if tau.ncols() != h.len() {
        return Err(Error::DimensionMismatch { expected: tau.ncols(), got: h.len() });
    }
    let mean = (0..tau.nrows())
        .map(|i| (0..h.len()).map(|k| tau[(i, k)].re * h[k]).sum())
        .collect();
    GaussianSpec::new(mean, sigma.clone())
}
