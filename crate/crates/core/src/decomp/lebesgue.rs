use serde::{Deserialize, Serialize};

use super::criteria::check_pair;
use crate::error::{Error, Result};
use crate::linalg::{
    congruence_root, eig_hermitian, excision, kernel_basis, pinv_psd, sqrt_psd,
    support_basis, CMat, HermitianOperator, PositiveOperator,
};

/// Which construction produced a [`LebesgueDecomposition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Block formulas on `H1 (+) H2 (+) H3`.
    Block,
    /// Closed-form witness `R = sqrt(sigma) (sqrt(sqrt(sigma) rho sqrt(sigma)))^+ sqrt(sigma)`.
    Direct,
}

/// `sigma = sigma_ac + sigma_sing` with `sigma_ac = R rho R << rho` and `sigma_sing _|_ rho`.
#[derive(Debug, Clone)]
pub struct LebesgueDecomposition {
    pub sigma_ac: PositiveOperator,
    pub sigma_sing: PositiveOperator,
    pub witness_r: PositiveOperator,
    pub route: Route,
    /// Largest negative eigenvalue (in magnitude) clipped from the computed parts.
    /// Zero up to rounding on well-conditioned pairs; it grows as the pair
    /// approaches the singular boundary, where the split is discontinuous.
    pub clipped: f64,
}

/// Orthogonal split `H = H1 (+) H2 (+) H3` adapted to the pair `(rho, sigma)`:
/// `H3 = ker rho`, and `supp rho = H1 (+) H2` with `H1` the kernel of the
/// excision of sigma onto `supp rho`.
///
/// In the basis `[H1 | H2 | H3]`:
///
/// ```text
///       | rho2  rho1  0 |           | 0   0       0    |
/// rho = | rho1* rho0  0 |   sigma = | 0   sigma0  alpha |
///       | 0     0     0 |           | 0   alpha*  beta  |
/// ```
#[derive(Debug, Clone)]
pub struct SupportSplit {
    pub basis_h1: CMat,
    pub basis_h2: CMat,
    pub basis_h3: CMat,
    pub rho2: CMat,
    pub rho1: CMat,
    pub rho0: CMat,
    pub sigma0: CMat,
    pub alpha: CMat,
    pub beta: CMat,
}

impl SupportSplit {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.basis_h1.ncols(), self.basis_h2.ncols(), self.basis_h3.ncols())
    }

    /// `[H1 | H2 | H3]`, a unitary matrix.
    pub fn basis(&self) -> CMat {
        let d = self.basis_h1.nrows();
        let (m1, m2, m3) = self.dims();
        let mut v = CMat::zeros(d, m1 + m2 + m3);
        v.columns_mut(0, m1).copy_from(&self.basis_h1);
        v.columns_mut(m1, m2).copy_from(&self.basis_h2);
        v.columns_mut(m1 + m2, m3).copy_from(&self.basis_h3);
        v
    }

    /// rho rebuilt from its blocks, in the ambient basis.
    pub fn reassemble_rho(&self) -> CMat {
        let (b1, b2) = (&self.basis_h1, &self.basis_h2);
        b1 * &self.rho2 * b1.adjoint()
            + b1 * &self.rho1 * b2.adjoint()
            + b2 * self.rho1.adjoint() * b1.adjoint()
            + b2 * &self.rho0 * b2.adjoint()
    }

    /// sigma rebuilt from its blocks, in the ambient basis.
    pub fn reassemble_sigma(&self) -> CMat {
        let (b2, b3) = (&self.basis_h2, &self.basis_h3);
        b2 * &self.sigma0 * b2.adjoint()
            + b2 * &self.alpha * b3.adjoint()
            + b3 * self.alpha.adjoint() * b2.adjoint()
            + b3 * &self.beta * b3.adjoint()
    }
}

/// Builds the split. Fails with [`Error::MutuallySingular`] when `H2 = {0}`.
pub fn support_split(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<SupportSplit> {
    check_pair(rho, sigma)?;
    let supp = support_basis(rho);
    let ker = kernel_basis(rho);
    let ex = excision(sigma, rho)?;
    let spec = eig_hermitian(&ex)?;
    let threshold = sigma.rank_tol();
    let k = spec.eigenvalues.iter().filter(|&&x| x > threshold).count();
    if k == 0 {
        return Err(Error::MutuallySingular);
    }
    let r = supp.ncols();
    let basis_h2 = &supp * spec.columns(0, k);
    let basis_h1 = &supp * spec.columns(k, r - k);
    let basis_h3 = ker;

    let block = |m: &CMat, left: &CMat, right: &CMat| left.adjoint() * m * right;
    let rho_m = rho.matrix();
    let sigma_m = sigma.matrix();
    let sigma0 = crate::linalg::hermitian_part(&block(sigma_m, &basis_h2, &basis_h2));
    Ok(SupportSplit {
        rho2: crate::linalg::hermitian_part(&block(rho_m, &basis_h1, &basis_h1)),
        rho1: block(rho_m, &basis_h1, &basis_h2),
        rho0: crate::linalg::hermitian_part(&block(rho_m, &basis_h2, &basis_h2)),
        alpha: block(sigma_m, &basis_h2, &basis_h3),
        beta: crate::linalg::hermitian_part(&block(sigma_m, &basis_h3, &basis_h3)),
        sigma0,
        basis_h1,
        basis_h2,
        basis_h3,
    })
}

/// Lebesgue decomposition of `sigma` with respect to `rho` by the block formulas.
///
/// `sigma_ac` keeps the `H2`/`H3` blocks `[[sigma0, alpha], [alpha*, alpha* sigma0^{-1} alpha]]`,
/// `sigma_sing` is the Schur complement `beta - alpha* sigma0^{-1} alpha` on `H3`, and the
/// witness is `R = E* diag(0, sigma0 # rho0^{-1}, 0) E` with
/// `E = [[I, 0, 0], [0, I, sigma0^{-1} alpha], [0, 0, I]]`.
/// A mutually singular pair yields `(0, sigma)` with `R = 0`.
pub fn lebesgue_decompose(
    sigma: &PositiveOperator,
    rho: &PositiveOperator,
) -> Result<LebesgueDecomposition> {
    if let Some(trivial) = trivial_cases(sigma, rho, Route::Block)? {
        return Ok(trivial);
    }
    let split = match support_split(rho, sigma) {
        Ok(s) => s,
        Err(Error::MutuallySingular) => return singular_case(sigma, Route::Block),
        Err(e) => return Err(e),
    };
    let cutoff = sigma.cutoff();
    let sigma0 = PositiveOperator::with_cutoff(
        HermitianOperator::from_hermitian_unchecked(split.sigma0.clone()),
        cutoff,
    )?;
    let rho0 = PositiveOperator::with_cutoff(
        HermitianOperator::from_hermitian_unchecked(split.rho0.clone()),
        rho.cutoff(),
    )?;
    let sigma0_inv = pinv_psd(&sigma0);
    let shift = sigma0_inv.matrix() * &split.alpha; // sigma0^{-1} alpha
    let schur = split.alpha.adjoint() * &shift; // alpha* sigma0^{-1} alpha

    let (b2, b3) = (&split.basis_h2, &split.basis_h3);
    let ac = b2 * &split.sigma0 * b2.adjoint()
        + b2 * &split.alpha * b3.adjoint()
        + b3 * split.alpha.adjoint() * b2.adjoint()
        + b3 * &schur * b3.adjoint();
    let sing = b3 * (&split.beta - &schur) * b3.adjoint();

    // Middle block row of E V^H: b2^H + sigma0^{-1} alpha b3^H.
    let x = congruence_root(&HermitianOperator::from_hermitian_unchecked(split.sigma0.clone()), &rho0)?;
    let row = b2.adjoint() + &shift * b3.adjoint();
    let witness = row.adjoint() * x.matrix() * &row;

    assemble(sigma, ac, sing, witness, Route::Block)
}

/// Lebesgue decomposition through the closed-form witness
/// `R = sqrt(sigma) (sqrt(sqrt(sigma) rho sqrt(sigma)))^+ sqrt(sigma)`,
/// `sigma_ac = R rho R`, `sigma_sing = sigma - R rho R`.
///
/// The generalized inverse of the inner square root is taken as
/// `M^{+1/2}` on the spectrum of `M = sqrt(sigma) rho sqrt(sigma)`, so that the
/// rank decision is made on `M` itself rather than on its square root.
pub fn lebesgue_decompose_direct(
    sigma: &PositiveOperator,
    rho: &PositiveOperator,
) -> Result<LebesgueDecomposition> {
    if let Some(trivial) = trivial_cases(sigma, rho, Route::Direct)? {
        return Ok(trivial);
    }
    let root = sqrt_psd(sigma);
    let inner = rho.hermitian().congruence(root.matrix());
    // M scales like ||rho|| ||sigma||; anything below that scale's tolerance is noise.
    let floor = sigma.dim() as f64 * rho.norm2() * sigma.norm2() * sigma.cutoff();
    let inner = PositiveOperator::with_tolerance(inner, sigma.cutoff(), floor)?;
    if inner.is_zero() {
        return singular_case(sigma, Route::Direct);
    }
    let tol = inner.rank_tol();
    let inv_root = inner.spectrum().map(|x| if x > tol { 1.0 / x.sqrt() } else { 0.0 });
    let witness = root.matrix() * inv_root * root.matrix();
    let ac = &witness * rho.matrix() * &witness;
    let sing = sigma.matrix() - &ac;
    assemble(sigma, ac, sing, witness, Route::Direct)
}

fn trivial_cases(
    sigma: &PositiveOperator,
    rho: &PositiveOperator,
    route: Route,
) -> Result<Option<LebesgueDecomposition>> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    if rho.is_zero() {
        return Err(Error::ZeroRho);
    }
    if sigma.is_zero() {
        let d = sigma.dim();
        let zero = |c| PositiveOperator::with_cutoff(HermitianOperator::zeros(d), c);
        return Ok(Some(LebesgueDecomposition {
            sigma_ac: zero(sigma.cutoff())?,
            sigma_sing: sigma.clone(),
            witness_r: zero(sigma.cutoff())?,
            route,
            clipped: 0.0,
        }));
    }
    Ok(None)
}

fn singular_case(sigma: &PositiveOperator, route: Route) -> Result<LebesgueDecomposition> {
    let d = sigma.dim();
    let zero = PositiveOperator::with_cutoff(HermitianOperator::zeros(d), sigma.cutoff())?;
    Ok(LebesgueDecomposition {
        sigma_ac: zero.clone(),
        sigma_sing: sigma.clone(),
        witness_r: zero,
        route,
        clipped: 0.0,
    })
}

fn assemble(
    sigma: &PositiveOperator,
    ac: CMat,
    sing: CMat,
    witness: CMat,
    route: Route,
) -> Result<LebesgueDecomposition> {
    let cutoff = sigma.cutoff();
    let floor = sigma.rank_tol();
    let part = |m: CMat| {
        PositiveOperator::from_derived(HermitianOperator::from_hermitian_unchecked(m), cutoff, floor)
    };
    let (sigma_ac, clip_ac) = part(ac)?;
    let (sigma_sing, clip_sing) = part(sing)?;
    let (witness_r, clip_r) = PositiveOperator::from_derived(
        HermitianOperator::from_hermitian_unchecked(witness),
        cutoff,
        0.0,
    )?;
    Ok(LebesgueDecomposition {
        sigma_ac,
        sigma_sing,
        witness_r,
        route,
        clipped: clip_ac.max(clip_sing).max(clip_r),
    })
}
