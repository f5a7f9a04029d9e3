use super::criteria::is_absolutely_continuous;
use crate::error::{Error, Result};
use crate::linalg::{
    congruence_root, kernel_basis, log_pd, pinv_psd, support_basis, HermitianOperator,
    PositiveOperator,
};

/// Description recorded in every [`QllrVersion`] built by [`qllr`].
pub const GAMMA_IDENTITY: &str = "gamma = I on ker rho (identity on the complement of supp rho)";

/// One version of the quantum log-likelihood ratio `L(sigma|rho)`.
///
/// `exp(L/2) rho exp(L/2)` equals the absolutely continuous part of `sigma`
/// with respect to `rho`. `L` itself is not unique: its action on `ker rho` is
/// fixed by the free block recorded in `gamma_choice`.
#[derive(Debug, Clone)]
pub struct QllrVersion {
    pub l_matrix: HermitianOperator,
    pub gamma_choice: String,
    /// `exp(L/2)`, the strictly positive witness `R+` with `R+ rho R+ = sigma_ac`.
    pub witness: PositiveOperator,
}

/// `L(sigma|rho) = 2 log R+`, with
/// `R+ = F^H (sigma0 # rho0^{-1}) F + P_ker`, `F = U^H + sigma0^{-1} alpha K^H`,
/// where `U`, `K` are bases of `supp rho` and `ker rho`, `sigma0 = U^H sigma U`,
/// `rho0 = U^H rho U` and `alpha = U^H sigma K`.
///
/// Requires `rho << sigma`. `L(rho|rho) = 0` exactly.
pub fn qllr(sigma: &PositiveOperator, rho: &PositiveOperator) -> Result<QllrVersion> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    if rho.is_zero() {
        return Err(Error::ZeroRho);
    }
    let d = rho.dim();
    if sigma.matrix() == rho.matrix() {
        return Ok(QllrVersion {
            l_matrix: HermitianOperator::zeros(d),
            gamma_choice: GAMMA_IDENTITY.into(),
            witness: PositiveOperator::with_cutoff(HermitianOperator::identity(d), rho.cutoff())?,
        });
    }
    if sigma.is_zero() {
        return Err(Error::NotAbsolutelyContinuous { min_eigenvalue: 0.0 });
    }
    let ac = is_absolutely_continuous(rho, sigma)?;
    if !ac.absolutely_continuous {
        return Err(Error::NotAbsolutelyContinuous { min_eigenvalue: ac.min_excision_eigenvalue });
    }

    let supp = support_basis(rho);
    let ker = kernel_basis(rho);
    let sigma0_h = sigma.hermitian().congruence(&supp);
    let sigma0 = PositiveOperator::with_cutoff(sigma0_h.clone(), sigma.cutoff())?;
    let rho0 = PositiveOperator::with_cutoff(rho.hermitian().congruence(&supp), rho.cutoff())?;
    let alpha = supp.adjoint() * sigma.matrix() * &ker;

    // X = sigma0 # rho0^{-1} solves X rho0 X = sigma0.
    let x = congruence_root(&sigma0_h, &rho0)?;
    let f = supp.adjoint() + pinv_psd(&sigma0).matrix() * &alpha * ker.adjoint();
    let r_plus = f.adjoint() * x.matrix() * &f + &ker * ker.adjoint();
    let witness = PositiveOperator::with_cutoff(
        HermitianOperator::from_hermitian_unchecked(r_plus),
        rho.cutoff(),
    )?;
    let l_matrix = log_pd(&witness)?.scale(2.0);
    Ok(QllrVersion { l_matrix, gamma_choice: GAMMA_IDENTITY.into(), witness })
}

/// Radius `eps` (the smallest positive eigenvalue of `rho`) such that every state
/// within operator-norm distance `eps` of `rho` dominates it.
pub fn ac_ball_radius(rho: &PositiveOperator) -> Result<f64> {
    rho.min_positive_eigenvalue().ok_or(Error::ZeroRho)
}
