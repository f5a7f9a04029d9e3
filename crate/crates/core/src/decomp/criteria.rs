use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    congruence_root, eig_hermitian, excision, max_abs, support_basis, trace_product,
    HermitianOperator, PositiveOperator,
};

/// Relative band inside which overlaps count as zero.
///
/// Criterion (a) compares `||sigma|supp rho||_2` against `SINGULAR_TOL * ||sigma||_2`,
/// (b) compares `||P_rho P_sigma||_2^2` against `SINGULAR_TOL`, and
/// (c) compares `Tr rho sigma` against `SINGULAR_TOL * ||rho||_2 ||sigma||_2`.
pub const SINGULAR_TOL: f64 = 1e-10;

/// Verdict of [`is_singular`] together with all three equivalent criteria.
#[derive(Debug, Clone, Serialize)]
pub struct SingularityReport {
    /// Criterion (c); this is the verdict.
    pub singular: bool,
    /// (a) the excision of sigma onto supp rho vanishes.
    pub excision_zero: bool,
    /// (b) the supports are orthogonal.
    pub supports_orthogonal: bool,
    /// (c) `Tr rho sigma` vanishes.
    pub trace_zero: bool,
    pub excision_norm: f64,
    pub projector_overlap: f64,
    pub trace_overlap: f64,
    pub tol: f64,
}

impl SingularityReport {
    pub fn criteria_agree(&self) -> bool {
        self.excision_zero == self.supports_orthogonal && self.supports_orthogonal == self.trace_zero
    }
}

/// Tests `rho _|_ sigma`.
pub fn is_singular(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<SingularityReport> {
    check_pair(rho, sigma)?;
    let scale_rho = rho.norm2();
    let scale_sigma = sigma.norm2();

    let ex = excision(sigma, rho)?;
    let excision_norm = spectral_radius(&ex)?;

    let overlap = support_basis(rho).adjoint() * support_basis(sigma);
    let gram = HermitianOperator::from_hermitian_unchecked(overlap.adjoint() * &overlap);
    let projector_overlap = spectral_radius(&gram)?.max(0.0).sqrt();

    let trace_overlap = trace_product(rho.matrix(), sigma.matrix()).re;

    let excision_zero = excision_norm <= SINGULAR_TOL * scale_sigma;
    let supports_orthogonal = projector_overlap * projector_overlap <= SINGULAR_TOL;
    let trace_zero = trace_overlap <= SINGULAR_TOL * scale_rho * scale_sigma;
    Ok(SingularityReport {
        singular: trace_zero,
        excision_zero,
        supports_orthogonal,
        trace_zero,
        excision_norm,
        projector_overlap,
        trace_overlap,
        tol: SINGULAR_TOL,
    })
}

/// Verdict of [`is_absolutely_continuous`] with the explicit witness of `rho = R sigma R`.
#[derive(Debug, Clone)]
pub struct AbsoluteContinuityReport {
    pub absolutely_continuous: bool,
    /// Smallest eigenvalue of the excision of sigma onto supp rho.
    pub min_excision_eigenvalue: f64,
    /// Threshold the minimum eigenvalue is compared against (sigma's rank tolerance).
    pub threshold: f64,
    /// `R = (rho_0 # sigma_0^{-1}) (+) 0` on `supp rho (+) ker rho`, when rho << sigma.
    pub witness: Option<PositiveOperator>,
    /// `||R sigma R - rho||_max` for the witness.
    pub witness_residual: Option<f64>,
}

/// Tests `rho << sigma`: the excision of sigma onto `supp rho` is strictly positive.
pub fn is_absolutely_continuous(
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<AbsoluteContinuityReport> {
    check_pair(rho, sigma)?;
    let ex = excision(sigma, rho)?;
    let spec = eig_hermitian(&ex)?;
    let min = spec.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let threshold = sigma.rank_tol();
    let ac = min > threshold;
    let (witness, witness_residual) = if ac {
        let (r, residual) = ac_witness(rho, sigma, ex)?;
        (Some(r), Some(residual))
    } else {
        (None, None)
    };
    Ok(AbsoluteContinuityReport {
        absolutely_continuous: ac,
        min_excision_eigenvalue: min,
        threshold,
        witness,
        witness_residual,
    })
}

/// Builds `R = U (rho_0 # sigma_0^{-1}) U^H` with `U` a basis of `supp rho` and
/// checks `R sigma R = rho`. The product is evaluated in the factored form
/// `U X (U^H sigma U) X U^H`; the dense triple product loses digits when `X` is large.
fn ac_witness(
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
    sigma0: HermitianOperator,
) -> Result<(PositiveOperator, f64)> {
    let basis = support_basis(rho);
    let rho0 = rho.hermitian().congruence(&basis);
    let sigma0 = PositiveOperator::with_cutoff(sigma0, sigma.cutoff())?;
    let x = congruence_root(&rho0, &sigma0)?;
    let lifted = &basis * x.matrix() * basis.adjoint();
    let r = PositiveOperator::with_cutoff(
        HermitianOperator::from_hermitian_unchecked(lifted),
        rho.cutoff(),
    )?;
    let sandwich = x.matrix() * sigma0.matrix() * x.matrix();
    let residual = max_abs(&(&basis * sandwich * basis.adjoint() - rho.matrix()));
    Ok((r, residual))
}

/// Mutual absolute continuity `rho ~ sigma`, with both characterizations.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MutualReport {
    /// `rho << sigma` and `sigma << rho`; the verdict.
    pub mutually_ac: bool,
    pub rho_ac_sigma: bool,
    pub sigma_ac_rho: bool,
    /// `sigma|supp rho > 0` and `rank rho = rank sigma`.
    pub rank_criterion: bool,
}

pub fn is_mutually_ac(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<MutualReport> {
    let forward = is_absolutely_continuous(rho, sigma)?.absolutely_continuous;
    let backward = is_absolutely_continuous(sigma, rho)?.absolutely_continuous;
    Ok(MutualReport {
        mutually_ac: forward && backward,
        rho_ac_sigma: forward,
        sigma_ac_rho: backward,
        rank_criterion: forward && rho.rank() == sigma.rank(),
    })
}

pub(crate) fn check_pair(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    if rho.is_zero() || sigma.is_zero() {
        return Err(Error::ZeroOperator);
    }
    Ok(())
}

fn spectral_radius(h: &HermitianOperator) -> Result<f64> {
    if h.dim() == 0 {
        return Ok(0.0);
    }
    Ok(eig_hermitian(h)?.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs())))
}
