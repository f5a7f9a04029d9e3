//! Numerical harness for quantum local asymptotic normality on i.i.d. models.
//!
//! Collective observables `X_i^{(n)} = n^{-1/2} sum_k A_i^{(k)}` on `n` copies
//! are never built for large `n`: their ordered exponential products factorize
//! site by site, so finite-n quasi-characteristic functions reduce to
//! `z^n` with `z` a single-site trace. The reports compare those values with
//! the Gaussian limits and fit log-log decay rates; verdict thresholds are
//! harness policy and travel with every report.

mod collective;
mod reports;
mod sld;

pub use collective::{
    checked_tensor_dim, collective_qcf_brute, collective_qcf_factorized, site_trace, BRUTE_DIM_LIMIT,
};
pub use reports::{
    fit_loglog, infinitesimal_probe, lecam_finite_qcf, lecam_report, lecam_setup, local_theta, oh2_g,
    oh2_report, qclt_report, qllr_remainder, sandwich_qcf, sandwich_report, sandwiched_site_state,
    sphere_directions, tensor_power_ac, ConvergenceReport, InfinitesimalReport, LecamSetup, Oh2Point,
    Oh2Report, RatePolicy, Verdict, CENTERING_TOL, DEFAULT_DIRECTIONS, EXACT_TOL, G_ZERO_TOL,
    SAFE_SITE_RADIUS,
};
pub use sld::{
    fisher_j, j_from_slds, sld, sld_residual, sld_set, solve_sld, state_checked, state_derivative, SldSet,
    FD_STEP, FD_TOL, TRACE_TOL,
};
