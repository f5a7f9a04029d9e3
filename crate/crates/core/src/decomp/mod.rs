//! Quantum measure theory on positive operators.
//!
//! `rho << sigma` (absolute continuity) holds when the compression of `sigma`
//! to `supp rho` is strictly positive; `rho _|_ sigma` (singularity) when
//! `Tr rho sigma = 0`. Every positive `sigma` splits uniquely as
//! `sigma = sigma_ac + sigma_sing` with `sigma_ac << rho` and `sigma_sing _|_ rho`;
//! [`lebesgue_decompose`] builds it from block formulas and
//! [`lebesgue_decompose_direct`] from a closed-form witness, so the two routes
//! can check each other.

mod criteria;
mod lebesgue;
mod qllr;

pub use criteria::{
    is_absolutely_continuous, is_mutually_ac, is_singular, AbsoluteContinuityReport,
    MutualReport, SingularityReport, SINGULAR_TOL,
};
pub use lebesgue::{
    lebesgue_decompose, lebesgue_decompose_direct, support_split, LebesgueDecomposition, Route,
    SupportSplit,
};
pub use qllr::{ac_ball_radius, qllr, QllrVersion, GAMMA_IDENTITY};
