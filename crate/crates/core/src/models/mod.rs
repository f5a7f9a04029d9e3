//! Built-in parametric models and seeded random instances.
//!
//! The two-parameter spin-1/2 family
//! `rho_bar(theta) = exp((theta . sigma - psi)/2) |0><0| exp((theta . sigma - psi)/2)`,
//! `psi = log cosh |theta|`, is rank one everywhere. Mixing in `diag(0, 1)` with
//! weight `1 - exp(-f(theta))` gives the perturbed family, full rank off the origin,
//! whose singular part with respect to `rho(0)` is exactly the added mixture.

mod random;
mod spin;
mod tabulated;

pub use random::{
    pure_pair, random_density, random_psd_pair, random_unit_vector, random_unitary, PairMode,
    RandomPsdPairSpec,
};
pub use spin::{spin_perturbed_state, spin_pure_state, FRule, QubitFullRank, SpinPerturbed, SpinPure};
pub use tabulated::{TabulatedJson, TabulatedModel, TabulatedPoint};

use crate::error::{Error, Result};
use crate::linalg::PositiveOperator;

/// A smooth family `theta -> rho(theta)` of density operators on a fixed `C^dim`.
pub trait ParametricModel: Send + Sync {
    fn name(&self) -> String;
    /// Hilbert-space dimension.
    fn dim(&self) -> usize;
    /// Number of real parameters.
    fn theta_dim(&self) -> usize;
    /// Base point `theta_0`.
    fn theta0(&self) -> Vec<f64>;
    fn state_at(&self, theta: &[f64]) -> Result<PositiveOperator>;

    /// `rho(theta_0)`.
    fn base_state(&self) -> Result<PositiveOperator> {
        self.state_at(&self.theta0())
    }
}

/// Names accepted by [`model_by_name`].
pub const MODEL_NAMES: [&str; 5] = [
    "spin-pure",
    "spin-perturbed:quartic",
    "spin-perturbed:cubic",
    "spin-perturbed:quadratic",
    "qubit-fullrank",
];

/// Resolves a built-in model. `spin-perturbed` alone means the quartic rule.
pub fn model_by_name(name: &str) -> Result<Box<dyn ParametricModel>> {
    let model: Box<dyn ParametricModel> = match name {
        "spin-pure" => Box::new(SpinPure),
        "spin-perturbed" | "spin-perturbed:quartic" => Box::new(SpinPerturbed::new(FRule::Quartic)),
        "spin-perturbed:cubic" => Box::new(SpinPerturbed::new(FRule::Cubic)),
        "spin-perturbed:quadratic" => Box::new(SpinPerturbed::new(FRule::Quadratic)),
        "qubit-fullrank" => Box::new(QubitFullRank),
        other => return Err(Error::UnknownModel(other.to_string())),
    };
    Ok(model)
}

pub(crate) fn check_theta(theta: &[f64], expected: usize) -> Result<()> {
    if theta.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: theta.len() });
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("parameter has a non-finite component".into()));
    }
    Ok(())
}
