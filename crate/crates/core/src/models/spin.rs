use std::fmt;
use std::sync::Arc;

use super::{check_theta, ParametricModel};
use crate::error::{Error, Result};
use crate::linalg::{c, re, CMat, HermitianOperator, PositiveOperator};

/// `rho_bar(theta)` for `theta in R^2`.
///
/// `exp(theta . sigma / 2) |0> = (cosh(r/2), sinh(r/2) (n1 + i n2))` with
/// `r = |theta|`, `n = theta / r`, so the state is that vector's projector
/// divided by `cosh r`.
pub fn spin_pure_state(theta: &[f64]) -> Result<PositiveOperator> {
    check_theta(theta, 2)?;
    let r = theta[0].hypot(theta[1]);
    let (n1, n2) = if r > 0.0 { (theta[0] / r, theta[1] / r) } else { (0.0, 0.0) };
    let norm = r.cosh();
    if !norm.is_finite() {
        return Err(Error::Overflow);
    }
    let v = [re((r / 2.0).cosh()), c(n1, n2) * (r / 2.0).sinh()];
    let m = CMat::from_fn(2, 2, |i, j| v[i] * v[j].conj() / norm);
    PositiveOperator::new(HermitianOperator::from_hermitian_unchecked(m))
}

/// `exp(-f) rho_bar(theta) + (1 - exp(-f)) diag(0, 1)`.
pub fn spin_perturbed_state(theta: &[f64], f: &FRule) -> Result<PositiveOperator> {
    let pure = spin_pure_state(theta)?;
    let w = (-f.eval(theta)).exp();
    let mut m = pure.matrix() * re(w);
    m[(1, 1)] += re(1.0 - w);
    PositiveOperator::new(HermitianOperator::from_hermitian_unchecked(m))
}

/// Weight function `f` of the perturbed model.
#[derive(Clone)]
pub enum FRule {
    /// `|theta|^4`, the default.
    Quartic,
    /// `|theta|^3`; not smooth at the origin.
    Cubic,
    /// `|theta|^2`; not `o(|theta|^2)`, kept as a negative control.
    Quadratic,
    Custom { name: String, f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> },
}

impl FRule {
    pub fn custom(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        FRule::Custom { name: name.into(), f: Arc::new(f) }
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        let r2: f64 = theta.iter().map(|t| t * t).sum();
        match self {
            FRule::Quartic => r2 * r2,
            FRule::Cubic => r2 * r2.sqrt(),
            FRule::Quadratic => r2,
            FRule::Custom { f, .. } => f(theta),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            FRule::Quartic => "quartic",
            FRule::Cubic => "cubic",
            FRule::Quadratic => "quadratic",
            FRule::Custom { name, .. } => name,
        }
    }
}

impl fmt::Debug for FRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FRule({})", self.label())
    }
}

/// The rank-one spin-1/2 model, base point `0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpinPure;

impl ParametricModel for SpinPure {
    fn name(&self) -> String {
        "spin-pure".into()
    }
    fn dim(&self) -> usize {
        2
    }
    fn theta_dim(&self) -> usize {
        2
    }
    fn theta0(&self) -> Vec<f64> {
        vec![0.0, 0.0]
    }
    fn state_at(&self, theta: &[f64]) -> Result<PositiveOperator> {
        spin_pure_state(theta)
    }
}

/// The perturbed spin-1/2 model, base point `0`.
#[derive(Debug, Clone)]
pub struct SpinPerturbed {
    pub f: FRule,
}

impl SpinPerturbed {
    pub fn new(f: FRule) -> Self {
        Self { f }
    }
}

impl Default for SpinPerturbed {
    fn default() -> Self {
        Self::new(FRule::Quartic)
    }
}

impl ParametricModel for SpinPerturbed {
    fn name(&self) -> String {
        format!("spin-perturbed:{}", self.f.label())
    }
    fn dim(&self) -> usize {
        2
    }
    fn theta_dim(&self) -> usize {
        2
    }
    fn theta0(&self) -> Vec<f64> {
        vec![0.0, 0.0]
    }
    fn state_at(&self, theta: &[f64]) -> Result<PositiveOperator> {
        spin_perturbed_state(theta, &self.f)
    }
}

/// `(I + theta sigma_3) / 2` for scalar `|theta| <= 1`, base point `0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QubitFullRank;

impl ParametricModel for QubitFullRank {
    fn name(&self) -> String {
        "qubit-fullrank".into()
    }
    fn dim(&self) -> usize {
        2
    }
    fn theta_dim(&self) -> usize {
        1
    }
    fn theta0(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn state_at(&self, theta: &[f64]) -> Result<PositiveOperator> {
        check_theta(theta, 1)?;
        let t = theta[0];
        if t.abs() > 1.0 {
            return Err(Error::NotDensity(format!("theta = {t} lies outside [-1, 1]")));
        }
        PositiveOperator::new(HermitianOperator::from_real_diagonal(&[
            0.5 * (1.0 + t),
            0.5 * (1.0 - t),
        ]))
    }
}
