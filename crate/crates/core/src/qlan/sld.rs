use crate::error::{Error, Result};
use crate::linalg::{c, eig_hermitian, max_abs, re, trace_product, CMat, HermitianOperator, PositiveOperator};
use crate::models::ParametricModel;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Tolerance on SLD identities and on derivative weight outside `supp rho`.
pub const FD_TOL: f64 = 1e-7;
/// Largest tolerated gap between the two Richardson levels, relative to `max(1, ||D||_max)`.
const FD_UNSTABLE_TOL: f64 = 1e-6;
/// Trace tolerance for model states.
pub const TRACE_TOL: f64 = 1e-10;

/// SLDs `L_1..L_d` at `theta_0` and the matrix `J_ij = Tr rho_0 L_j L_i`.
#[derive(Debug, Clone)]
pub struct SldSet {
    pub l_ops: Vec<HermitianOperator>,
    pub j_matrix: CMat,
    pub rho0: PositiveOperator,
    /// Finite-difference derivatives `d rho / d theta^i` at `theta_0`.
    pub derivatives: Vec<HermitianOperator>,
    /// Non-fatal findings, e.g. `Re J` not positive definite.
    pub warnings: Vec<String>,
}

impl SldSet {
    /// `max_i ||(rho_0 L_i + L_i rho_0)/2 - d_i rho||_max`.
    pub fn max_residual(&self) -> f64 {
        self.l_ops
            .iter()
            .zip(&self.derivatives)
            .map(|(l, d)| sld_residual(&self.rho0, l, d))
            .fold(0.0, f64::max)
    }

    /// `max_i |Tr rho_0 L_i|`.
    pub fn max_centering(&self) -> f64 {
        self.l_ops
            .iter()
            .map(|l| trace_product(self.rho0.matrix(), l.matrix()).norm())
            .fold(0.0, f64::max)
    }
}

/// `rho(theta)` checked to be a density operator.
pub fn state_checked(model: &dyn ParametricModel, theta: &[f64]) -> Result<PositiveOperator> {
    let state = model.state_at(theta)?;
    if state.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: state.dim() });
    }
    let tr = state.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotDensity(format!("trace {tr} at theta = {theta:?}")));
    }
    Ok(state)
}

/// `d rho / d theta^i` at `theta_0` by central differences with one Richardson level.
pub fn state_derivative(model: &dyn ParametricModel, direction: usize) -> Result<HermitianOperator> {
    let d = model.theta_dim();
    if direction >= d {
        return Err(Error::DimensionMismatch { expected: d, got: direction + 1 });
    }
    let theta0 = model.theta0();
    let central = |step: f64| -> Result<CMat> {
        let mut plus = theta0.clone();
        let mut minus = theta0.clone();
        plus[direction] += step;
        minus[direction] -= step;
        let hi = state_checked(model, &plus)?;
        let lo = state_checked(model, &minus)?;
        Ok((hi.matrix() - lo.matrix()) * re(0.5 / step))
    };
    let coarse = central(FD_STEP)?;
    let fine = central(FD_STEP / 2.0)?;
    let extrapolated = (&fine * re(4.0) - &coarse) * re(1.0 / 3.0);
    let discrepancy = max_abs(&(&fine - &coarse));
    if !(discrepancy <= FD_UNSTABLE_TOL * max_abs(&extrapolated).max(1.0)) {
        return Err(Error::NumericalDerivativeUnstable { discrepancy });
    }
    HermitianOperator::new(crate::linalg::hermitian_part(&extrapolated))
}

/// Solves `(rho L + L rho)/2 = d` in the eigenbasis of `rho`.
///
/// Entries whose eigenvalue pair sums to at most `rank_tol` must carry
/// derivative weight at most [`FD_TOL`]; they are set to zero.
pub fn solve_sld(rho: &PositiveOperator, derivative: &HermitianOperator) -> Result<HermitianOperator> {
    if derivative.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: derivative.dim() });
    }
    let spec = rho.spectrum();
    let u = &spec.eigenvectors;
    let lam = &spec.eigenvalues;
    let tol = rho.rank_tol();
    let dd = u.adjoint() * derivative.matrix() * u;
    let n = rho.dim();
    let mut l = CMat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let sum = lam[a] + lam[b];
            if sum > tol {
                l[(a, b)] = dd[(a, b)] * (2.0 / sum);
            } else if dd[(a, b)].norm() > FD_TOL {
                return Err(Error::DerivativeLeavesSupport { row: a, col: b, magnitude: dd[(a, b)].norm() });
            }
        }
    }
    HermitianOperator::new(crate::linalg::hermitian_part(&(u * l * u.adjoint())))
}

/// SLD of `model` at `theta_0` in direction `direction`.
pub fn sld(model: &dyn ParametricModel, direction: usize) -> Result<HermitianOperator> {
    let rho0 = state_checked(model, &model.theta0())?;
    solve_sld(&rho0, &state_derivative(model, direction)?)
}

/// `J_ij = Tr rho L_j L_i`.
pub fn j_from_slds(rho: &PositiveOperator, l_ops: &[HermitianOperator]) -> CMat {
    let d = l_ops.len();
    CMat::from_fn(d, d, |i, j| {
        trace_product(&(rho.matrix() * l_ops[j].matrix()), l_ops[i].matrix())
    })
}

/// All SLDs at `theta_0` together with `J`.
pub fn sld_set(model: &dyn ParametricModel) -> Result<SldSet> {
    let rho0 = state_checked(model, &model.theta0())?;
    let derivatives = (0..model.theta_dim())
        .map(|i| state_derivative(model, i))
        .collect::<Result<Vec<_>>>()?;
    let l_ops = derivatives.iter().map(|d| solve_sld(&rho0, d)).collect::<Result<Vec<_>>>()?;
    let j_matrix = j_from_slds(&rho0, &l_ops);
    let mut warnings = Vec::new();
    if !re_part_positive_definite(&j_matrix)? {
        warnings.push("Re J is not positive definite; the model is not q-LAN at theta_0".into());
    }
    Ok(SldSet { l_ops, j_matrix, rho0, derivatives, warnings })
}

/// `J_ij = Tr rho_0 L_j L_i` at `theta_0`.
pub fn fisher_j(model: &dyn ParametricModel) -> Result<CMat> {
    Ok(sld_set(model)?.j_matrix)
}

/// `||(rho L + L rho)/2 - d||_max`.
pub fn sld_residual(rho: &PositiveOperator, l: &HermitianOperator, derivative: &HermitianOperator) -> f64 {
    let r = rho.matrix();
    let sym = (r * l.matrix() + l.matrix() * r) * re(0.5);
    max_abs(&(sym - derivative.matrix()))
}

fn re_part_positive_definite(j: &CMat) -> Result<bool> {
    if j.nrows() == 0 {
        return Ok(false);
    }
    let v = HermitianOperator::new(j.map(|z| c(z.re, 0.0)))?;
    let spec = eig_hermitian(&v)?;
    let scale = spec.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    Ok(spec.eigenvalues.iter().all(|&x| x > 1e-12 * scale.max(1.0)))
}
