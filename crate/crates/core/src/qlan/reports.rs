use rayon::prelude::*;
use serde::Serialize;

use super::collective::{checked_tensor_dim, collective_qcf_factorized, int_pow, site_trace};
use super::sld::{sld_set, state_checked, SldSet};
use crate::decomp::{is_absolutely_continuous, qllr, AbsoluteContinuityReport};
use crate::error::{Error, Result};
use crate::gaussian::{lecam_limit_spec, qcf, GaussianSpec, QcfQuery};
use crate::linalg::{c, re, tensor_power, trace_product, CMat, HermitianOperator, PositiveOperator, C64};
use crate::models::ParametricModel;

/// Per-site traces must stay within this distance of 1 in the reports.
pub const SAFE_SITE_RADIUS: f64 = 0.3;
/// Centering tolerance `|Tr rho_0 B_i|`.
pub const CENTERING_TOL: f64 = 1e-10;
/// Errors (or deviations) at or below this level count as exact.
pub const EXACT_TOL: f64 = 1e-14;
/// `|g(h)|` at or below this level counts as `g = 0`.
pub const G_ZERO_TOL: f64 = 1e-9;
/// Default number of directions in [`oh2_report`].
pub const DEFAULT_DIRECTIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Declared pass band of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePolicy {
    /// Fitted log-log slope must not exceed this.
    pub max_rate: f64,
    /// Errors must decrease strictly from one n to the next.
    pub monotone: bool,
}

impl Default for RatePolicy {
    fn default() -> Self {
        Self { max_rate: -0.45, monotone: true }
    }
}

/// Errors of a finite-n functional against its limit, per copy count.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub study: String,
    #[serde(rename = "n")]
    pub n_values: Vec<u64>,
    pub errors: Vec<f64>,
    pub fitted_rate: Option<f64>,
    pub verdict: Verdict,
    pub policy: RatePolicy,
}

impl ConvergenceReport {
    /// Applies `policy`. All errors at or below [`EXACT_TOL`] pass with no rate.
    pub fn from_errors(study: &str, n_values: Vec<u64>, errors: Vec<f64>, policy: RatePolicy) -> Self {
        let exact = errors.iter().all(|&e| e <= EXACT_TOL);
        let fitted_rate = if exact {
            None
        } else {
            let xs: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
            fit_loglog(&xs, &errors)
        };
        let monotone = errors.windows(2).all(|w| w[1] < w[0]);
        let ok = exact
            || ((!policy.monotone || monotone) && fitted_rate.is_some_and(|r| r <= policy.max_rate));
        Self {
            study: study.to_string(),
            n_values,
            errors,
            fitted_rate,
            verdict: Verdict::from_bool(ok),
            policy,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Least-squares slope of `log y` against `log x` over the points with `y > 0`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn check_grid(n_grid: &[u64]) -> Result<()> {
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("n grid must be nonempty, positive and strictly increasing".into()));
    }
    Ok(())
}

fn check_queries(queries: &[QcfQuery]) -> Result<()> {
    if queries.is_empty() {
        return Err(Error::InvalidArgument("query grid is empty".into()));
    }
    Ok(())
}

/// `z^n` after checking `|z - 1| < SAFE_SITE_RADIUS`.
fn guarded_power(z: C64, n: u64) -> Result<C64> {
    let distance = (z - c(1.0, 0.0)).norm();
    if !(distance < SAFE_SITE_RADIUS) {
        return Err(Error::QueryOutOfSafeRange { value: z, distance, bound: SAFE_SITE_RADIUS });
    }
    Ok(int_pow(z, n))
}

fn guarded_collective(state: &CMat, ops: &[HermitianOperator], q: &QcfQuery, n: u64) -> Result<C64> {
    guarded_power(site_trace(state, ops, q, n)?, n)
}

/// Largest error over the query grid at each `n`, evaluated in parallel and
/// returned in grid order.
fn errors_over_grid(
    n_grid: &[u64],
    eval: impl Fn(u64) -> Result<f64> + Sync,
) -> Result<Vec<f64>> {
    n_grid.par_iter().map(|&n| eval(n)).collect()
}

/// Quantum CLT under `rho_0^{(x)n}`: collective SLD observables against `N(0, J)`.
pub fn qclt_report(
    model: &dyn ParametricModel,
    queries: &[QcfQuery],
    n_grid: &[u64],
) -> Result<ConvergenceReport> {
    check_grid(n_grid)?;
    check_queries(queries)?;
    let slds = sld_set(model)?;
    let spec = GaussianSpec::centered(slds.j_matrix.clone())?;
    let limits = queries.iter().map(|q| qcf(&spec, q)).collect::<Result<Vec<_>>>()?;
    let errors = errors_over_grid(n_grid, |n| {
        let mut worst = 0.0f64;
        for (q, limit) in queries.iter().zip(&limits) {
            let value = guarded_collective(slds.rho0.matrix(), &slds.l_ops, q, n)?;
            worst = worst.max((value - limit).norm());
        }
        Ok(worst)
    })?;
    Ok(ConvergenceReport::from_errors("qclt", n_grid.to_vec(), errors, RatePolicy::default()))
}

/// `theta_0 + h / sqrt(n)`.
pub fn local_theta(model: &dyn ParametricModel, h: &[f64], n: u64) -> Result<Vec<f64>> {
    let theta0 = model.theta0();
    if h.len() != theta0.len() {
        return Err(Error::DimensionMismatch { expected: theta0.len(), got: h.len() });
    }
    let s = 1.0 / (n as f64).sqrt();
    Ok(theta0.iter().zip(h).map(|(t, x)| t + x * s).collect())
}

/// `rho(theta_0 + h/sqrt(n))`, checked to dominate `rho_0`.
fn local_state(model: &dyn ParametricModel, rho0: &PositiveOperator, h: &[f64], n: u64) -> Result<PositiveOperator> {
    let theta = local_theta(model, h, n)?;
    let state = state_checked(model, &theta)?;
    if !is_absolutely_continuous(rho0, &state)?.absolutely_continuous {
        return Err(Error::SupportViolation { n: n as usize, theta });
    }
    Ok(state)
}

/// Ingredients of the Le Cam third lemma for observables `B`: the limit
/// `N((Re tau) h, Sigma)` with `Sigma_ij = Tr rho_0 B_j B_i`, `tau_ij = Tr rho_0 L_j B_i`.
#[derive(Debug, Clone)]
pub struct LecamSetup {
    pub slds: SldSet,
    pub b_ops: Vec<HermitianOperator>,
    pub sigma: CMat,
    pub tau: CMat,
    pub limit: GaussianSpec,
}

pub fn lecam_setup(model: &dyn ParametricModel, b_ops: &[HermitianOperator], h: &[f64]) -> Result<LecamSetup> {
    let slds = sld_set(model)?;
    if b_ops.is_empty() {
        return Err(Error::InvalidArgument("at least one observable B is required".into()));
    }
    let rho = slds.rho0.matrix();
    for (index, b) in b_ops.iter().enumerate() {
        if b.dim() != model.dim() {
            return Err(Error::DimensionMismatch { expected: model.dim(), got: b.dim() });
        }
        let mean = trace_product(rho, b.matrix());
        if mean.norm() > CENTERING_TOL {
            return Err(Error::NotCentered { index, value: mean.norm() });
        }
    }
    if h.len() != model.theta_dim() {
        return Err(Error::DimensionMismatch { expected: model.theta_dim(), got: h.len() });
    }
    let r = b_ops.len();
    let sigma = CMat::from_fn(r, r, |i, j| trace_product(&(rho * b_ops[j].matrix()), b_ops[i].matrix()));
    let tau = CMat::from_fn(r, slds.l_ops.len(), |i, j| {
        trace_product(&(rho * slds.l_ops[j].matrix()), b_ops[i].matrix())
    });
    let limit = lecam_limit_spec(&sigma, &tau, h)?;
    Ok(LecamSetup { slds, b_ops: b_ops.to_vec(), sigma, tau, limit })
}

/// `(Tr rho_{theta_0 + h/sqrt(n)} prod_t exp(i xi_t^i B_i / sqrt(n)))^n`.
pub fn lecam_finite_qcf(
    model: &dyn ParametricModel,
    b_ops: &[HermitianOperator],
    h: &[f64],
    query: &QcfQuery,
    n: u64,
) -> Result<C64> {
    let rho0 = state_checked(model, &model.theta0())?;
    let state = local_state(model, &rho0, h, n)?;
    guarded_collective(state.matrix(), b_ops, query, n)
}

/// Le Cam third lemma: collective `B` observables under the shifted states
/// `rho_{theta_0 + h/sqrt(n)}^{(x)n}` against `N((Re tau) h, Sigma)`.
pub fn lecam_report(
    model: &dyn ParametricModel,
    b_ops: &[HermitianOperator],
    h: &[f64],
    queries: &[QcfQuery],
    n_grid: &[u64],
) -> Result<ConvergenceReport> {
    check_grid(n_grid)?;
    check_queries(queries)?;
    let setup = lecam_setup(model, b_ops, h)?;
    let limits = queries.iter().map(|q| qcf(&setup.limit, q)).collect::<Result<Vec<_>>>()?;
    let errors = errors_over_grid(n_grid, |n| {
        let state = local_state(model, &setup.slds.rho0, h, n)?;
        let mut worst = 0.0f64;
        for (q, limit) in queries.iter().zip(&limits) {
            let value = guarded_collective(state.matrix(), b_ops, q, n)?;
            worst = worst.max((value - limit).norm());
        }
        Ok(worst)
    })?;
    Ok(ConvergenceReport::from_errors("lecam", n_grid.to_vec(), errors, RatePolicy::default()))
}

/// `exp(L_{h/sqrt(n)} / 2) rho_0 exp(L_{h/sqrt(n)} / 2)`, i.e. the part of
/// `rho_{theta_0 + h/sqrt(n)}` absolutely continuous with respect to `rho_0`.
pub fn sandwiched_site_state(model: &dyn ParametricModel, h: &[f64], n: u64) -> Result<CMat> {
    let rho0 = state_checked(model, &model.theta0())?;
    if h.iter().all(|&x| x == 0.0) {
        if h.len() != model.theta_dim() {
            return Err(Error::DimensionMismatch { expected: model.theta_dim(), got: h.len() });
        }
        return Ok(rho0.matrix().clone());
    }
    let state = local_state(model, &rho0, h, n)?;
    let w = qllr(&state, &rho0)?.witness;
    Ok(w.matrix() * rho0.matrix() * w.matrix())
}

/// `(Tr e^{L/2} rho_0 e^{L/2} prod_t exp(i xi_t^i B_i / sqrt(n)))^n` with `L = L_{h/sqrt(n)}`.
pub fn sandwich_qcf(
    model: &dyn ParametricModel,
    b_ops: &[HermitianOperator],
    h: &[f64],
    query: &QcfQuery,
    n: u64,
) -> Result<C64> {
    let site = sandwiched_site_state(model, h, n)?;
    guarded_collective(&site, b_ops, query, n)
}

/// Gap between [`sandwich_qcf`] and [`lecam_finite_qcf`] over a grid.
pub fn sandwich_report(
    model: &dyn ParametricModel,
    b_ops: &[HermitianOperator],
    h: &[f64],
    queries: &[QcfQuery],
    n_grid: &[u64],
) -> Result<ConvergenceReport> {
    check_grid(n_grid)?;
    check_queries(queries)?;
    let rho0 = state_checked(model, &model.theta0())?;
    let errors = errors_over_grid(n_grid, |n| {
        let shifted = local_state(model, &rho0, h, n)?;
        let site = sandwiched_site_state(model, h, n)?;
        let mut worst = 0.0f64;
        for q in queries {
            let a = guarded_collective(&site, b_ops, q, n)?;
            let b = guarded_collective(shifted.matrix(), b_ops, q, n)?;
            worst = worst.max((a - b).norm());
        }
        Ok(worst)
    })?;
    Ok(ConvergenceReport::from_errors("sandwich", n_grid.to_vec(), errors, RatePolicy::default()))
}

/// One evaluation of `g(h) = (1 - Tr rho_0 e^{L_h}) / ||h||^2`.
#[derive(Debug, Clone, Serialize)]
pub struct Oh2Point {
    pub h: Vec<f64>,
    pub radius: f64,
    pub g: f64,
}

/// Table of `g(h)` and the verdict on `Tr rho_0 e^{L_h} = 1 - o(||h||^2)`.
#[derive(Debug, Clone, Serialize)]
pub struct Oh2Report {
    pub radii: Vec<f64>,
    pub table: Vec<Oh2Point>,
    /// `max |g|` over directions, per radius.
    pub g_max: Vec<f64>,
    /// Slope of `log g_max` against `log radius`.
    pub fitted_slope: Option<f64>,
    pub min_slope: f64,
    pub verdict: Verdict,
}

impl Oh2Report {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// `count` deterministic unit directions spread over the sphere in `R^d`.
pub fn sphere_directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::PI;
    match d {
        0 => Vec::new(),
        1 => (0..count).map(|k| vec![if k % 2 == 0 { 1.0 } else { -1.0 }]).collect(),
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci lattice on S^2 for the first three coordinates, then
            // rotate the remaining axes in so every coordinate gets covered.
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    let mut v = vec![0.0; d];
                    let base = [r * a.cos(), r * a.sin(), z];
                    for (j, x) in base.iter().enumerate() {
                        v[(j + 3 * (k / 3)) % d] += x;
                    }
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.iter().map(|x| x / norm).collect()
                })
                .collect()
        }
    }
}

/// `g(h) = (1 - Tr rho_0 e^{L_h}) / ||h||^2` with `L_h = L(rho_{theta_0 + h} | rho_0)`.
pub fn oh2_g(model: &dyn ParametricModel, rho0: &PositiveOperator, h: &[f64]) -> Result<f64> {
    let theta: Vec<f64> = model.theta0().iter().zip(h).map(|(t, x)| t + x).collect();
    let state = state_checked(model, &theta)?;
    let w = qllr(&state, rho0)?.witness;
    let mass = trace_product(rho0.matrix(), &(w.matrix() * w.matrix())).re;
    let r2: f64 = h.iter().map(|x| x * x).sum();
    Ok((1.0 - mass) / r2)
}

/// Samples `g` at every radius along `directions` evenly spread directions.
///
/// Passes when `g` vanishes identically (within [`G_ZERO_TOL`]) or when the
/// slope of `log max|g|` against `log ||h||` is at least `0.5`.
pub fn oh2_report(model: &dyn ParametricModel, radii: &[f64], directions: usize) -> Result<Oh2Report> {
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) || directions == 0 {
        return Err(Error::InvalidArgument("radii must be positive and directions nonzero".into()));
    }
    let rho0 = state_checked(model, &model.theta0())?;
    let dirs = sphere_directions(model.theta_dim(), directions);
    let points: Vec<(f64, Vec<f64>)> = radii
        .iter()
        .flat_map(|&r| dirs.iter().map(move |u| (r, u.iter().map(|x| x * r).collect())))
        .collect();
    let table = points
        .par_iter()
        .map(|(radius, h)| Ok(Oh2Point { h: h.clone(), radius: *radius, g: oh2_g(model, &rho0, h)? }))
        .collect::<Result<Vec<_>>>()?;
    let g_max: Vec<f64> = radii
        .iter()
        .map(|&r| {
            table.iter().filter(|p| p.radius == r).map(|p| p.g.abs()).fold(0.0, f64::max)
        })
        .collect();
    let min_slope = 0.5;
    let vanishing = g_max.iter().all(|&g| g <= G_ZERO_TOL);
    let fitted_slope = if vanishing { None } else { fit_loglog(radii, &g_max) };
    let ok = vanishing || fitted_slope.is_some_and(|s| s >= min_slope);
    Ok(Oh2Report {
        radii: radii.to_vec(),
        table,
        g_max,
        fitted_slope,
        min_slope,
        verdict: Verdict::from_bool(ok),
    })
}

/// Deviation of the joint quasi-characteristic function of `(X^{(n)}, R^{(n)})`,
/// `R^{(n)} = n^{-1/2} sum_k P(n)^{(k)}`, from its `eta = 0` value.
#[derive(Debug, Clone, Serialize)]
pub struct InfinitesimalReport {
    #[serde(rename = "n")]
    pub n_values: Vec<u64>,
    /// `max |QCF_n(xi, eta) - QCF_n(xi, 0)|` over the sampled grid.
    pub deviations: Vec<f64>,
    /// `max_xi |QCF_n(xi, 0) - qcf(N(0, J_B), xi)|`, the plain CLT error for reference.
    pub limit_errors: Vec<f64>,
    pub fitted_rate: Option<f64>,
    pub verdict: Verdict,
    pub policy: RatePolicy,
}

/// Sampled infinitesimality check. Each `eta` multiplies `R^{(n)}` in every
/// factor of the ordered product:
/// `Tr rho_0^{(x)n} prod_t exp(i (xi_t^i X_i^{(n)} + eta R^{(n)}))`.
pub fn infinitesimal_probe(
    remainder: &(dyn Fn(u64) -> Result<HermitianOperator> + Sync),
    model: &dyn ParametricModel,
    b_ops: &[HermitianOperator],
    queries: &[QcfQuery],
    etas: &[f64],
    n_grid: &[u64],
) -> Result<InfinitesimalReport> {
    check_grid(n_grid)?;
    check_queries(queries)?;
    if queries.iter().any(|q| !q.is_real()) {
        return Err(Error::InvalidArgument("infinitesimal probes use real queries".into()));
    }
    let rho0 = state_checked(model, &model.theta0())?;
    let rho = rho0.matrix();
    let r = b_ops.len();
    let sigma = CMat::from_fn(r, r, |i, j| trace_product(&(rho * b_ops[j].matrix()), b_ops[i].matrix()));
    let spec = GaussianSpec::centered(sigma)?;
    let rows = n_grid
        .par_iter()
        .map(|&n| {
            let p = remainder(n)?;
            if p.dim() != model.dim() {
                return Err(Error::DimensionMismatch { expected: model.dim(), got: p.dim() });
            }
            let mut ops = b_ops.to_vec();
            ops.push(p);
            let mut deviation = 0.0f64;
            let mut limit_error = 0.0f64;
            for q in queries {
                let base = collective_qcf_factorized(&rho0, b_ops, q, n)?;
                limit_error = limit_error.max((base - qcf(&spec, q)?).norm());
                for &eta in etas {
                    let joint = QcfQuery::new(
                        q.xis().iter().map(|xi| xi.iter().copied().chain([c(eta, 0.0)]).collect()).collect(),
                    )?;
                    let value = collective_qcf_factorized(&rho0, &ops, &joint, n)?;
                    deviation = deviation.max((value - base).norm());
                }
            }
            Ok((deviation, limit_error))
        })
        .collect::<Result<Vec<_>>>()?;
    let (deviations, limit_errors): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let base = ConvergenceReport::from_errors("infinitesimal", n_grid.to_vec(), deviations, RatePolicy::default());
    Ok(InfinitesimalReport {
        n_values: base.n_values,
        deviations: base.errors,
        limit_errors,
        fitted_rate: base.fitted_rate,
        verdict: base.verdict,
        policy: base.policy,
    })
}

/// The site remainder of the expansion `L_{h/sqrt(n)} = n^{-1/2} h^i L_i - (1/2n) h^T (Re J) h + B(h/sqrt(n))`:
/// `P(n) = sqrt(n) (B(h/sqrt(n)) + (1/2n) h^T (Re J) h I)`.
pub fn qllr_remainder(model: &dyn ParametricModel, slds: &SldSet, h: &[f64], n: u64) -> Result<HermitianOperator> {
    let theta = local_theta(model, h, n)?;
    let state = state_checked(model, &theta)?;
    let l = qllr(&state, &slds.rho0)?.l_matrix;
    let s = 1.0 / (n as f64).sqrt();
    let mut linear = CMat::zeros(model.dim(), model.dim());
    for (hi, li) in h.iter().zip(&slds.l_ops) {
        linear += li.matrix() * re(hi * s);
    }
    let quad: f64 = (0..h.len())
        .flat_map(|i| (0..h.len()).map(move |j| (i, j)))
        .map(|(i, j)| slds.j_matrix[(i, j)].re * h[i] * h[j])
        .sum();
    let shift = CMat::identity(model.dim(), model.dim()) * re(quad / (2.0 * n as f64));
    let remainder = l.matrix() - linear + shift;
    HermitianOperator::new(remainder * re((n as f64).sqrt()))
}

/// `rho_0^{(x)n} << rho_theta^{(x)n}`, checked on the explicit tensor powers.
pub fn tensor_power_ac(model: &dyn ParametricModel, theta: &[f64], n: usize) -> Result<AbsoluteContinuityReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    checked_tensor_dim(model.dim(), n)?;
    let rho0 = state_checked(model, &model.theta0())?;
    let state = state_checked(model, theta)?;
    let lift = |p: &PositiveOperator| {
        PositiveOperator::with_cutoff(HermitianOperator::new(tensor_power(p.matrix(), n))?, p.cutoff())
    };
    is_absolutely_continuous(&lift(&rho0)?, &lift(&state)?)
}
