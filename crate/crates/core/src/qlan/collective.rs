use crate::error::{Error, Result};
use crate::gaussian::QcfQuery;
use crate::linalg::{
    c, embed_site, exp_i_hermitian, expm, tensor_power, trace_product, CMat, ComplexMatrix,
    HermitianOperator, PositiveOperator, C64,
};

/// Largest `dim^n` accepted by [`collective_qcf_brute`].
pub const BRUTE_DIM_LIMIT: usize = 4096;

/// `Tr site_state prod_t exp(i xi_t^i A_i / sqrt(n))`, the per-site factor.
pub fn site_trace(
    site_state: &CMat,
    site_ops: &[HermitianOperator],
    query: &QcfQuery,
    n: u64,
) -> Result<C64> {
    check_inputs(site_state.nrows(), site_ops, query)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let d = site_state.nrows();
    let mut product = CMat::identity(d, d);
    for xi in query.xis() {
        product *= exp_combination(site_ops, xi, scale)?;
    }
    Ok(trace_product(site_state, &product))
}

/// `(Tr site_state prod_t exp(i xi_t^i A_i / sqrt(n)))^n`.
///
/// Exact: the collective exponential of `(1/sqrt(n)) sum_k A_i^{(k)}` factorizes
/// into a tensor power because terms acting on distinct sites commute. The power
/// is an integer power, so no logarithm branch is involved.
pub fn collective_qcf_factorized(
    site_state: &PositiveOperator,
    site_ops: &[HermitianOperator],
    query: &QcfQuery,
    n: u64,
) -> Result<C64> {
    let z = site_trace(site_state.matrix(), site_ops, query, n)?;
    Ok(int_pow(z, n))
}

/// Brute-force oracle: `Tr rho^{(x)n} prod_t exp(i xi_t^i X_i^{(n)})` with
/// `X_i^{(n)} = n^{-1/2} sum_k I (x) .. (x) A_i (x) .. (x) I` built explicitly.
pub fn collective_qcf_brute(
    site_state: &PositiveOperator,
    site_ops: &[HermitianOperator],
    query: &QcfQuery,
    n: usize,
) -> Result<C64> {
    let d = site_state.dim();
    check_inputs(d, site_ops, query)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let total = checked_tensor_dim(d, n)?;
    let scale = 1.0 / (n as f64).sqrt();
    let collective: Vec<HermitianOperator> = site_ops
        .iter()
        .map(|a| {
            let mut sum = CMat::zeros(total, total);
            for k in 0..n {
                sum += embed_site(a.matrix(), k, n);
            }
            HermitianOperator::new(sum * c(scale, 0.0))
        })
        .collect::<Result<_>>()?;
    let mut product = CMat::identity(total, total);
    for xi in query.xis() {
        product *= exp_combination(&collective, xi, 1.0)?;
    }
    Ok(trace_product(&tensor_power(site_state.matrix(), n), &product))
}

/// `d^n`, rejected above [`BRUTE_DIM_LIMIT`].
pub fn checked_tensor_dim(d: usize, n: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.saturating_mul(d);
        if total > BRUTE_DIM_LIMIT {
            return Err(Error::DimensionTooLarge { dim: total, limit: BRUTE_DIM_LIMIT });
        }
    }
    Ok(total)
}

/// `exp(i scale sum_i xi^i A_i)`; unitary when `xi` is real.
fn exp_combination(ops: &[HermitianOperator], xi: &[C64], scale: f64) -> Result<CMat> {
    let d = ops[0].dim();
    if xi.iter().all(|z| z.im == 0.0) {
        let mut h = CMat::zeros(d, d);
        for (a, x) in ops.iter().zip(xi) {
            h += a.matrix() * c(x.re, 0.0);
        }
        exp_i_hermitian(&HermitianOperator::new(h)?, scale)
    } else {
        let mut g = CMat::zeros(d, d);
        for (a, x) in ops.iter().zip(xi) {
            g += a.matrix() * (x * c(0.0, scale));
        }
        Ok(expm(&ComplexMatrix::from_matrix(g)?)?.into_matrix())
    }
}

fn check_inputs(d: usize, site_ops: &[HermitianOperator], query: &QcfQuery) -> Result<()> {
    if site_ops.is_empty() {
        return Err(Error::InvalidArgument("at least one site observable is required".into()));
    }
    if let Some(bad) = site_ops.iter().find(|a| a.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: bad.dim() });
    }
    if query.dim() != site_ops.len() {
        return Err(Error::DimensionMismatch { expected: site_ops.len(), got: query.dim() });
    }
    Ok(())
}

/// `z^n` by binary exponentiation.
pub(crate) fn int_pow(z: C64, mut n: u64) -> C64 {
    let mut base = z;
    let mut acc = c(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}
