#![allow(dead_code)]

use qleb::linalg::{c, hermitian_part, max_abs, CMat, HermitianOperator, PositiveOperator, C64};
use rand::Rng;

pub fn mat(rows: usize, entries: &[(f64, f64)]) -> CMat {
    let v: Vec<C64> = entries.iter().map(|&(a, b)| c(a, b)).collect();
    CMat::from_row_slice(rows, entries.len() / rows, &v)
}

pub fn real(rows: usize, entries: &[f64]) -> CMat {
    let v: Vec<C64> = entries.iter().map(|&a| c(a, 0.0)).collect();
    CMat::from_row_slice(rows, entries.len() / rows, &v)
}

pub fn diag(values: &[f64]) -> PositiveOperator {
    PositiveOperator::from_real_diagonal(values).unwrap()
}

pub fn psd(m: CMat) -> PositiveOperator {
    PositiveOperator::from_matrix(m).unwrap()
}

pub fn herm(m: CMat) -> HermitianOperator {
    HermitianOperator::new(m).unwrap()
}

pub fn plus_state() -> PositiveOperator {
    psd(real(2, &[0.5, 0.5, 0.5, 0.5]))
}

pub fn sigma_x() -> HermitianOperator {
    herm(real(2, &[0.0, 1.0, 1.0, 0.0]))
}

pub fn sigma_y() -> HermitianOperator {
    herm(mat(2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)]))
}

pub fn sigma_z() -> HermitianOperator {
    herm(real(2, &[1.0, 0.0, 0.0, -1.0]))
}

/// `[[1, -i], [i, 1]]`.
pub fn spin_j() -> CMat {
    mat(2, &[(1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0)])
}

pub fn dist(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> HermitianOperator {
    let g = CMat::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    herm(hermitian_part(&g))
}

pub fn random_complex<R: Rng>(d: usize, rng: &mut R) -> CMat {
    CMat::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `a b c - d` evaluated in double-double arithmetic and rounded once.
///
/// A dense triple product with a large middle factor loses about
/// `eps ||a|| ||b|| ||c||` to rounding, which can swamp the quantity being checked.
pub fn triple_product_residual(a: &CMat, b: &CMat, c3: &CMat, d: &CMat) -> CMat {
    use twofloat::TwoFloat;
    type Dd = (TwoFloat, TwoFloat);
    let lift = |m: &CMat| -> Vec<Vec<Dd>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| (TwoFloat::from(m[(i, j)].re), TwoFloat::from(m[(i, j)].im))).collect())
            .collect()
    };
    let mul = |x: &[Vec<Dd>], y: &[Vec<Dd>]| -> Vec<Vec<Dd>> {
        let (n, k, m) = (x.len(), y.len(), y[0].len());
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mut acc = (TwoFloat::from(0.0), TwoFloat::from(0.0));
                        for l in 0..k {
                            let (p, q) = (x[i][l], y[l][j]);
                            acc.0 += p.0 * q.0 - p.1 * q.1;
                            acc.1 += p.0 * q.1 + p.1 * q.0;
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    let prod = mul(&mul(&lift(a), &lift(b)), &lift(c3));
    CMat::from_fn(d.nrows(), d.ncols(), |i, j| {
        let (re, im) = prod[i][j];
        c(f64::from(re - TwoFloat::from(d[(i, j)].re)), f64::from(im - TwoFloat::from(d[(i, j)].im)))
    })
}
