//! Congruences accumulated in double-double precision.
//!
//! `X^H A X` for a basis `X` nearly orthogonal to the range of `A` is a small
//! matrix obtained from `O(||A||)` products, so plain accumulation leaves it with
//! an absolute error of `eps ||A||`. Its eigenvalues decide absolute continuity
//! and get inverted downstream, so they need full relative accuracy.

use twofloat::TwoFloat;

use super::{c, CMat};

#[derive(Clone, Copy)]
struct Dd {
    re: TwoFloat,
    im: TwoFloat,
}

impl Dd {
    const ZERO: Dd = Dd { re: TwoFloat::from_f64(0.0), im: TwoFloat::from_f64(0.0) };

    fn mul_add(self, a: Dd, b: Dd) -> Dd {
        Dd { re: self.re + (a.re * b.re - a.im * b.im), im: self.im + (a.re * b.im + a.im * b.re) }
    }
}

fn lift(m: &CMat, conj: bool) -> Vec<Dd> {
    // Column-major, as nalgebra stores it.
    m.iter()
        .map(|z| Dd { re: TwoFloat::from(z.re), im: TwoFloat::from(if conj { -z.im } else { z.im }) })
        .collect()
}

/// `X^H A X` rounded once from double-double accumulation.
pub(crate) fn congruence(a: &CMat, x: &CMat) -> CMat {
    let (n, r) = (x.nrows(), x.ncols());
    let (ad, xd, xc) = (lift(a, false), lift(x, false), lift(x, true));
    // Y = A X, kept in double-double.
    let mut y = vec![Dd::ZERO; n * r];
    for j in 0..r {
        for l in 0..n {
            let xl = xd[l + j * n];
            for i in 0..n {
                y[i + j * n] = y[i + j * n].mul_add(ad[i + l * n], xl);
            }
        }
    }
    CMat::from_fn(r, r, |i, j| {
        let mut acc = Dd::ZERO;
        for l in 0..n {
            acc = acc.mul_add(xc[l + i * n], y[l + j * n]);
        }
        c(f64::from(acc.re), f64::from(acc.im))
    })
}
