use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, re, CMat, HermitianOperator, PositiveOperator, C64};

/// How the two operators of a random pair relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMode {
    /// Independent Haar-random eigenbases.
    Generic,
    /// Supports spanned by disjoint columns of one unitary.
    OrthogonalSupports,
    /// As `OrthogonalSupports`, with one support vector of sigma tilted towards
    /// rho so that `Tr rho sigma` is about `1e-9`.
    NearSingularOverlap,
    /// As `Generic`, with the smallest kept eigenvalue of each operator set to `1e-8`.
    NearRankDeficient,
}

/// Recipe for [`random_psd_pair`]. Both operators have unit trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomPsdPairSpec {
    pub dim: usize,
    pub rank_rho: usize,
    pub rank_sigma: usize,
    pub seed: u64,
    pub mode: PairMode,
}

impl RandomPsdPairSpec {
    pub fn generic(dim: usize, rank_rho: usize, rank_sigma: usize, seed: u64) -> Self {
        Self { dim, rank_rho, rank_sigma, seed, mode: PairMode::Generic }
    }

    pub fn with_mode(self, mode: PairMode) -> Self {
        Self { mode, ..self }
    }
}

/// Target overlap of [`PairMode::NearSingularOverlap`].
const NEAR_SINGULAR_OVERLAP: f64 = 1e-9;
/// Smallest kept eigenvalue in [`PairMode::NearRankDeficient`].
const NEAR_DEFICIENT_EIGENVALUE: f64 = 1e-8;

/// Deterministic pair `(rho, sigma)` with the requested ranks.
pub fn random_psd_pair(spec: &RandomPsdPairSpec) -> Result<(PositiveOperator, PositiveOperator)> {
    let RandomPsdPairSpec { dim, rank_rho, rank_sigma, seed, mode } = *spec;
    let invalid = || Error::InvalidRanks { rank_rho, rank_sigma, dim };
    if dim == 0 || rank_rho == 0 || rank_sigma == 0 || rank_rho > dim || rank_sigma > dim {
        return Err(invalid());
    }
    let disjoint = matches!(mode, PairMode::OrthogonalSupports | PairMode::NearSingularOverlap);
    if disjoint && rank_rho + rank_sigma > dim {
        return Err(invalid());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectrum = |rank: usize, rng: &mut ChaCha8Rng| {
        let mut v: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.1..1.0)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= total);
        v
    };
    let mut p = spectrum(rank_rho, &mut rng);
    let mut q = spectrum(rank_sigma, &mut rng);

    let (u_rho, u_sigma) = match mode {
        PairMode::Generic | PairMode::NearRankDeficient => {
            (random_unitary(dim, &mut rng), random_unitary(dim, &mut rng))
        }
        PairMode::OrthogonalSupports | PairMode::NearSingularOverlap => {
            let u = random_unitary(dim, &mut rng);
            let mut v = CMat::zeros(dim, dim);
            // sigma's support starts right after rho's.
            for k in 0..dim {
                v.set_column(k, &u.column((k + rank_rho) % dim));
            }
            if mode == PairMode::NearSingularOverlap {
                // Tilt sigma's leading vector towards rho's leading vector:
                // Tr rho sigma ~ p0 q0 sin^2(eps).
                let s = (NEAR_SINGULAR_OVERLAP / (p[0] * q[0])).sqrt();
                let cos = (1.0 - s * s).sqrt();
                let tilted = v.column(0) * re(cos) + u.column(0) * re(s);
                v.set_column(0, &tilted);
            }
            (u, v)
        }
    };
    if mode == PairMode::NearRankDeficient {
        for v in [&mut p, &mut q] {
            if let Some((last, rest)) = v.split_last_mut().filter(|(_, rest)| !rest.is_empty()) {
                // Pin the smallest eigenvalue and rescale the others to keep unit trace.
                let scale = (1.0 - NEAR_DEFICIENT_EIGENVALUE) / rest.iter().sum::<f64>();
                rest.iter_mut().for_each(|x| *x *= scale);
                *last = NEAR_DEFICIENT_EIGENVALUE;
            }
        }
    }
    let build = |u: &CMat, values: &[f64]| -> Result<PositiveOperator> {
        let cols = u.columns(0, values.len());
        let d = DVector::from_iterator(values.len(), values.iter().map(|&x| re(x)));
        let m = cols * CMat::from_diagonal(&d) * cols.adjoint();
        PositiveOperator::new(HermitianOperator::from_hermitian_unchecked(m))
    };
    Ok((build(&u_rho, &p)?, build(&u_sigma, &q)?))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix, with the phases
/// of `R`'s diagonal pushed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { re(1.0) };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    q
}

/// Uniformly distributed unit vector in `C^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v / re(n)
}

/// Random density operator of the given rank (eigenvalues uniform in `[0.1, 1)`, normalized).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<PositiveOperator> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRanks { rank_rho: rank, rank_sigma: rank, dim });
    }
    let u = random_unitary(dim, rng);
    let mut values: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = values.iter().sum();
    values.iter_mut().for_each(|x| *x /= total);
    let cols = u.columns(0, rank);
    let d = DVector::from_iterator(rank, values.iter().map(|&x| re(x)));
    PositiveOperator::new(HermitianOperator::from_hermitian_unchecked(
        cols * CMat::from_diagonal(&d) * cols.adjoint(),
    ))
}

/// `(|psi><psi|, |xi><xi|)` for unit vectors.
pub fn pure_pair(psi: &[C64], xi: &[C64]) -> Result<(PositiveOperator, PositiveOperator)> {
    if psi.len() != xi.len() {
        return Err(Error::DimensionMismatch { expected: psi.len(), got: xi.len() });
    }
    Ok((projector(psi)?, projector(xi)?))
}

fn projector(v: &[C64]) -> Result<PositiveOperator> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnit { norm });
    }
    let n = v.len();
    PositiveOperator::new(HermitianOperator::from_hermitian_unchecked(CMat::from_fn(n, n, |i, j| {
        v[i] * v[j].conj()
    })))
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    c(a, b) * std::f64::consts::FRAC_1_SQRT_2
}
