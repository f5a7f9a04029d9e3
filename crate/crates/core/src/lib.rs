//! Quantum Lebesgue decomposition of positive operators, quantum log-likelihood
//! ratios, and a numerical harness for quantum local asymptotic normality.
//!
//! Module map:
//!
//! - [`linalg`]: spectral primitives (eigendecomposition, matrix functions,
//!   generalized inverse, geometric mean, supports, excision).
//! - [`decomp`]: singularity / absolute-continuity tests, the Lebesgue
//!   decomposition by a block route and a closed-form route, log-likelihood ratios.
//! - [`gaussian`]: characteristic and quasi-characteristic functions of quantum
//!   Gaussian states.
//! - [`qlan`]: SLDs, the matrix `J`, collective observables on tensor powers
//!   and convergence reports.
//! - [`models`]: built-in parametric models and seeded random instances.
//! - [`io`]: JSON schemas shared with the command line front end.

pub mod decomp;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod models;
pub mod qlan;

pub use error::{Error, Result};
pub use linalg::{CMat, ComplexMatrix, HermitianOperator, PositiveOperator, C64};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
