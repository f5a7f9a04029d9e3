//! Fixtures shared by the benchmarks in `benches/`.

use qleb::models::{model_by_name, random_psd_pair, RandomPsdPairSpec};
use qleb::qlan::{sld_set, SldSet};
use qleb::PositiveOperator;

/// Seeded `(rho, sigma)` of dimension `dim` with ranks `dim/2` and `dim - 1`.
pub fn pair(dim: usize, seed: u64) -> (PositiveOperator, PositiveOperator) {
    let spec = RandomPsdPairSpec::generic(dim, (dim / 2).max(1), dim.saturating_sub(1).max(1), seed);
    random_psd_pair(&spec).expect("valid pair spec")
}

/// SLDs of a built-in model at its base point.
pub fn slds(model: &str) -> SldSet {
    sld_set(model_by_name(model).expect("built-in model").as_ref()).expect("regular model")
}
