//! Parameter sets shared by the benchmarks.

use deuteron_core::observables::{normalized_params, reference_params};
use deuteron_core::{ModelParams, Shape};

/// Reference equal-range configuration.
pub fn equal_range() -> ModelParams {
    reference_params()
}

/// Unequal ranges `(1.0, 2.0)` fm at the reference α and ratio.
pub fn unequal_range() -> ModelParams {
    normalized_params(
        &Shape {
            b1: 1.0,
            b2: 2.0,
            alpha: 0.23165,
        },
        3.0,
    )
    .expect("valid shape")
}
