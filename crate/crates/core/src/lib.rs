//! Separable-potential model of the deuteron with spherical Bessel form
//! factors `g_C(k) = j0(b1 k) j0(b2 k)` (S state) and
//! `g_T(k) = j1(b1 k) j1(b2 k)` (D state).
//!
//! The crate evaluates the momentum- and coordinate-space wavefunctions,
//! checks the piecewise analytic coordinate-space forms against a numerical
//! Fourier–Bessel transform, and computes the static observables
//! (probabilities, asymptotic normalizations, D/S ratio, rms radius and
//! quadrupole moment), including a two-parameter fit of the range and the
//! D/S normalization ratio.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Oracle constants keep the digits of their high-precision source.
#![allow(clippy::excessive_precision)]

pub mod compensated;
pub mod coordinate;
pub mod fitting;
pub mod model;
pub mod momentum;
pub mod observables;
pub mod quadrature;
pub mod specfun;
pub mod transform;
pub mod validation;

pub use coordinate::{u_coordinate, w_coordinate, RadialSample};
pub use fitting::{fit_parameters, FitOptions, FitResult, FitTargets};
pub use model::{region_of, ModelParams, ParamsError, PotentialStrengths, Region};
pub use momentum::{u_momentum, w_momentum};
pub use observables::{report, solve_normalisation, ObservablesError, ObservablesReport, Shape};
pub use validation::{validate, Branches, Tolerances, ValidationReport};
