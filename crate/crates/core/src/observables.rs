//! Static deuteron observables: S/D probabilities, normalization, asymptotic
//! normalizations, D/S ratio, rms radius and quadrupole moment.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compensated::compensated_sum;
use crate::coordinate::{u_coordinate, w_coordinate};
use crate::model::{ModelParams, ParamsError};
use crate::momentum::{u_momentum, w_momentum};
use crate::quadrature::{
    integrate_panels, QuadratureError, QuadratureScheme, Tail, DEFAULT_PANEL_ORDER,
};
use crate::specfun::{i0, i1};

/// `|P_S + P_D - 1|` above which a parameter set is flagged as not normalized.
pub const NORMALIZATION_WARNING: f64 = 1e-3;

/// Below this αb the S-probability bracket is summed as a power series.
pub const S_SERIES_THRESHOLD: f64 = 0.05;
/// Below this αb the D-probability bracket is summed as a power series.
pub const D_SERIES_THRESHOLD: f64 = 0.2;

/// Target bound on the discarded k-space tail of a probability integral,
/// for unit normalization.
const K_TAIL_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservablesError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("closed-form probabilities need equal ranges (b1 = {b1}, b2 = {b2})")]
    UnequalRanges { b1: f64, b2: f64 },
    #[error("normalization is degenerate: p_S + rho p_D = {0}")]
    Degenerate(f64),
    #[error("ratio rho = B^2/A^2 must be non-negative and finite (got {0})")]
    Ratio(f64),
    #[error("D/S ratio undefined: A_S = 0")]
    UndefinedRatio,
}

// Taylor coefficients of the S bracket, β⁴ .. β²⁶.
const S_SERIES: [f64; 23] = [
    8.0,
    -14.933333333333334,
    16.0,
    -12.596825396825396,
    8.0,
    -4.300529100529101,
    2.0148148148148146,
    -0.8389674523007856,
    0.31492063492063493,
    -0.1077177966066855,
    0.033862433862433865,
    -0.00985209264574344,
    0.0026684379700252715,
    -0.0006761859136586806,
    0.0001609991027980446,
    -3.615446032672833e-05,
    7.682852127296571e-06,
    -1.549485737390919e-06,
    2.9737633421082107e-07,
    -5.443962947570571e-08,
    9.526937429647926e-09,
    -1.5968963690487472e-09,
    2.5684348725396913e-10,
];

// Taylor coefficients of the D bracket, β⁹ .. β³⁶.
const D_SERIES: [f64; 28] = [
    2.878306878306878,
    0.0,
    -5.140933140933141,
    7.407407407407407,
    -6.402841602841603,
    4.148148148148148,
    -2.193549002437891,
    0.9904761904761905,
    -0.3927067710447729,
    0.1393376445228297,
    -0.044856758499689356,
    0.013240227928058616,
    -0.003612890472887233,
    0.000917506949252981,
    -0.00021805455180427905,
    4.87251240589613e-05,
    -1.0278107173980749e-05,
    2.0537918660130507e-06,
    -3.899495604644001e-07,
    7.054125909536229e-08,
    -1.2187339997552523e-08,
    2.0153383666825005e-09,
    -3.196044556429756e-10,
    4.869438181603409e-11,
    -7.1392853481943545e-12,
    1.0087673523622625e-12,
    -1.3755843423351673e-13,
    1.8125828130939848e-14,
];

fn power_series(coeffs: &[f64], first_power: i32, x: f64) -> f64 {
    // Horner on the coefficient list, then the common factor x^first_power
    let poly = coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    poly * x.powi(first_power)
}

/// `8β - 9 + 4e^{-2β}(2β + 3) - e^{-4β}(4β + 3)`.
pub fn s_bracket(beta: f64) -> f64 {
    if beta < S_SERIES_THRESHOLD {
        power_series(&S_SERIES, 4, beta)
    } else {
        s_bracket_terms(beta)
    }
}

fn s_bracket_terms(beta: f64) -> f64 {
    let e2 = (-2.0 * beta).exp();
    let e4 = e2 * e2;
    compensated_sum([
        8.0 * beta,
        -9.0,
        8.0 * beta * e2,
        12.0 * e2,
        -4.0 * beta * e4,
        -3.0 * e4,
    ])
}

/// The D-probability bracket. At αb ≈ 0.34 its terms are of order 10² while
/// the sum is ~2·10⁻⁴, so about six digits cancel; the terms are added with
/// compensated summation and the power series takes over below
/// [`D_SERIES_THRESHOLD`].
pub fn d_bracket(beta: f64) -> f64 {
    if beta < D_SERIES_THRESHOLD {
        power_series(&D_SERIES, 9, beta)
    } else {
        d_bracket_terms(beta)
    }
}

fn d_bracket_terms(beta: f64) -> f64 {
    let b = beta;
    let (b2, b3) = (b * b, b * b * b);
    let (b4, b5) = (b2 * b2, b2 * b3);
    let e2 = (-2.0 * b).exp();
    let e4 = e2 * e2;
    let q2 = (b + 1.0) * (b + 1.0);
    let q3 = q2 * (b + 1.0);
    compensated_sum([
        56.0 * b5,
        -135.0 * b4,
        -80.0 * b3,
        450.0 * b2,
        -315.0,
        -120.0 * q2 * b3 * e2,
        -180.0 * q2 * b2 * e2,
        420.0 * q2 * e2,
        -60.0 * q3 * b2 * e4,
        -105.0 * q3 * b * e4,
        -105.0 * q3 * e4,
    ])
}

/// Unit-normalization probability coefficients `(P_S/A², P_D/B²)` for equal
/// ranges, from the closed forms.
pub fn closed_coefficients(b: f64, alpha: f64) -> (f64, f64) {
    let beta = alpha * b;
    let a5 = alpha.powi(5);
    let p_s = s_bracket(beta) / (16.0 * a5 * b.powi(4));
    let p_d = d_bracket(beta) / (240.0 * a5 * alpha.powi(4) * b.powi(8));
    (p_s, p_d)
}

fn require_equal_range(p: &ModelParams) -> Result<f64, ObservablesError> {
    if p.is_equal_range() {
        Ok(p.range())
    } else {
        Err(ObservablesError::UnequalRanges {
            b1: p.b1(),
            b2: p.b2(),
        })
    }
}

/// Closed-form `P_S` (equal ranges only).
pub fn prob_s_closed(p: &ModelParams) -> Result<f64, ObservablesError> {
    let b = require_equal_range(p)?;
    Ok(p.norm_s() * p.norm_s() * closed_coefficients(b, p.alpha()).0)
}

/// Closed-form `P_D` (equal ranges only).
pub fn prob_d_closed(p: &ModelParams) -> Result<f64, ObservablesError> {
    let b = require_equal_range(p)?;
    Ok(p.norm_d() * p.norm_d() * closed_coefficients(b, p.alpha()).1)
}

/// k beyond which `∫ k² |g(k)|² / (k²+α²)² dk · 2/π` is below the tail
/// tolerance, using `|j_l(x)| ≤ 2/x` for `x ≥ 1`.
fn momentum_cutoff(p: &ModelParams) -> f64 {
    let (b1, b2) = (p.b1(), p.b2());
    let c4 = 16.0;
    let bound = 2.0 / std::f64::consts::PI * c4 / (5.0 * b1 * b1 * b2 * b2 * K_TAIL_TOLERANCE);
    let k_tail = bound.powf(0.2);
    k_tail.max(1.0 / b1).max(4.0)
}

/// k-space scheme: fine panels through the `1/(k²+α²)²` peak, then panels
/// one period of the fastest oscillation (`2(b1+b2)`) wide.
pub fn momentum_scheme(
    p: &ModelParams,
    panel_order: usize,
) -> Result<QuadratureScheme, QuadratureError> {
    let k_max = momentum_cutoff(p);
    let fine_end = (8.0 * p.alpha()).max(1.0).min(k_max);
    let fine_width = (0.25 * p.alpha()).min(std::f64::consts::PI / p.outer_edge());
    let width = std::f64::consts::PI / p.outer_edge();
    let mut breakpoints = vec![0.0];
    let mut k = 0.0;
    while k + fine_width < fine_end {
        k += fine_width;
        breakpoints.push(k);
    }
    while k + width < k_max {
        k += width;
        breakpoints.push(k);
    }
    breakpoints.push(k_max.max(k + width));
    QuadratureScheme::new(panel_order, breakpoints, Tail::None)
}

/// `∫₀^∞ k² u(k)² dk` by quadrature (any ranges).
pub fn prob_s_numeric(p: &ModelParams) -> Result<f64, ObservablesError> {
    let scheme = momentum_scheme(p, DEFAULT_PANEL_ORDER)?;
    Ok(integrate_panels(
        |k| {
            let u = u_momentum(k, p);
            k * k * u * u
        },
        &scheme,
    )?)
}

/// `∫₀^∞ k² w(k)² dk` by quadrature (any ranges).
pub fn prob_d_numeric(p: &ModelParams) -> Result<f64, ObservablesError> {
    let scheme = momentum_scheme(p, DEFAULT_PANEL_ORDER)?;
    Ok(integrate_panels(
        |k| {
            let w = w_momentum(k, p);
            k * k * w * w
        },
        &scheme,
    )?)
}

/// r-space scheme with breakpoints at the region boundaries, then panels
/// `1/(2α)` wide out to 40 decay lengths of `e^{-2αr}`.
pub fn coordinate_scheme(
    p: &ModelParams,
    panel_order: usize,
) -> Result<QuadratureScheme, QuadratureError> {
    let mut breakpoints = vec![0.0];
    breakpoints.extend(p.region_boundaries());
    let last = p.outer_edge();
    let decay = 2.0 * p.alpha();
    QuadratureScheme::new(
        panel_order,
        breakpoints,
        Tail::Truncate {
            limit: last + crate::quadrature::DECAY_LENGTHS / decay,
            panel_width: 1.0 / decay,
        },
    )
}

/// `∫₀^∞ u(r)² dr`, the coordinate-space side of Parseval's identity.
pub fn prob_s_coordinate(p: &ModelParams) -> Result<f64, ObservablesError> {
    let scheme = coordinate_scheme(p, DEFAULT_PANEL_ORDER)?;
    Ok(integrate_panels(
        |r| {
            let u = u_coordinate(r, p);
            u * u
        },
        &scheme,
    )?)
}

/// `∫₀^∞ w(r)² dr`.
pub fn prob_d_coordinate(p: &ModelParams) -> Result<f64, ObservablesError> {
    let scheme = coordinate_scheme(p, DEFAULT_PANEL_ORDER)?;
    Ok(integrate_panels(
        |r| {
            let w = w_coordinate(r, p);
            w * w
        },
        &scheme,
    )?)
}

/// Shape of the model without its normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    pub b1: f64,
    pub b2: f64,
    pub alpha: f64,
}

impl Shape {
    pub fn equal_range(b: f64, alpha: f64) -> Self {
        Self {
            b1: b,
            b2: b,
            alpha,
        }
    }

    pub fn params(&self, norm_s: f64, norm_d: f64) -> Result<ModelParams, ParamsError> {
        ModelParams::new(self.b1, self.b2, self.alpha, norm_s, norm_d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbabilityPath {
    Closed,
    Numeric,
}

/// Unit-normalization coefficients `(p_S, p_D)`: closed forms for equal
/// ranges, k-space quadrature otherwise.
pub fn probability_coefficients(
    shape: &Shape,
) -> Result<(f64, f64, ProbabilityPath), ObservablesError> {
    let unit = shape.params(1.0, 1.0)?;
    if unit.is_equal_range() {
        let (s, d) = closed_coefficients(unit.range(), unit.alpha());
        Ok((s, d, ProbabilityPath::Closed))
    } else {
        Ok((
            prob_s_numeric(&unit)?,
            prob_d_numeric(&unit)?,
            ProbabilityPath::Numeric,
        ))
    }
}

/// `(A, B)` with `B² = ρA²` and `P_S + P_D = 1`.
pub fn solve_normalisation(shape: &Shape, ratio: f64) -> Result<(f64, f64), ObservablesError> {
    if !(ratio >= 0.0) || !ratio.is_finite() {
        return Err(ObservablesError::Ratio(ratio));
    }
    let (p_s, p_d, _) = probability_coefficients(shape)?;
    let total = p_s + ratio * p_d;
    if !(total > 0.0) || !total.is_finite() {
        return Err(ObservablesError::Degenerate(total));
    }
    let a = total.recip().sqrt();
    Ok((a, ratio.sqrt() * a))
}

/// Normalized parameters for a shape and ratio `ρ = B²/A²`.
pub fn normalized_params(shape: &Shape, ratio: f64) -> Result<ModelParams, ObservablesError> {
    let (a, b) = solve_normalisation(shape, ratio)?;
    Ok(shape.params(a, b)?)
}

/// Reference configuration: `b = 1.475 fm`, `α = 0.23165 fm⁻¹`, `ρ = 3`.
pub fn reference_params() -> ModelParams {
    use crate::model::{REFERENCE_ALPHA_INV_FM, REFERENCE_RANGE_FM, REFERENCE_RATIO};
    normalized_params(
        &Shape::equal_range(REFERENCE_RANGE_FM, REFERENCE_ALPHA_INV_FM),
        REFERENCE_RATIO,
    )
    .expect("reference configuration is valid")
}

/// Coefficients `(A_S, A_D)` of the outer-region tails
/// `u → A_S e^{-αr}`, `w → A_D e^{-αr}(1 + 3/(αr) + 3/(αr)²)`.
pub fn asymptotic_normalisations(p: &ModelParams) -> (f64, f64) {
    let (x1, x2) = (p.alpha() * p.b1(), p.alpha() * p.b2());
    (p.norm_s() * i0(x1) * i0(x2), p.norm_d() * i1(x1) * i1(x2))
}

/// `η = A_D / A_S`.
pub fn ds_ratio(p: &ModelParams) -> Result<f64, ObservablesError> {
    let (a_s, a_d) = asymptotic_normalisations(p);
    if a_s == 0.0 {
        return Err(ObservablesError::UndefinedRatio);
    }
    Ok(a_d / a_s)
}

/// `(1/2) √(∫ r² (u² + w²) dr)` with the default scheme.
pub fn rms_radius(p: &ModelParams) -> Result<f64, ObservablesError> {
    rms_radius_with(p, &coordinate_scheme(p, DEFAULT_PANEL_ORDER)?)
}

pub fn rms_radius_with(
    p: &ModelParams,
    scheme: &QuadratureScheme,
) -> Result<f64, ObservablesError> {
    let m2 = integrate_panels(
        |r| {
            let (u, w) = (u_coordinate(r, p), w_coordinate(r, p));
            r * r * (u * u + w * w)
        },
        scheme,
    )?;
    Ok(0.5 * m2.sqrt())
}

/// `(1/20) ∫ r² w (√8 u - w) dr` in fm², with the default scheme.
pub fn quadrupole_moment(p: &ModelParams) -> Result<f64, ObservablesError> {
    quadrupole_moment_with(p, &coordinate_scheme(p, DEFAULT_PANEL_ORDER)?)
}

pub fn quadrupole_moment_with(
    p: &ModelParams,
    scheme: &QuadratureScheme,
) -> Result<f64, ObservablesError> {
    let sqrt8 = 8f64.sqrt();
    let q = integrate_panels(
        |r| {
            let (u, w) = (u_coordinate(r, p), w_coordinate(r, p));
            r * r * w * (sqrt8 * u - w)
        },
        scheme,
    )?;
    Ok(q / 20.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservablesReport {
    #[serde(rename = "P_S")]
    pub p_s: f64,
    #[serde(rename = "P_D")]
    pub p_d: f64,
    #[serde(rename = "A_S_fm_inv_sqrt")]
    pub a_s: f64,
    #[serde(rename = "A_D_fm_inv_sqrt")]
    pub a_d: f64,
    pub eta: f64,
    pub r_rms_fm: f64,
    #[serde(rename = "Q_fm2")]
    pub q: f64,
    pub probability_path: ProbabilityPath,
    pub warnings: Vec<String>,
}

impl ObservablesReport {
    pub fn is_normalized(&self) -> bool {
        (self.p_s + self.p_d - 1.0).abs() <= NORMALIZATION_WARNING
    }
}

/// All observables for one parameter set. Probabilities use the closed forms
/// for equal ranges and k-space quadrature otherwise.
pub fn report(p: &ModelParams) -> Result<ObservablesReport, ObservablesError> {
    let (p_s, p_d, path) = if p.is_equal_range() {
        (
            prob_s_closed(p)?,
            prob_d_closed(p)?,
            ProbabilityPath::Closed,
        )
    } else {
        (
            prob_s_numeric(p)?,
            prob_d_numeric(p)?,
            ProbabilityPath::Numeric,
        )
    };
    let (a_s, a_d) = asymptotic_normalisations(p);
    let mut warnings = Vec::new();
    let eta = match ds_ratio(p) {
        Ok(eta) => eta,
        Err(_) => {
            warnings.push("A_S = 0: D/S ratio undefined, reported as 0".to_string());
            0.0
        }
    };
    let total = p_s + p_d;
    if (total - 1.0).abs() > NORMALIZATION_WARNING {
        warnings.push(format!(
            "parameters are not normalized: P_S + P_D = {total:.6}"
        ));
    }
    Ok(ObservablesReport {
        p_s,
        p_d,
        a_s,
        a_d,
        eta,
        r_rms_fm: rms_radius(p)?,
        q: quadrupole_moment(p)?,
        probability_path: path,
        warnings,
    })
}
