//! Model parameters, potential strengths and the coordinate-space regions.
//!
//! Units: lengths in fm, `alpha` in fm⁻¹, normalizations in fm^(-1/2),
//! with ħ = c = 1.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Range differences below this (fm) are treated as equal ranges.
pub const EPS_REGION: f64 = 1e-9;

/// Reference configuration: common range parameter (fm).
pub const REFERENCE_RANGE_FM: f64 = 1.475;
/// Reference configuration: bound-state decay constant α (fm⁻¹).
pub const REFERENCE_ALPHA_INV_FM: f64 = 0.23165;
/// Reference configuration: ratio B²/A².
pub const REFERENCE_RATIO: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid model parameters: {}", .violations.join("; "))]
pub struct ParamsError {
    pub violations: Vec<String>,
}

/// Range parameters, decay constant and normalization constants.
///
/// Always canonical: `b2 >= b1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    b1: f64,
    b2: f64,
    alpha: f64,
    norm_s: f64,
    norm_d: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    b1_fm: f64,
    b2_fm: f64,
    alpha_inv_fm: f64,
    #[serde(rename = "A")]
    norm_s: f64,
    #[serde(rename = "B")]
    norm_d: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = ParamsError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        ModelParams::new(
            raw.b1_fm,
            raw.b2_fm,
            raw.alpha_inv_fm,
            raw.norm_s,
            raw.norm_d,
        )
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            b1_fm: p.b1,
            b2_fm: p.b2,
            alpha_inv_fm: p.alpha,
            norm_s: p.norm_s,
            norm_d: p.norm_d,
        }
    }
}

fn require(violations: &mut Vec<String>, ok: bool, msg: impl Into<String>) {
    if !ok {
        violations.push(msg.into());
    }
}

impl ModelParams {
    /// Validates and canonicalizes; every violated constraint is reported.
    pub fn new(
        b1: f64,
        b2: f64,
        alpha: f64,
        norm_s: f64,
        norm_d: f64,
    ) -> Result<Self, ParamsError> {
        let mut v = Vec::new();
        require(
            &mut v,
            b1.is_finite() && b1 > 0.0,
            format!("b1 must be positive and finite (got {b1})"),
        );
        require(
            &mut v,
            b2.is_finite() && b2 > 0.0,
            format!("b2 must be positive and finite (got {b2})"),
        );
        require(
            &mut v,
            alpha.is_finite() && alpha > 0.0,
            format!("alpha must be positive and finite (got {alpha})"),
        );
        require(
            &mut v,
            norm_s.is_finite() && norm_s >= 0.0,
            format!("A must be non-negative (got {norm_s})"),
        );
        require(
            &mut v,
            norm_d.is_finite() && norm_d >= 0.0,
            format!("B must be non-negative (got {norm_d})"),
        );
        if !v.is_empty() {
            return Err(ParamsError { violations: v });
        }
        let (b1, b2) = if b2 >= b1 { (b1, b2) } else { (b2, b1) };
        Ok(Self {
            b1,
            b2,
            alpha,
            norm_s,
            norm_d,
        })
    }

    /// Equal ranges `b1 = b2 = b`.
    pub fn equal_range(b: f64, alpha: f64, norm_s: f64, norm_d: f64) -> Result<Self, ParamsError> {
        Self::new(b, b, alpha, norm_s, norm_d)
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// S-state normalization `A`.
    pub fn norm_s(&self) -> f64 {
        self.norm_s
    }

    /// D-state normalization `B`.
    pub fn norm_d(&self) -> f64 {
        self.norm_d
    }

    pub fn with_norms(&self, norm_s: f64, norm_d: f64) -> Result<Self, ParamsError> {
        Self::new(self.b1, self.b2, self.alpha, norm_s, norm_d)
    }

    /// `b2 - b1`, the outer edge of the inner region.
    pub fn inner_edge(&self) -> f64 {
        self.b2 - self.b1
    }

    /// `b1 + b2`, the outer edge of the middle region.
    pub fn outer_edge(&self) -> f64 {
        self.b1 + self.b2
    }

    pub fn is_equal_range(&self) -> bool {
        self.inner_edge() < EPS_REGION
    }

    /// Common range for the equal-range formulas (mean of b1 and b2).
    pub fn range(&self) -> f64 {
        0.5 * (self.b1 + self.b2)
    }

    /// Boundaries at which the coordinate-space wavefunctions change form,
    /// in increasing order and without the empty inner region.
    pub fn region_boundaries(&self) -> Vec<f64> {
        if self.is_equal_range() {
            vec![self.outer_edge()]
        } else {
            vec![self.inner_edge(), self.outer_edge()]
        }
    }
}

/// Strengths λ_C/M and λ_T/M of the central and tensor kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialStrengths {
    central: f64,
    tensor: f64,
}

impl PotentialStrengths {
    pub fn new(lambda_c_over_m: f64, lambda_t_over_m: f64) -> Result<Self, ParamsError> {
        let mut v = Vec::new();
        require(
            &mut v,
            lambda_c_over_m.is_finite() && lambda_c_over_m > 0.0,
            format!("central strength must be positive (got {lambda_c_over_m})"),
        );
        require(
            &mut v,
            lambda_t_over_m.is_finite() && lambda_t_over_m > 0.0,
            format!("tensor strength must be positive (got {lambda_t_over_m})"),
        );
        if !v.is_empty() {
            return Err(ParamsError { violations: v });
        }
        Ok(Self {
            central: lambda_c_over_m,
            tensor: lambda_t_over_m,
        })
    }

    pub fn central(&self) -> f64 {
        self.central
    }

    pub fn tensor(&self) -> f64 {
        self.tensor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Inner,
    Middle,
    Outer,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Inner => "inner",
            Region::Middle => "middle",
            Region::Outer => "outer",
        })
    }
}

/// Region containing `r`. Boundary points go to the lower region; with equal
/// ranges the inner region is empty and `r = 0` is reported as `Middle`.
pub fn region_of(r: f64, params: &ModelParams) -> Region {
    if !params.is_equal_range() && r <= params.inner_edge() {
        Region::Inner
    } else if r <= params.outer_edge() {
        Region::Middle
    } else {
        Region::Outer
    }
}
