//! Form factors, momentum-space wavefunctions and separable potential kernels.

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, PotentialStrengths};
use crate::specfun::{j0, j1};

/// √(2/π).
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// `g_C(k) = j0(b1 k) j0(b2 k)`.
pub fn form_factor_central(k: f64, params: &ModelParams) -> f64 {
    j0(params.b1() * k) * j0(params.b2() * k)
}

/// `g_T(k) = j1(b1 k) j1(b2 k)`; behaves as `b1 b2 k² / 9` near the origin.
pub fn form_factor_tensor(k: f64, params: &ModelParams) -> f64 {
    j1(params.b1() * k) * j1(params.b2() * k)
}

/// S-state amplitude `u(k) = A √(2/π) g_C(k) / (k² + α²)` in fm^(3/2).
pub fn u_momentum(k: f64, params: &ModelParams) -> f64 {
    let a = params.alpha();
    params.norm_s() * SQRT_2_OVER_PI * form_factor_central(k, params) / (k * k + a * a)
}

/// D-state amplitude `w(k) = B √(2/π) g_T(k) / (k² + α²)` in fm^(3/2).
pub fn w_momentum(k: f64, params: &ModelParams) -> f64 {
    let a = params.alpha();
    params.norm_d() * SQRT_2_OVER_PI * form_factor_tensor(k, params) / (k * k + a * a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumAmplitude {
    pub k: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Central,
    Tensor,
}

/// Separable kernel `V(k, k')`: attractive central part, repulsive tensor part.
pub fn potential_kernel(
    channel: Channel,
    k: f64,
    kprime: f64,
    params: &ModelParams,
    strengths: &PotentialStrengths,
) -> f64 {
    match channel {
        Channel::Central => {
            -strengths.central()
                * (form_factor_central(k, params) * form_factor_central(kprime, params))
        }
        Channel::Tensor => {
            strengths.tensor()
                * (form_factor_tensor(k, params) * form_factor_tensor(kprime, params))
        }
    }
}

/// Table of `(k, u(k))` samples.
pub fn u_table(ks: &[f64], params: &ModelParams) -> Vec<MomentumAmplitude> {
    ks.iter()
        .map(|&k| MomentumAmplitude {
            k,
            value: u_momentum(k, params),
        })
        .collect()
}
