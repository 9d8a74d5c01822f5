//! Numerical Fourier–Bessel transforms from momentum to coordinate space,
//!
//! ```text
//! u(r) = √(2/π) r ∫₀^∞ k² u(k) j0(kr) dk
//! w(r) = √(2/π) r ∫₀^∞ k² w(k) j2(kr) dk
//! ```
//!
//! used as an independent check of the closed-form coordinate-space branches.
//! Below `fine_k` the k axis is cut into narrow panels that resolve the
//! `1/(k² + α²)` peak; beyond it panels are `π/(r + b1 + b2)` wide, so each
//! holds at most half a period of the fastest oscillation in the integrand.
//! The upper limit is doubled until the result settles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compensated::NeumaierSum;
use crate::coordinate::{u_coordinate, w_coordinate};
use crate::model::{region_of, ModelParams, Region};
use crate::momentum::{u_momentum, w_momentum, SQRT_2_OVER_PI};
use crate::quadrature::{GaussLegendre, QuadratureError};
use crate::specfun::{j0, j2};

/// Radii (fm) at which the transforms are compared with the closed forms.
pub const DEFAULT_R_GRID: [f64; 7] = [0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("transform radius must be positive and finite (got {0})")]
    Radius(f64),
    #[error("transform at r = {r} did not converge: last k_max doubling changed the result by {change:e}")]
    NonConvergence { r: f64, change: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselOrder {
    /// `j0` kernel (S state).
    L0,
    /// `j2` kernel (D state).
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions {
    /// First upper limit in k (fm⁻¹).
    pub k_max: f64,
    /// Largest number of times `k_max` is doubled.
    pub max_doublings: u32,
    /// Stop once a doubling changes the result by at most this much.
    pub tolerance: f64,
    /// A final change above this is reported as non-convergence.
    pub failure_tolerance: f64,
    /// Gauss–Legendre points per k panel.
    pub panel_order: usize,
    /// Panels per half period of the fastest oscillation.
    pub panels_per_half_period: usize,
    /// Below this k (fm⁻¹) panels are at most `fine_width` wide, resolving
    /// the `1/(k² + α²)` peak of the amplitudes.
    pub fine_k: f64,
    pub fine_width: f64,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            k_max: 80.0,
            max_doublings: 9,
            tolerance: 1e-10,
            failure_tolerance: 1e-8,
            panel_order: 20,
            panels_per_half_period: 1,
            fine_k: 4.0,
            fine_width: 0.125,
        }
    }
}

/// `√(2/π) r ∫₀^∞ k² f(k) j_l(kr) dk` where `f` oscillates with frequencies
/// up to `f_frequency` (for the model amplitudes, `b1 + b2`).
pub fn bessel_transform<F>(
    order: BesselOrder,
    f: F,
    r: f64,
    f_frequency: f64,
    opts: &TransformOptions,
) -> Result<f64, TransformError>
where
    F: Fn(f64) -> f64,
{
    if !(r > 0.0) || !r.is_finite() {
        return Err(TransformError::Radius(r));
    }
    let rule = GaussLegendre::new(opts.panel_order)?;
    let kernel = |k: f64| match order {
        BesselOrder::L0 => j0(k * r),
        BesselOrder::L2 => j2(k * r),
    };
    let integrand = |k: f64| k * k * f(k) * kernel(k);
    let width = std::f64::consts::PI / (r + f_frequency) / opts.panels_per_half_period as f64;
    let prefactor = SQRT_2_OVER_PI * r;

    let fine_width = opts.fine_width.min(width);
    let n_fine = (opts.fine_k / fine_width).ceil() as usize;
    let fine_end = n_fine as f64 * fine_width;
    let edge = |i: usize| {
        if i <= n_fine {
            i as f64 * fine_width
        } else {
            fine_end + (i - n_fine) as f64 * width
        }
    };

    let mut acc = NeumaierSum::new();
    let mut panels_done = 0usize;
    let mut add_panels_up_to = |k_end: f64, acc: &mut NeumaierSum| -> Result<(), TransformError> {
        let mut i = panels_done;
        while edge(i) < k_end {
            acc.add(rule.integrate(edge(i), edge(i + 1), integrand)?);
            i += 1;
        }
        panels_done = i;
        Ok(())
    };

    let mut k_end = opts.k_max;
    add_panels_up_to(k_end, &mut acc)?;
    let mut previous = prefactor * acc.value();
    let mut change = f64::INFINITY;
    for _ in 0..opts.max_doublings {
        k_end *= 2.0;
        add_panels_up_to(k_end, &mut acc)?;
        let current = prefactor * acc.value();
        change = (current - previous).abs();
        previous = current;
        if change <= opts.tolerance {
            return Ok(current);
        }
    }
    if change <= opts.failure_tolerance {
        Ok(previous)
    } else {
        Err(TransformError::NonConvergence { r, change })
    }
}

/// Transform of the model's `u(k)` to `u(r)`.
pub fn transform_u(
    r: f64,
    p: &ModelParams,
    opts: &TransformOptions,
) -> Result<f64, TransformError> {
    bessel_transform(
        BesselOrder::L0,
        |k| u_momentum(k, p),
        r,
        p.outer_edge(),
        opts,
    )
}

/// Transform of the model's `w(k)` to `w(r)`.
pub fn transform_w(
    r: f64,
    p: &ModelParams,
    opts: &TransformOptions,
) -> Result<f64, TransformError> {
    bessel_transform(
        BesselOrder::L2,
        |k| w_momentum(k, p),
        r,
        p.outer_edge(),
        opts,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformPoint {
    pub r: f64,
    pub region: Region,
    pub u_analytic: f64,
    pub u_transform: f64,
    pub dev_u: f64,
    pub w_analytic: f64,
    pub w_transform: f64,
    pub dev_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub points: Vec<TransformPoint>,
    pub max_abs_dev_u: f64,
    pub max_abs_dev_w: f64,
}

impl TransformReport {
    pub fn r_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.r).collect()
    }

    pub fn max_abs_dev(&self) -> f64 {
        self.max_abs_dev_u.max(self.max_abs_dev_w)
    }
}

/// Compares both transforms with the closed-form branches at every radius.
pub fn validate_transforms(
    p: &ModelParams,
    r_grid: &[f64],
) -> Result<TransformReport, TransformError> {
    validate_transforms_with(
        p,
        r_grid,
        &TransformOptions::default(),
        u_coordinate,
        w_coordinate,
    )
}

/// As [`validate_transforms`] with explicit options and closed forms.
pub fn validate_transforms_with<U, W>(
    p: &ModelParams,
    r_grid: &[f64],
    opts: &TransformOptions,
    u_closed: U,
    w_closed: W,
) -> Result<TransformReport, TransformError>
where
    U: Fn(f64, &ModelParams) -> f64,
    W: Fn(f64, &ModelParams) -> f64,
{
    let mut points = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let u_transform = transform_u(r, p, opts)?;
        let w_transform = transform_w(r, p, opts)?;
        let u_analytic = u_closed(r, p);
        let w_analytic = w_closed(r, p);
        points.push(TransformPoint {
            r,
            region: region_of(r, p),
            u_analytic,
            u_transform,
            dev_u: (u_transform - u_analytic).abs(),
            w_analytic,
            w_transform,
            dev_w: (w_transform - w_analytic).abs(),
        });
    }
    let max_abs_dev_u = points.iter().map(|x| x.dev_u).fold(0.0, f64::max);
    let max_abs_dev_w = points.iter().map(|x| x.dev_w).fold(0.0, f64::max);
    Ok(TransformReport {
        points,
        max_abs_dev_u,
        max_abs_dev_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference() -> ModelParams {
        ModelParams::equal_range(1.475, 0.23165, 0.9049555173212225, 1.5674289345901346).unwrap()
    }

    #[test]
    fn yukawa_pair() {
        // difference of two Yukawa pairs, so that f decays like k⁻⁴
        let (alpha, mu) = (0.23165, 1.5);
        let opts = TransformOptions::default();
        let f = |k: f64| SQRT_2_OVER_PI * (1.0 / (k * k + alpha * alpha) - 1.0 / (k * k + mu * mu));
        for &r in &[0.5, 2.0, 6.0] {
            let v = bessel_transform(BesselOrder::L0, f, r, 0.0, &opts).unwrap();
            assert_abs_diff_eq!(v, (-alpha * r).exp() - (-mu * r).exp(), epsilon = 1e-7);
        }
    }

    #[test]
    fn reproduces_closed_forms() {
        let p = reference();
        let opts = TransformOptions::default();
        assert_abs_diff_eq!(
            transform_u(4.0, &p, &opts).unwrap(),
            u_coordinate(4.0, &p),
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            transform_w(0.5, &p, &opts).unwrap(),
            w_coordinate(0.5, &p),
            epsilon = 1e-7
        );
    }

    #[test]
    fn zero_normalization_gives_zero_deviation() {
        let p = ModelParams::equal_range(1.475, 0.23165, 0.0, 0.0).unwrap();
        let report = validate_transforms(&p, &DEFAULT_R_GRID).unwrap();
        assert_eq!(report.max_abs_dev(), 0.0);
    }

    #[test]
    fn finer_panels_do_not_change_result() {
        let p = ModelParams::new(1.0, 2.0, 0.23165, 1.0, 1.0).unwrap();
        let coarse = TransformOptions::default();
        let fine = TransformOptions {
            panels_per_half_period: 2,
            ..coarse
        };
        for &r in &[0.5, 1.5, 5.0] {
            assert_abs_diff_eq!(
                transform_u(r, &p, &coarse).unwrap(),
                transform_u(r, &p, &fine).unwrap(),
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(
                transform_w(r, &p, &coarse).unwrap(),
                transform_w(r, &p, &fine).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn rejects_non_positive_radius() {
        let p = reference();
        assert!(matches!(
            transform_u(0.0, &p, &TransformOptions::default()),
            Err(TransformError::Radius(_))
        ));
    }

    #[test]
    fn reports_non_convergence() {
        // integrand decays only like 1/k², far too slowly for the doubling check
        let opts = TransformOptions {
            max_doublings: 2,
            ..TransformOptions::default()
        };
        let f = |k: f64| 1.0 / (k * k * k + 1.0);
        let res = bessel_transform(
            BesselOrder::L0,
            |k| f(k) * (k * 2.0).sin().abs(),
            1.0,
            2.0,
            &opts,
        );
        assert!(matches!(res, Err(TransformError::NonConvergence { .. })));
    }
}
