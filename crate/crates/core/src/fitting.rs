//! Two-parameter fit of the equal-range model, recovering the range `b` and
//! the ratio `ρ = B²/A²` from a target rms radius and quadrupole moment.
//! The normalization is re-solved at every trial point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::observables::{
    normalized_params, quadrupole_moment, rms_radius, ObservablesError, Shape,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("invalid fit target: {0}")]
    InvalidTarget(String),
    #[error("invalid starting point (b0 = {b}, rho0 = {ratio})")]
    InvalidStart { b: f64, ratio: f64 },
    #[error("alpha must be positive and finite (got {0})")]
    Alpha(f64),
    #[error(transparent)]
    Observables(#[from] ObservablesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitTargets {
    #[serde(rename = "r_rms_fm")]
    r_rms: f64,
    #[serde(rename = "Q_fm2")]
    q: f64,
}

impl FitTargets {
    /// `r_rms` must be positive. `Q = 0` is accepted and selects the pure
    /// S-state branch.
    pub fn new(r_rms: f64, q: f64) -> Result<Self, FitError> {
        if !(r_rms > 0.0) || !r_rms.is_finite() {
            return Err(FitError::InvalidTarget(format!(
                "r_rms must be positive (got {r_rms})"
            )));
        }
        if !(q >= 0.0) || !q.is_finite() {
            return Err(FitError::InvalidTarget(format!(
                "Q must be non-negative (got {q})"
            )));
        }
        Ok(Self { r_rms, q })
    }

    pub fn r_rms(&self) -> f64 {
        self.r_rms
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    fn q_scale(&self) -> f64 {
        if self.q > 0.0 {
            self.q
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Convergence threshold on the target-scaled residual norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relative forward-difference step for the Jacobian.
    pub jacobian_step: f64,
    /// Step halvings tried before a Newton step counts as diverged.
    pub max_halvings: usize,
    pub b_bounds: (f64, f64),
    /// Fallback scan box and resolution.
    pub scan_b: (f64, f64),
    pub scan_ratio: (f64, f64),
    pub scan_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 50,
            jacobian_step: 1e-4,
            max_halvings: 12,
            b_bounds: (0.05, 20.0),
            scan_b: (0.5, 3.0),
            scan_ratio: (0.0, 10.0),
            scan_points: 21,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(rename = "b_fm")]
    pub b: f64,
    pub ratio: f64,
    #[serde(rename = "A_fm_inv_sqrt")]
    pub norm_s: f64,
    #[serde(rename = "B_fm_inv_sqrt")]
    pub norm_d: f64,
    #[serde(rename = "r_rms_fm")]
    pub r_rms: f64,
    #[serde(rename = "Q_fm2")]
    pub q: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub used_scan: bool,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    b: f64,
    ratio: f64,
    r_rms: f64,
    q: f64,
    residual: [f64; 2],
}

impl Point {
    fn norm(&self) -> f64 {
        self.residual[0].hypot(self.residual[1])
    }
}

struct Problem<'a> {
    targets: &'a FitTargets,
    alpha: f64,
    opts: &'a FitOptions,
}

impl Problem<'_> {
    fn clamp(&self, b: f64, ratio: f64) -> (f64, f64) {
        (
            b.clamp(self.opts.b_bounds.0, self.opts.b_bounds.1),
            ratio.max(0.0),
        )
    }

    fn eval(&self, b: f64, ratio: f64) -> Result<Point, FitError> {
        let p = normalized_params(&Shape::equal_range(b, self.alpha), ratio)?;
        let r_rms = rms_radius(&p)?;
        let q = quadrupole_moment(&p)?;
        let residual = [
            (r_rms - self.targets.r_rms) / self.targets.r_rms,
            (q - self.targets.q) / self.targets.q_scale(),
        ];
        Ok(Point {
            b,
            ratio,
            r_rms,
            q,
            residual,
        })
    }

    /// Newton from `start`; returns the best point, iterations used, and
    /// whether the tolerance was met.
    fn newton(&self, start: Point, iterations: &mut usize) -> Result<(Point, bool), FitError> {
        let mut x = start;
        while *iterations < self.opts.max_iterations {
            if x.norm() <= self.opts.tolerance {
                return Ok((x, true));
            }
            *iterations += 1;
            let hb = self.opts.jacobian_step * x.b.abs().max(1e-2);
            let hr = self.opts.jacobian_step * x.ratio.abs().max(1e-2);
            let xb = self.eval(x.b + hb, x.ratio)?;
            let xr = self.eval(x.b, x.ratio + hr)?;
            let j = [
                [
                    (xb.residual[0] - x.residual[0]) / hb,
                    (xr.residual[0] - x.residual[0]) / hr,
                ],
                [
                    (xb.residual[1] - x.residual[1]) / hb,
                    (xr.residual[1] - x.residual[1]) / hr,
                ],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                return Ok((x, false));
            }
            let db = -(j[1][1] * x.residual[0] - j[0][1] * x.residual[1]) / det;
            let dr = -(-j[1][0] * x.residual[0] + j[0][0] * x.residual[1]) / det;

            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=self.opts.max_halvings {
                let (b, ratio) = self.clamp(x.b + lambda * db, x.ratio + lambda * dr);
                let trial = self.eval(b, ratio)?;
                if trial.norm() < x.norm() {
                    accepted = Some(trial);
                    break;
                }
                lambda *= 0.5;
            }
            match accepted {
                Some(next) => x = next,
                None => return Ok((x, false)),
            }
        }
        let ok = x.norm() <= self.opts.tolerance;
        Ok((x, ok))
    }

    fn scan(&self) -> Result<Point, FitError> {
        let n = self.opts.scan_points.max(2);
        let mut best: Option<Point> = None;
        for i in 0..n {
            let b = lerp(self.opts.scan_b, i, n);
            for k in 0..n {
                let pt = self.eval(b, lerp(self.opts.scan_ratio, k, n))?;
                if best.is_none_or(|x| pt.norm() < x.norm()) {
                    best = Some(pt);
                }
            }
        }
        Ok(best.expect("scan grid is non-empty"))
    }
}

fn lerp((lo, hi): (f64, f64), i: usize, n: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// Damped Newton fit of `(b, ρ)` to the targets. Falls back to a grid scan
/// (and a second Newton run from the best grid point) when Newton stalls.
/// Failure to converge is reported through `FitResult::converged`.
pub fn fit_parameters(
    targets: &FitTargets,
    alpha: f64,
    initial: (f64, f64),
    opts: &FitOptions,
) -> Result<FitResult, FitError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(FitError::Alpha(alpha));
    }
    let (b0, r0) = initial;
    if !(b0 > 0.0) || !b0.is_finite() || !(r0 >= 0.0) || !r0.is_finite() {
        return Err(FitError::InvalidStart { b: b0, ratio: r0 });
    }
    let problem = Problem {
        targets,
        alpha,
        opts,
    };
    let mut iterations = 0;
    let (mut best, mut converged) = problem.newton(problem.eval(b0, r0)?, &mut iterations)?;
    let mut used_scan = false;
    if !converged {
        used_scan = true;
        let start = problem.scan()?;
        let budget = iterations;
        iterations = 0;
        let (x, ok) = problem.newton(start, &mut iterations)?;
        iterations += budget;
        if x.norm() < best.norm() {
            best = x;
        }
        converged = ok;
    }
    let p = normalized_params(&Shape::equal_range(best.b, alpha), best.ratio)?;
    Ok(FitResult {
        b: best.b,
        ratio: best.ratio,
        norm_s: p.norm_s(),
        norm_d: p.norm_d(),
        r_rms: best.r_rms,
        q: best.q,
        residual_norm: best.norm(),
        iterations,
        converged,
        used_scan,
    })
}
