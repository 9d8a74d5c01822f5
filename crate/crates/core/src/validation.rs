//! Self-consistency checks of the coordinate-space branches: value and
//! derivative continuity at the region boundaries, agreement with the
//! numerical transforms, Parseval's identity, and closed-form vs quadrature
//! probabilities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coordinate::{self, Wave};
use crate::model::{region_of, ModelParams, Region};
use crate::observables::{
    coordinate_scheme, prob_d_closed, prob_d_numeric, prob_s_closed, prob_s_numeric,
    ObservablesError,
};
use crate::quadrature::{differentiate_one_sided, integrate_panels, Side, DEFAULT_PANEL_ORDER};
use crate::transform::{
    validate_transforms_with, TransformError, TransformOptions, DEFAULT_R_GRID,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error(transparent)]
    Observables(#[from] ObservablesError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative mismatch of branch values at a boundary.
    pub continuity: f64,
    /// Relative mismatch of one-sided derivatives at a boundary.
    pub derivative: f64,
    /// Absolute transform-vs-closed-form deviation.
    pub transform: f64,
    /// Absolute k-space vs r-space norm mismatch.
    pub parseval: f64,
    pub closed_numeric_s: f64,
    pub closed_numeric_d: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            continuity: 1e-10,
            derivative: 1e-8,
            transform: 1e-7,
            parseval: 1e-7,
            closed_numeric_s: 1e-8,
            closed_numeric_d: 1e-6,
        }
    }
}

/// Evaluates the coordinate-space branches, optionally with the middle-region
/// D-state branch scaled (fault injection for testing the checks themselves).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branches {
    middle_w_scale: f64,
}

impl Default for Branches {
    fn default() -> Self {
        Self::EXACT
    }
}

impl Branches {
    pub const EXACT: Self = Self {
        middle_w_scale: 1.0,
    };

    pub fn with_middle_w_scaled(scale: f64) -> Self {
        Self {
            middle_w_scale: scale,
        }
    }

    pub fn eval(&self, wave: Wave, region: Region, r: f64, p: &ModelParams) -> f64 {
        let v = coordinate::branch(wave, region, r, p);
        match (wave, region) {
            (Wave::D, Region::Middle) => self.middle_w_scale * v,
            _ => v,
        }
    }

    pub fn u(&self, r: f64, p: &ModelParams) -> f64 {
        self.eval(Wave::S, region_of(r, p), r, p)
    }

    pub fn w(&self, r: f64, p: &ModelParams) -> f64 {
        self.eval(Wave::D, region_of(r, p), r, p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_fm: Option<f64>,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(
        check: &str,
        quantity: impl Into<String>,
        r_fm: Option<f64>,
        deviation: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            check: check.to_string(),
            quantity: quantity.into(),
            r_fm,
            deviation,
            tolerance,
            // NaN deviations fail
            passed: deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl ValidationReport {
    fn from_checks(checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self { checks, passed }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn max_deviation(&self, check: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.check == check)
            .map(|c| c.deviation)
            .fold(0.0, f64::max)
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Boundaries between analytic branches with the regions on either side.
pub fn boundaries(p: &ModelParams) -> Vec<(Region, Region, f64)> {
    let mut out = Vec::new();
    if !p.is_equal_range() {
        out.push((Region::Inner, Region::Middle, p.inner_edge()));
    }
    out.push((Region::Middle, Region::Outer, p.outer_edge()));
    out
}

fn wave_name(wave: Wave) -> &'static str {
    match wave {
        Wave::S => "u",
        Wave::D => "w",
    }
}

pub fn continuity_checks(
    p: &ModelParams,
    branches: &Branches,
    tol: &Tolerances,
) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (left, right, r) in boundaries(p) {
        for wave in [Wave::S, Wave::D] {
            let a = branches.eval(wave, left, r, p);
            let b = branches.eval(wave, right, r, p);
            out.push(CheckResult::new(
                "continuity",
                format!("{} {left}|{right}", wave_name(wave)),
                Some(r),
                relative_deviation(a, b),
                tol.continuity,
            ));
        }
    }
    out
}

pub fn derivative_checks(
    p: &ModelParams,
    branches: &Branches,
    tol: &Tolerances,
) -> Vec<CheckResult> {
    let h = coordinate::DERIVATIVE_STEP;
    let mut out = Vec::new();
    for (left, right, r) in boundaries(p) {
        // the middle branch varies on the scale of the inner region's width
        let h = if left == Region::Inner {
            h.min(r / 50.0)
        } else {
            h
        };
        for wave in [Wave::S, Wave::D] {
            let dl = differentiate_one_sided(|s| branches.eval(wave, left, s, p), r, h, Side::Left);
            let dr =
                differentiate_one_sided(|s| branches.eval(wave, right, s, p), r, h, Side::Right);
            out.push(CheckResult::new(
                "derivative",
                format!("d{}/dr {left}|{right}", wave_name(wave)),
                Some(r),
                relative_deviation(dl, dr),
                tol.derivative,
            ));
        }
    }
    out
}

pub fn transform_checks(
    p: &ModelParams,
    branches: &Branches,
    tol: &Tolerances,
    r_grid: &[f64],
) -> Result<Vec<CheckResult>, ValidationError> {
    let report = validate_transforms_with(
        p,
        r_grid,
        &TransformOptions::default(),
        |r, p| branches.u(r, p),
        |r, p| branches.w(r, p),
    )?;
    let mut out = Vec::new();
    for pt in &report.points {
        out.push(CheckResult::new(
            "transform",
            "u",
            Some(pt.r),
            pt.dev_u,
            tol.transform,
        ));
        out.push(CheckResult::new(
            "transform",
            "w",
            Some(pt.r),
            pt.dev_w,
            tol.transform,
        ));
    }
    Ok(out)
}

/// `(∫u² dr, ∫w² dr)` over the branch set.
pub fn coordinate_norms(
    p: &ModelParams,
    branches: &Branches,
) -> Result<(f64, f64), ObservablesError> {
    let scheme = coordinate_scheme(p, DEFAULT_PANEL_ORDER)?;
    let s = integrate_panels(|r| branches.u(r, p).powi(2), &scheme)?;
    let d = integrate_panels(|r| branches.w(r, p).powi(2), &scheme)?;
    Ok((s, d))
}

pub fn parseval_checks(
    p: &ModelParams,
    branches: &Branches,
    tol: &Tolerances,
) -> Result<Vec<CheckResult>, ValidationError> {
    let (rs, rd) = coordinate_norms(p, branches)?;
    let (ks, kd) = (prob_s_numeric(p)?, prob_d_numeric(p)?);
    Ok(vec![
        CheckResult::new("parseval", "P_S", None, (rs - ks).abs(), tol.parseval),
        CheckResult::new("parseval", "P_D", None, (rd - kd).abs(), tol.parseval),
    ])
}

/// Closed forms exist only for equal ranges; returns no checks otherwise.
pub fn closed_numeric_checks(
    p: &ModelParams,
    tol: &Tolerances,
) -> Result<Vec<CheckResult>, ValidationError> {
    if !p.is_equal_range() {
        return Ok(Vec::new());
    }
    let s = relative_deviation(prob_s_closed(p)?, prob_s_numeric(p)?);
    let d = relative_deviation(prob_d_closed(p)?, prob_d_numeric(p)?);
    Ok(vec![
        CheckResult::new("closed_vs_numeric", "P_S", None, s, tol.closed_numeric_s),
        CheckResult::new("closed_vs_numeric", "P_D", None, d, tol.closed_numeric_d),
    ])
}

/// Runs every check.
pub fn validate(
    p: &ModelParams,
    branches: &Branches,
    tol: &Tolerances,
) -> Result<ValidationReport, ValidationError> {
    let mut checks = continuity_checks(p, branches, tol);
    checks.extend(derivative_checks(p, branches, tol));
    checks.extend(transform_checks(p, branches, tol, &DEFAULT_R_GRID)?);
    checks.extend(parseval_checks(p, branches, tol)?);
    checks.extend(closed_numeric_checks(p, tol)?);
    Ok(ValidationReport::from_checks(checks))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    /// `max |Δu| / max |u|` over the grid.
    pub sup_relative_u: f64,
    pub sup_relative_w: f64,
    /// Largest pointwise relative deviation and where it occurs.
    pub pointwise_u: (f64, f64),
    pub pointwise_w: (f64, f64),
}

/// Compares the unequal-range formulas at `(b, b + offset)` with the
/// equal-range formulas at the mean range `b + offset/2` on `rs`.
pub fn range_limit_deviation(
    b: f64,
    offset: f64,
    alpha: f64,
    norm_s: f64,
    norm_d: f64,
    rs: &[f64],
) -> Result<LimitReport, ObservablesError> {
    let general = ModelParams::new(b, b + offset, alpha, norm_s, norm_d)?;
    let equal = ModelParams::equal_range(general.range(), alpha, norm_s, norm_d)?;
    let (mut du, mut dw, mut mu, mut mw) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut pu, mut pw) = ((0.0, 0.0), (0.0, 0.0));
    for &r in rs {
        let (ug, ue) = (
            coordinate::u_coordinate(r, &general),
            coordinate::u_coordinate(r, &equal),
        );
        let (wg, we) = (
            coordinate::w_coordinate(r, &general),
            coordinate::w_coordinate(r, &equal),
        );
        du = du.max((ug - ue).abs());
        dw = dw.max((wg - we).abs());
        mu = mu.max(ue.abs());
        mw = mw.max(we.abs());
        let (ru, rw) = (relative_deviation(ug, ue), relative_deviation(wg, we));
        if ru > pu.0 {
            pu = (ru, r);
        }
        if rw > pw.0 {
            pw = (rw, r);
        }
    }
    let ratio = |d: f64, m: f64| if m == 0.0 { 0.0 } else { d / m };
    Ok(LimitReport {
        sup_relative_u: ratio(du, mu),
        sup_relative_w: ratio(dw, mw),
        pointwise_u: pu,
        pointwise_w: pw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{normalized_params, reference_params, Shape};

    fn unequal() -> ModelParams {
        normalized_params(
            &Shape {
                b1: 1.0,
                b2: 2.0,
                alpha: 0.23165,
            },
            3.0,
        )
        .unwrap()
    }

    #[test]
    fn exact_branches_pass() {
        for p in [reference_params(), unequal()] {
            let rep = validate(&p, &Branches::EXACT, &Tolerances::default()).unwrap();
            assert!(rep.passed, "{:#?}", rep.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn corrupted_middle_branch_is_caught() {
        let p = reference_params();
        let bad = Branches::with_middle_w_scaled(1.0 + 1e-3);
        let checks = continuity_checks(&p, &bad, &Tolerances::default());
        let w = checks.iter().find(|c| c.quantity.starts_with('w')).unwrap();
        assert!(!w.passed);
        assert!((w.deviation - 1e-3).abs() < 1e-5);
        assert!(checks
            .iter()
            .filter(|c| c.quantity.starts_with('u'))
            .all(|c| c.passed));
    }

    #[test]
    fn equal_range_has_one_boundary() {
        assert_eq!(boundaries(&reference_params()).len(), 1);
        assert_eq!(boundaries(&unequal()).len(), 2);
        assert!(closed_numeric_checks(&unequal(), &Tolerances::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn relative_deviation_edge_cases() {
        assert_eq!(relative_deviation(0.0, 0.0), 0.0);
        assert_eq!(relative_deviation(1.0, -1.0), 2.0);
        assert!(!CheckResult::new("x", "y", None, f64::NAN, 1.0).passed);
    }

    #[test]
    fn nearly_equal_ranges_approach_equal_range_formulas() {
        let p = reference_params();
        let rs: Vec<f64> = (1..=1200).map(|i| i as f64 * 0.01).collect();
        let rep =
            range_limit_deviation(1.475, 1e-4, p.alpha(), p.norm_s(), p.norm_d(), &rs).unwrap();
        assert!(rep.sup_relative_u < 1e-6, "{rep:?}");
        assert!(rep.sup_relative_w < 1e-6, "{rep:?}");
    }
}
