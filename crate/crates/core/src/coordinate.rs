//! Coordinate-space S- and D-state wavefunctions `u(r)`, `w(r)`.
//!
//! Each wavefunction is analytic on three regions separated at
//! `r = b2 - b1` and `r = b1 + b2`, with a different closed form on each.
//! With equal ranges the inner region is empty and the dedicated
//! equal-range forms are used.
//!
//! Branch functions take the region explicitly and evaluate that region's
//! formula at any `r`, which is what the boundary-continuity checks need.
//!
//! Notation below: `x = αr`, `β_i = α b_i`, `δ = β2 - β1`, `σ = β1 + β2`.

use serde::{Deserialize, Serialize};

use crate::model::{region_of, ModelParams, Region};
use crate::quadrature::{differentiate, differentiate_one_sided, Side};
use crate::specfun::{i0, i1, i2, k1, k2};

/// Base step (fm) for numerical derivatives.
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// Below this `x = αr` the middle-region D-state bracket is summed as a
/// series instead of the closed form, whose individual terms carry `1/x²`
/// poles that cancel.
pub const MIDDLE_SERIES_X: f64 = 1.5;

const SERIES_MAX_TERMS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSample {
    pub r: f64,
    pub u: f64,
    pub w: f64,
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    S,
    D,
}

/// `R(x)/x²` where `R(x) = e^{-x}(x² + 3x + 3) - 3 + x²/2`, i.e. `x·k2(x)`
/// with its two singular/constant leading terms removed:
/// `x·k2(x) = 3/x² - 1/2 + R(x)/x²`.
fn k2_remainder_over_x2(x: f64) -> f64 {
    // R(x) = Σ_{n≥4} c_n x^n, c_n = (-1)^n [3/n! - 3/(n-1)! + 1/(n-2)!]
    let mut inv_fact_n_minus_2 = 0.5; // 1/2!
    let mut inv_fact_n_minus_1 = 1.0 / 6.0;
    let mut inv_fact_n = 1.0 / 24.0;
    let mut x_pow = x * x; // x^{n-2}
    let mut sign = 1.0;
    let mut sum = 0.0;
    for n in 4..SERIES_MAX_TERMS {
        let c = sign * (3.0 * inv_fact_n - 3.0 * inv_fact_n_minus_1 + inv_fact_n_minus_2);
        let term = c * x_pow;
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() && n > 6 {
            break;
        }
        let next = (n + 1) as f64;
        inv_fact_n_minus_2 = inv_fact_n_minus_1;
        inv_fact_n_minus_1 = inv_fact_n;
        inv_fact_n /= next;
        x_pow *= x;
        sign = -sign;
    }
    sum
}

/// Coefficients `C`, `D` of the rearranged middle-region bracket, as power
/// series in `δ` with `p = β1 β2`:
///
/// `C = 24P - 3[(β2²-β1²)² + 4(β1²+β2²) - 8]
///    = p δ⁴ + Σ_{m≥3} 24[(p-1)/(2m)! + 1/(2m-1)!] δ^{2m}`
///
/// `D = 2(β1²+β2²) - 4 - 4P
///    = -2p δ² - Σ_{m≥2} 4[(p-1)/(2m)! + 1/(2m-1)!] δ^{2m}`
fn middle_bracket_constants(p: f64, delta: f64) -> (f64, f64) {
    let d2 = delta * delta;
    let mut c = p * d2 * d2;
    let mut d = -2.0 * p * d2;
    // m = 2 term of D
    let mut inv_fact_2m_minus_1 = 1.0 / 6.0; // 1/3!
    let mut inv_fact_2m = 1.0 / 24.0; // 1/4!
    let mut pow = d2 * d2;
    d -= 4.0 * ((p - 1.0) * inv_fact_2m + inv_fact_2m_minus_1) * pow;
    for m in 3..SERIES_MAX_TERMS {
        let two_m = (2 * m) as f64;
        inv_fact_2m_minus_1 = inv_fact_2m / (two_m - 1.0);
        inv_fact_2m = inv_fact_2m_minus_1 / two_m;
        pow *= d2;
        let k = ((p - 1.0) * inv_fact_2m + inv_fact_2m_minus_1) * pow;
        c += 24.0 * k;
        d -= 4.0 * k;
        if k.abs() <= f64::EPSILON * 1e-3 * (c.abs() + d.abs()) {
            break;
        }
    }
    (c, d)
}

/// Closed forms for arbitrary `b2 >= b1`.
pub mod general {
    use super::*;

    pub fn u_inner(r: f64, p: &ModelParams) -> f64 {
        let a = p.alpha();
        let x = a * r;
        p.norm_s() * i0(a * p.b1()) * crate::specfun::k0(a * p.b2()) * x * i0(x)
    }

    pub fn u_middle(r: f64, p: &ModelParams) -> f64 {
        let a = p.alpha();
        let (b1, b2) = (a * p.b1(), a * p.b2());
        let (delta, sigma) = (b2 - b1, b1 + b2);
        let x = a * r;
        // 1 - cosh(δ) e^{-x} = -expm1(-x) - (cosh δ - 1) e^{-x}
        let sh = (0.5 * delta).sinh();
        let bracket = -(-x).exp_m1() - 2.0 * sh * sh * (-x).exp() - (-sigma).exp() * x.sinh();
        p.norm_s() / (2.0 * b1 * b2) * bracket
    }

    pub fn u_outer(r: f64, p: &ModelParams) -> f64 {
        let a = p.alpha();
        p.norm_s() * i0(a * p.b1()) * i0(a * p.b2()) * (-a * r).exp()
    }

    /// Inner-region D state. The overall sign is negative: this is the
    /// form that matches the Fourier–Bessel transform of `w(k)` and joins
    /// the middle region continuously at `r = b2 - b1`.
    pub fn w_inner(r: f64, p: &ModelParams) -> f64 {
        let a = p.alpha();
        let x = a * r;
        -p.norm_d() * i1(a * p.b1()) * k1(a * p.b2()) * x * i2(x)
    }

    /// Middle-region bracket (the quantity in braces, without the
    /// `B / (16 β1² β2²)` prefactor), evaluated term by term as written.
    pub fn w_middle_bracket_direct(x: f64, beta1: f64, beta2: f64) -> f64 {
        let (delta, sigma) = (beta2 - beta1, beta1 + beta2);
        let sum_sq = beta1 * beta1 + beta2 * beta2;
        let diff_sq = beta2 * beta2 - beta1 * beta1;
        let prod = beta1 * beta2;
        let pk = (prod - 1.0) * delta.cosh() + delta * delta.sinh();
        let t = (-sigma).exp() * (prod + sigma + 1.0);
        2.0 * sum_sq - 4.0 - 3.0 / (x * x) * (diff_sq * diff_sq + 4.0 * sum_sq - 8.0)
            + x * x
            + 8.0 * x * k2(x) * pk
            - 8.0 * x * i2(x) * t
    }

    /// Same bracket rearranged as `C/x² + D + x² + 8P·R(x)/x² - 8T·x·i2(x)`
    /// with the pole coefficients `C`, `D` summed as series in `δ`.
    pub fn w_middle_bracket_series(x: f64, beta1: f64, beta2: f64) -> f64 {
        let (delta, sigma) = (beta2 - beta1, beta1 + beta2);
        let prod = beta1 * beta2;
        let pk = (prod - 1.0) * delta.cosh() + delta * delta.sinh();
        let t = (-sigma).exp() * (prod + sigma + 1.0);
        let (c, d) = middle_bracket_constants(prod, delta);
        let pole = if c == 0.0 { 0.0 } else { c / (x * x) };
        pole + d + x * x + 8.0 * pk * k2_remainder_over_x2(x) - 8.0 * t * x * i2(x)
    }

    pub fn w_middle(r: f64, p: &ModelParams) -> f64 {
        let a = p.alpha();
        let (b1, b2) = (a * p.b1(), a * p.b2());
        let x = a * r;
        let bracket = if x.abs() < MIDDLE_SERIES_X {
            w_middle_bracket_series(x, b1, b2)
        } else {
            w_middle_bracket_direct(x, b1, b2)
        };
        p.norm_d() / (16.0 * b1 * b1 * b2 * b2) * bracket
    }

    pub fn w_outer(r: f64, p: &ModelParams) -> f64 {
        let a = p.alpha();
        let x = a * r;
        p.norm_d() * i1(a * p.b1()) * i1(a * p.b2()) * x * k2(x)
    }
}

/// Closed forms for `b1 = b2 = b`, with `b` the mean range of `p`.
pub mod equal {
    use super::*;

    pub fn u_middle(r: f64, p: &ModelParams) -> f64 {
        let beta = p.alpha() * p.range();
        let x = p.alpha() * r;
        let bracket = -(-x).exp_m1() - (-2.0 * beta).exp() * x.sinh();
        p.norm_s() / (2.0 * beta * beta) * bracket
    }

    pub fn u_outer(r: f64, p: &ModelParams) -> f64 {
        let beta = p.alpha() * p.range();
        let i = i0(beta);
        p.norm_s() * i * i * (-p.alpha() * r).exp()
    }

    pub fn w_middle_bracket_direct(x: f64, beta: f64) -> f64 {
        let s = 1.0 - beta * beta;
        let t = (1.0 + beta) * (1.0 + beta) * (-2.0 * beta).exp();
        -4.0 * s + x * x + 24.0 * s / (x * x) - 8.0 * s * x * k2(x) - 8.0 * t * x * i2(x)
    }

    /// `x² - 8(1-β²)·R(x)/x² - 8(1+β)² e^{-2β}·x·i2(x)`, the direct bracket
    /// with its `1/x²` and constant terms cancelled analytically.
    pub fn w_middle_bracket_series(x: f64, beta: f64) -> f64 {
        let s = 1.0 - beta * beta;
        let t = (1.0 + beta) * (1.0 + beta) * (-2.0 * beta).exp();
        x * x - 8.0 * s * k2_remainder_over_x2(x) - 8.0 * t * x * i2(x)
    }

    pub fn w_middle(r: f64, p: &ModelParams) -> f64 {
        let beta = p.alpha() * p.range();
        let x = p.alpha() * r;
        let bracket = if x.abs() < MIDDLE_SERIES_X {
            w_middle_bracket_series(x, beta)
        } else {
            w_middle_bracket_direct(x, beta)
        };
        let b4 = beta * beta * beta * beta;
        p.norm_d() / (16.0 * b4) * bracket
    }

    pub fn w_outer(r: f64, p: &ModelParams) -> f64 {
        let beta = p.alpha() * p.range();
        let i = i1(beta);
        let x = p.alpha() * r;
        p.norm_d() * i * i * x * k2(x)
    }
}

/// Formula of `region` for the S state, evaluated at `r`.
pub fn u_branch(region: Region, r: f64, p: &ModelParams) -> f64 {
    match (region, p.is_equal_range()) {
        (Region::Inner, _) => general::u_inner(r, p),
        (Region::Middle, true) => equal::u_middle(r, p),
        (Region::Middle, false) => general::u_middle(r, p),
        (Region::Outer, true) => equal::u_outer(r, p),
        (Region::Outer, false) => general::u_outer(r, p),
    }
}

/// Formula of `region` for the D state, evaluated at `r`.
pub fn w_branch(region: Region, r: f64, p: &ModelParams) -> f64 {
    match (region, p.is_equal_range()) {
        (Region::Inner, _) => general::w_inner(r, p),
        (Region::Middle, true) => equal::w_middle(r, p),
        (Region::Middle, false) => general::w_middle(r, p),
        (Region::Outer, true) => equal::w_outer(r, p),
        (Region::Outer, false) => general::w_outer(r, p),
    }
}

pub fn branch(wave: Wave, region: Region, r: f64, p: &ModelParams) -> f64 {
    match wave {
        Wave::S => u_branch(region, r, p),
        Wave::D => w_branch(region, r, p),
    }
}

/// S-state reduced wavefunction `u(r)` (fm^(-1/2)).
pub fn u_coordinate(r: f64, p: &ModelParams) -> f64 {
    u_branch(region_of(r, p), r, p)
}

/// D-state reduced wavefunction `w(r)` (fm^(-1/2)).
pub fn w_coordinate(r: f64, p: &ModelParams) -> f64 {
    w_branch(region_of(r, p), r, p)
}

pub fn sample(r: f64, p: &ModelParams) -> RadialSample {
    let region = region_of(r, p);
    RadialSample {
        r,
        u: u_branch(region, r, p),
        w: w_branch(region, r, p),
        region,
    }
}

/// Closed interval of `r` covered by `region`.
pub fn region_interval(region: Region, p: &ModelParams) -> (f64, f64) {
    match region {
        Region::Inner => (0.0, p.inner_edge()),
        Region::Middle if p.is_equal_range() => (0.0, p.outer_edge()),
        Region::Middle => (p.inner_edge(), p.outer_edge()),
        Region::Outer => (p.outer_edge(), f64::INFINITY),
    }
}

/// Derivative of one branch at `r`, with a stencil that stays inside that
/// branch's region: central where `[r - h, r + h]` fits, otherwise one-sided.
pub fn branch_derivative(wave: Wave, region: Region, r: f64, p: &ModelParams) -> f64 {
    let h = DERIVATIVE_STEP;
    let (lo, hi) = region_interval(region, p);
    let f = |s: f64| branch(wave, region, s, p);
    if r - h >= lo && r + h <= hi {
        differentiate(f, r, h)
    } else if r + 2.0 * h <= hi {
        differentiate_one_sided(f, r, h, Side::Right)
    } else {
        differentiate_one_sided(f, r, h, Side::Left)
    }
}

/// One-sided derivative of the branch on the given side of `r`.
pub fn branch_derivative_from(
    wave: Wave,
    region: Region,
    r: f64,
    side: Side,
    p: &ModelParams,
) -> f64 {
    differentiate_one_sided(|s| branch(wave, region, s, p), r, DERIVATIVE_STEP, side)
}

pub fn du_dr(r: f64, p: &ModelParams) -> f64 {
    branch_derivative(Wave::S, region_of(r, p), r, p)
}

pub fn dw_dr(r: f64, p: &ModelParams) -> f64 {
    branch_derivative(Wave::D, region_of(r, p), r, p)
}

/// Uniform grid `r_min, r_min + step, ...` up to `r_max` inclusive.
pub fn radial_grid(r_min: f64, r_max: f64, step: f64) -> Vec<f64> {
    let n = ((r_max - r_min) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| r_min + i as f64 * step).collect()
}

pub fn sample_grid(rs: &[f64], p: &ModelParams) -> Vec<RadialSample> {
    rs.iter().map(|&r| sample(r, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> ModelParams {
        ModelParams::equal_range(1.475, 0.23165, 0.9049555173212225, 1.5674289345901346).unwrap()
    }

    fn unequal() -> ModelParams {
        ModelParams::new(1.0, 2.0, 0.23165, 1.0, 1.0).unwrap()
    }

    #[test]
    fn origin() {
        let p = reference();
        assert_eq!(u_coordinate(0.0, &p), 0.0);
        assert_eq!(w_coordinate(0.0, &p), 0.0);
        assert_eq!(u_coordinate(0.0, &unequal()), 0.0);
        assert_eq!(w_coordinate(0.0, &unequal()), 0.0);
    }

    #[test]
    fn value_at_twice_range() {
        let p = reference();
        let beta = p.alpha() * p.range();
        let expected = p.norm_s() * (1.0 - (-2.0 * beta).exp()).powi(2) / (4.0 * beta * beta);
        let r = 2.0 * p.range();
        assert_relative_eq!(equal::u_middle(r, &p), expected, max_relative = 1e-14);
        assert_relative_eq!(equal::u_outer(r, &p), expected, max_relative = 1e-14);
        // 60-digit evaluation with the solved normalization
        assert_relative_eq!(
            u_coordinate(r, &p),
            0.47498531444916630,
            max_relative = 1e-13
        );
    }

    #[test]
    fn series_matches_direct_bracket_where_both_are_accurate() {
        for &(b1, b2) in &[(0.342, 0.342), (0.2317, 0.4633), (0.18, 0.26), (0.5, 0.9)] {
            for i in 0..=40 {
                let x = 0.6 + i as f64 * 0.04;
                let s = general::w_middle_bracket_series(x, b1, b2);
                let d = general::w_middle_bracket_direct(x, b1, b2);
                assert_relative_eq!(s, d, max_relative = 1e-10, epsilon = 1e-14);
            }
        }
        for i in 0..=40 {
            let x = 0.6 + i as f64 * 0.04;
            let s = equal::w_middle_bracket_series(x, 0.342);
            let d = equal::w_middle_bracket_direct(x, 0.342);
            assert_relative_eq!(s, d, max_relative = 1e-11);
        }
    }

    #[test]
    fn equal_range_bracket_is_the_zero_offset_general_bracket() {
        for i in 1..=60 {
            let x = i as f64 * 0.05;
            let e = equal::w_middle_bracket_series(x, 0.342);
            let g = general::w_middle_bracket_series(x, 0.342, 0.342);
            assert_relative_eq!(e, g, max_relative = 1e-14);
        }
    }

    #[test]
    fn small_r_power_laws() {
        // unequal ranges: inner region, w ~ r³
        let p = unequal();
        let (r1, r2) = (1e-3, 2e-3);
        let ratio = w_coordinate(r2, &p) / w_coordinate(r1, &p);
        assert_relative_eq!(ratio, 8.0, max_relative = 1e-5);
        // equal ranges: middle region reaches the origin, w ~ β² B/(16β⁴) x²
        let q = reference();
        let beta = q.alpha() * q.range();
        let r = 1e-4;
        let x = q.alpha() * r;
        let leading = q.norm_d() / (16.0 * beta.powi(4)) * beta * beta * x * x;
        assert_relative_eq!(w_coordinate(r, &q), leading, max_relative = 1e-4);
        assert!(w_coordinate(1e-6, &q).is_finite());
    }

    #[test]
    fn outer_asymptotics() {
        let p = reference();
        let beta = p.alpha() * p.range();
        let a_s = p.norm_s() * i0(beta).powi(2);
        let a_d = p.norm_d() * i1(beta).powi(2);
        for &r in &[3.0, 5.0, 10.0, 20.0] {
            let x = p.alpha() * r;
            assert_relative_eq!(u_coordinate(r, &p) * x.exp(), a_s, max_relative = 1e-15);
            let w_asym = a_d * (-x).exp() * (1.0 + 3.0 / x + 3.0 / (x * x));
            assert_relative_eq!(w_coordinate(r, &p), w_asym, max_relative = 1e-14);
        }
    }

    #[test]
    fn branch_agreement_at_boundaries() {
        for p in [
            reference(),
            unequal(),
            ModelParams::new(0.8, 1.1, 0.23165, 1.0, 1.0).unwrap(),
        ] {
            let mut points = vec![(Region::Middle, Region::Outer, p.outer_edge())];
            if !p.is_equal_range() {
                points.push((Region::Inner, Region::Middle, p.inner_edge()));
            }
            for (left, right, r) in points {
                for wave in [Wave::S, Wave::D] {
                    let a = branch(wave, left, r, &p);
                    let b = branch(wave, right, r, &p);
                    assert_relative_eq!(a, b, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn derivative_near_origin() {
        let p = reference();
        let beta = p.alpha() * p.range();
        let expected = p.alpha() * (1.0 - (-2.0 * beta).exp()) * p.norm_s() / (2.0 * beta * beta);
        assert_relative_eq!(du_dr(1e-9, &p), expected, max_relative = 1e-8);
    }

    #[test]
    fn derivative_matches_analytic_middle_branch() {
        let p = reference();
        let beta = p.alpha() * p.range();
        let a = p.alpha();
        let r = 1.0;
        let analytic = p.norm_s() / (2.0 * beta * beta)
            * a
            * ((-a * r).exp() - (-2.0 * beta).exp() * (a * r).cosh());
        assert_relative_eq!(du_dr(r, &p), analytic, max_relative = 1e-8);
    }

    #[test]
    fn one_sided_derivatives_match_at_boundaries() {
        for p in [reference(), unequal()] {
            let r = p.outer_edge();
            for wave in [Wave::S, Wave::D] {
                let l = branch_derivative_from(wave, Region::Middle, r, Side::Left, &p);
                let rr = branch_derivative_from(wave, Region::Outer, r, Side::Right, &p);
                assert_relative_eq!(l, rr, max_relative = 1e-8);
            }
        }
        let p = unequal();
        let l = branch_derivative_from(Wave::D, Region::Inner, 1.0, Side::Left, &p);
        let r = branch_derivative_from(Wave::D, Region::Middle, 1.0, Side::Right, &p);
        // 50-digit mpmath derivative of both branches
        assert_relative_eq!(l, -0.00083317868572971, max_relative = 1e-9);
        assert_relative_eq!(r, -0.00083317868572971, max_relative = 1e-9);
    }

    #[test]
    fn grid() {
        let g = radial_grid(0.0, 12.0, 0.05);
        assert_eq!(g.len(), 241);
        assert_eq!(*g.last().unwrap(), 12.0);
    }
}
