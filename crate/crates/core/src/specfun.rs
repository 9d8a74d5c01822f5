//! Spherical Bessel functions `j_l` and modified spherical Bessel functions
//! `i_l`, `k_l` for `l = 0, 1, 2`.
//!
//! The closed forms of `j_1`, `j_2`, `i_1` and `i_2` are differences of
//! nearly equal terms when the argument is small. Below
//! [`SpecialFunctionPolicy::small_arg_threshold`] the ascending series
//!
//! ```text
//! j_l(x) = x^l Σ_m (-x²/2)^m / (m! (2l+2m+1)!!)
//! i_l(x) = x^l Σ_m ( x²/2)^m / (m! (2l+2m+1)!!)
//! ```
//!
//! is summed instead. `k_l` has no cancellation and is always evaluated in
//! closed form.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFunctionError {
    #[error("unsupported order l = {0}; only l in {{0, 1, 2}} is implemented")]
    Order(u32),
    #[error("argument {x} outside the domain of {function}")]
    Domain { function: &'static str, x: f64 },
}

/// Switch point between ascending series and closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFunctionPolicy {
    pub small_arg_threshold: f64,
    pub series_terms: usize,
}

impl SpecialFunctionPolicy {
    pub const DEFAULT: Self = Self {
        small_arg_threshold: 1.0,
        series_terms: 12,
    };
}

impl Default for SpecialFunctionPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

const POLICY: SpecialFunctionPolicy = SpecialFunctionPolicy::DEFAULT;

/// Ascending series shared by `j_l` (`sign = -1`) and `i_l` (`sign = +1`).
pub(crate) fn ascending_series(l: u32, x: f64, sign: f64, terms: usize) -> f64 {
    let half_x2 = sign * 0.5 * x * x;
    // (2l+1)!!
    let mut double_fact = 1.0;
    for k in 1..=l {
        double_fact *= (2 * k + 1) as f64;
    }
    let mut term = 1.0 / double_fact;
    let mut sum = term;
    for m in 1..terms {
        term *= half_x2 / (m as f64 * (2 * (l as usize + m) + 1) as f64);
        sum += term;
    }
    x.powi(l as i32) * sum
}

#[inline]
fn use_series(x: f64) -> bool {
    x.abs() < POLICY.small_arg_threshold
}

pub fn j0(x: f64) -> f64 {
    if use_series(x) {
        ascending_series(0, x, -1.0, POLICY.series_terms)
    } else {
        x.sin() / x
    }
}

pub fn j1(x: f64) -> f64 {
    if use_series(x) {
        ascending_series(1, x, -1.0, POLICY.series_terms)
    } else {
        let (s, c) = x.sin_cos();
        (s / x - c) / x
    }
}

pub fn j2(x: f64) -> f64 {
    if use_series(x) {
        ascending_series(2, x, -1.0, POLICY.series_terms)
    } else {
        let (s, c) = x.sin_cos();
        ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x) / x
    }
}

pub fn i0(x: f64) -> f64 {
    if use_series(x) {
        ascending_series(0, x, 1.0, POLICY.series_terms)
    } else {
        x.sinh() / x
    }
}

pub fn i1(x: f64) -> f64 {
    if use_series(x) {
        ascending_series(1, x, 1.0, POLICY.series_terms)
    } else {
        (x * x.cosh() - x.sinh()) / (x * x)
    }
}

pub fn i2(x: f64) -> f64 {
    if use_series(x) {
        ascending_series(2, x, 1.0, POLICY.series_terms)
    } else {
        ((x * x + 3.0) * x.sinh() - 3.0 * x * x.cosh()) / (x * x * x)
    }
}

pub fn k0(x: f64) -> f64 {
    (-x).exp() / x
}

pub fn k1(x: f64) -> f64 {
    (-x).exp() * (x + 1.0) / (x * x)
}

pub fn k2(x: f64) -> f64 {
    (-x).exp() * (x * x + 3.0 * x + 3.0) / (x * x * x)
}

fn check_order(l: u32) -> Result<(), SpecialFunctionError> {
    if l > 2 {
        Err(SpecialFunctionError::Order(l))
    } else {
        Ok(())
    }
}

/// Spherical Bessel function of the first kind, `j_l(x)`.
pub fn sph_bessel_j(l: u32, x: f64) -> Result<f64, SpecialFunctionError> {
    check_order(l)?;
    if !x.is_finite() || x < 0.0 {
        return Err(SpecialFunctionError::Domain { function: "j_l", x });
    }
    Ok(match l {
        0 => j0(x),
        1 => j1(x),
        _ => j2(x),
    })
}

/// Modified spherical Bessel function of the first kind, `i_l(x)`.
pub fn mod_sph_bessel_i(l: u32, x: f64) -> Result<f64, SpecialFunctionError> {
    check_order(l)?;
    if !x.is_finite() || x < 0.0 {
        return Err(SpecialFunctionError::Domain { function: "i_l", x });
    }
    Ok(match l {
        0 => i0(x),
        1 => i1(x),
        _ => i2(x),
    })
}

/// Modified spherical Bessel function of the second kind, `k_l(x)`; diverges at 0.
pub fn mod_sph_bessel_k(l: u32, x: f64) -> Result<f64, SpecialFunctionError> {
    check_order(l)?;
    if !x.is_finite() || x <= 0.0 {
        return Err(SpecialFunctionError::Domain { function: "k_l", x });
    }
    Ok(match l {
        0 => k0(x),
        1 => k1(x),
        _ => k2(x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn closed_j(l: u32, x: f64) -> f64 {
        let (s, c) = x.sin_cos();
        match l {
            0 => s / x,
            1 => (s / x - c) / x,
            _ => ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x) / x,
        }
    }

    fn closed_i(l: u32, x: f64) -> f64 {
        match l {
            0 => x.sinh() / x,
            1 => (x * x.cosh() - x.sinh()) / (x * x),
            _ => ((x * x + 3.0) * x.sinh() - 3.0 * x * x.cosh()) / (x * x * x),
        }
    }

    #[test]
    fn limiting_values_at_zero() {
        assert_eq!(sph_bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(sph_bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(sph_bessel_j(2, 0.0).unwrap(), 0.0);
        assert_eq!(mod_sph_bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(mod_sph_bessel_i(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        // 30-digit mpmath evaluations
        assert_relative_eq!(
            sph_bessel_j(2, 1.0).unwrap(),
            0.062035052011373861,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            mod_sph_bessel_i(0, 0.342).unwrap(),
            1.0196083228142183,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            mod_sph_bessel_k(2, 0.342).unwrap(),
            73.570571311259460,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            mod_sph_bessel_k(1, 1.0).unwrap(),
            2.0 * (-1.0f64).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn leading_series_of_i2() {
        for &x in &[1e-3, 1e-5, 1e-8] {
            assert_relative_eq!(i2(x), x * x / 15.0, max_relative = x * x);
        }
    }

    #[test]
    fn k0_identity() {
        for &x in &[1e-3f64, 0.1, 1.0, 7.5, 40.0] {
            assert_relative_eq!(x * x.exp() * k0(x), 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn series_truncation_below_machine_epsilon_at_threshold() {
        let x = POLICY.small_arg_threshold;
        for l in 0..=2 {
            let n = POLICY.series_terms;
            let tail = ascending_series(l, x, 1.0, n + 20) - ascending_series(l, x, 1.0, n);
            let value = ascending_series(l, x, 1.0, n + 20);
            assert!(tail.abs() / value < f64::EPSILON / 2.0, "l={l}");
        }
    }

    #[test]
    fn continuity_across_series_switch() {
        let t = POLICY.small_arg_threshold;
        for i in -20..=20 {
            let x = t * (1.0 + i as f64 * 5e-3);
            for l in 0..=2 {
                let sj = ascending_series(l, x, -1.0, 30);
                let si = ascending_series(l, x, 1.0, 30);
                assert_relative_eq!(closed_j(l, x), sj, max_relative = 1e-13);
                assert_relative_eq!(closed_i(l, x), si, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            sph_bessel_j(3, 1.0),
            Err(SpecialFunctionError::Order(3))
        ));
        assert!(sph_bessel_j(0, f64::NAN).is_err());
        assert!(sph_bessel_j(1, f64::INFINITY).is_err());
        assert!(mod_sph_bessel_i(2, -1.0).is_err());
        assert!(mod_sph_bessel_k(0, 0.0).is_err());
        assert!(mod_sph_bessel_k(2, -0.5).is_err());
    }

    #[test]
    fn wronskian_identity() {
        for i in 1..=1000 {
            let x = i as f64 * 0.01;
            let lhs = i0(x) * k1(x) + i1(x) * k0(x);
            assert_relative_eq!(lhs, 1.0 / (x * x), max_relative = 1e-12);
        }
    }

    #[test]
    fn monotonicity() {
        let mut prev = [i0(1e-3), i1(1e-3), i2(1e-3), k0(1e-3), k1(1e-3), k2(1e-3)];
        for i in 2..=10_000 {
            let x = i as f64 * 1e-3;
            let cur = [i0(x), i1(x), i2(x), k0(x), k1(x), k2(x)];
            for l in 0..3 {
                assert!(cur[l] > prev[l], "i_{l} not increasing at {x}");
                assert!(cur[l + 3] < prev[l + 3], "k_{l} not decreasing at {x}");
            }
            prev = cur;
        }
    }
}
