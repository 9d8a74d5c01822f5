//! Gauss–Legendre panel integration, truncated semi-infinite integrals and
//! Richardson-extrapolated finite differences.

use thiserror::Error;

use crate::compensated::NeumaierSum;

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 128;

/// Points per panel used for every r-space integral unless overridden.
pub const DEFAULT_PANEL_ORDER: usize = 40;

/// Truncation point of [`integrate_semi_infinite`], in units of the decay length.
pub const DECAY_LENGTHS: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("Gauss-Legendre order {0} outside [{MIN_ORDER}, {MAX_ORDER}]")]
    Order(usize),
    #[error("breakpoints must be finite and strictly increasing")]
    Breakpoints,
    #[error("invalid tail policy: {0}")]
    Tail(&'static str),
    #[error("integrand is not finite at x = {x} (value {value})")]
    NonFinite { x: f64, value: f64 },
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1], sorted
/// by increasing node.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre polynomial P_n(x) and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

impl GaussLegendre {
    pub fn new(n: usize) -> Result<Self, QuadratureError> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&n) {
            return Err(QuadratureError::Order(n));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        // roots are symmetric; solve for the positive half
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over `[a, b]` with the rule mapped linearly.
    pub fn integrate<F>(&self, a: f64, b: f64, f: F) -> Result<f64, QuadratureError>
    where
        F: Fn(f64) -> f64,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let x = mid + half * t;
            let value = f(x);
            if !value.is_finite() {
                return Err(QuadratureError::NonFinite { x, value });
            }
            acc += w * value;
        }
        Ok(half * acc)
    }
}

/// Nodes and weights of the n-point rule.
pub fn gauss_legendre_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    let rule = GaussLegendre::new(n)?;
    Ok((rule.nodes, rule.weights))
}

/// Handling of the integration range beyond the last breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// The last breakpoint is the end of the range.
    None,
    /// Continue with panels of `panel_width` up to `limit` and drop the rest.
    Truncate { limit: f64, panel_width: f64 },
    /// Map `[last, inf)` onto `[0, 1)` with `r = last + scale * t / (1 - t)`
    /// and integrate over `panels` equal panels in `t`.
    MapRational { scale: f64, panels: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureScheme {
    rule: GaussLegendre,
    breakpoints: Vec<f64>,
    tail: Tail,
}

impl QuadratureScheme {
    pub fn new(
        panel_order: usize,
        breakpoints: Vec<f64>,
        tail: Tail,
    ) -> Result<Self, QuadratureError> {
        let rule = GaussLegendre::new(panel_order)?;
        if breakpoints.len() < 2 && matches!(tail, Tail::None) || breakpoints.is_empty() {
            return Err(QuadratureError::Breakpoints);
        }
        if breakpoints.iter().any(|x| !x.is_finite())
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(QuadratureError::Breakpoints);
        }
        let last = *breakpoints.last().unwrap();
        match tail {
            Tail::None => {}
            Tail::Truncate { limit, panel_width } => {
                if !(limit > last) || !(panel_width > 0.0) || !limit.is_finite() {
                    return Err(QuadratureError::Tail(
                        "truncate needs limit > last breakpoint and panel_width > 0",
                    ));
                }
            }
            Tail::MapRational { scale, panels } => {
                if !(scale > 0.0) || panels == 0 || !scale.is_finite() {
                    return Err(QuadratureError::Tail(
                        "map_rational needs scale > 0 and at least one panel",
                    ));
                }
            }
        }
        Ok(Self {
            rule,
            breakpoints,
            tail,
        })
    }

    pub fn panel_order(&self) -> usize {
        self.rule.order()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Same panels with the Gauss–Legendre order changed.
    pub fn with_order(&self, panel_order: usize) -> Result<Self, QuadratureError> {
        Self::new(panel_order, self.breakpoints.clone(), self.tail)
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }
}

/// Sum of Gauss–Legendre panel integrals over consecutive breakpoints plus
/// the scheme's tail.
pub fn integrate_panels<F>(f: F, scheme: &QuadratureScheme) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let rule = &scheme.rule;
    let mut acc = NeumaierSum::new();
    for w in scheme.breakpoints.windows(2) {
        acc.add(rule.integrate(w[0], w[1], &f)?);
    }
    let last = *scheme.breakpoints.last().unwrap();
    match scheme.tail {
        Tail::None => {}
        Tail::Truncate { limit, panel_width } => {
            let n = ((limit - last) / panel_width).ceil().max(1.0) as usize;
            let width = (limit - last) / n as f64;
            for i in 0..n {
                let a = last + i as f64 * width;
                let b = if i + 1 == n { limit } else { a + width };
                acc.add(rule.integrate(a, b, &f)?);
            }
        }
        Tail::MapRational { scale, panels } => {
            let g = |t: f64| {
                let one_minus = 1.0 - t;
                let r = last + scale * t / one_minus;
                let v = f(r) * scale / (one_minus * one_minus);
                // the mapped integrand vanishes at t = 1 for any integrable decay
                if t >= 1.0 || (r.is_infinite() && v.is_nan()) {
                    0.0
                } else {
                    v
                }
            };
            let h = 1.0 / panels as f64;
            for i in 0..panels {
                acc.add(rule.integrate(i as f64 * h, (i + 1) as f64 * h, g)?);
            }
        }
    }
    Ok(acc.value())
}

/// Scheme for `∫_start^∞` of an integrand bounded by `C·poly(r)·exp(-decay·r)`:
/// truncated at `start + 40/decay`, panels one decay length wide. For the
/// exponentially decaying integrands used here (polynomial degree ≤ 4,
/// `decay ≥ 2α`) the discarded tail is below `1e-12` relative.
pub fn semi_infinite_scheme(
    start: f64,
    decay_alpha: f64,
    panel_order: usize,
) -> Result<QuadratureScheme, QuadratureError> {
    if !(decay_alpha > 0.0) || !decay_alpha.is_finite() {
        return Err(QuadratureError::Tail("decay rate must be positive"));
    }
    let width = 1.0 / decay_alpha;
    QuadratureScheme::new(
        panel_order,
        vec![start],
        Tail::Truncate {
            limit: start + DECAY_LENGTHS * width,
            panel_width: width,
        },
    )
}

pub fn integrate_semi_infinite<F>(
    f: F,
    start: f64,
    decay_alpha: f64,
) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_panels(
        f,
        &semi_infinite_scheme(start, decay_alpha, DEFAULT_PANEL_ORDER)?,
    )
}

/// Central difference with two levels of Richardson extrapolation
/// (steps `h0`, `h0/2`, `h0/4`); truncation error O(h0⁶).
pub fn differentiate<F>(f: F, x: f64, h0: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let (d0, d1, d2) = (d(h0), d(h0 / 2.0), d(h0 / 4.0));
    let e0 = (4.0 * d1 - d0) / 3.0;
    let e1 = (4.0 * d2 - d1) / 3.0;
    (16.0 * e1 - e0) / 15.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Stencil on `[x - 2h0, x]`.
    Left,
    /// Stencil on `[x, x + 2h0]`.
    Right,
}

/// One-sided second-order difference with three Richardson levels (steps
/// `h0` .. `h0/8`); truncation error O(h0⁵). Used where a central stencil
/// would cross a point at which the function is only once differentiable.
pub fn differentiate_one_sided<F>(f: F, x: f64, h0: f64, side: Side) -> f64
where
    F: Fn(f64) -> f64,
{
    let s = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let fx = f(x);
    let d = |h: f64| {
        let h = s * h;
        (-3.0 * fx + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)
    };
    let d = [d(h0), d(h0 / 2.0), d(h0 / 4.0), d(h0 / 8.0)];
    // the one-sided error series has every power h², h³, h⁴, ...
    let e = [0, 1, 2].map(|i| (4.0 * d[i + 1] - d[i]) / 3.0);
    let g = [0, 1].map(|i| (8.0 * e[i + 1] - e[i]) / 7.0);
    (16.0 * g[1] - g[0]) / 15.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_point_rule() {
        let (x, w) = gauss_legendre_rule(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(x[0], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], r, epsilon = 1e-15);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [3, 5, 17, 40, 64, 128] {
            let (_, w) = gauss_legendre_rule(n).unwrap();
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn exact_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(10).unwrap();
        let v = rule.integrate(-1.0, 1.0, |x| x.powi(18)).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 19.0, epsilon = 1e-14);
        let odd = rule.integrate(-1.0, 1.0, |x| x.powi(19)).unwrap();
        assert_abs_diff_eq!(odd, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn high_order_nodes_are_roots() {
        for n in [40, 97, 128] {
            let (x, _) = gauss_legendre_rule(n).unwrap();
            for &xi in &x {
                let (p, dp) = legendre_with_derivative(n, xi);
                assert!(p.abs() <= 1e-14 * dp.abs().max(1.0), "n={n} x={xi} p={p}");
            }
            assert!(x.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rule_order_range() {
        assert_eq!(GaussLegendre::new(1), Err(QuadratureError::Order(1)));
        assert_eq!(GaussLegendre::new(129), Err(QuadratureError::Order(129)));
    }

    #[test]
    fn square_on_unit_interval() {
        let s = QuadratureScheme::new(2, vec![0.0, 1.0], Tail::None).unwrap();
        assert_abs_diff_eq!(
            integrate_panels(|x| x * x, &s).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn exponential_with_truncated_tail() {
        let alpha = 0.23165;
        let s = QuadratureScheme::new(
            40,
            vec![0.0, 5.0],
            Tail::Truncate {
                limit: 30.0 / alpha,
                panel_width: 1.0 / alpha,
            },
        )
        .unwrap();
        let v = integrate_panels(|r| (-2.0 * alpha * r).exp(), &s).unwrap();
        let exact = (1.0 - (-60.0f64).exp()) / (2.0 * alpha);
        assert_abs_diff_eq!(v, exact, epsilon = 1e-13);
    }

    #[test]
    fn rational_map_tail() {
        let s = QuadratureScheme::new(
            30,
            vec![0.0, 1.0],
            Tail::MapRational {
                scale: 1.0,
                panels: 8,
            },
        )
        .unwrap();
        let v = integrate_panels(|r| 1.0 / (1.0 + r * r), &s).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::FRAC_PI_2, epsilon = 1e-13);
    }

    #[test]
    fn invalid_schemes() {
        assert_eq!(
            QuadratureScheme::new(10, vec![0.0, 1.0, 1.0], Tail::None),
            Err(QuadratureError::Breakpoints)
        );
        assert_eq!(
            QuadratureScheme::new(10, vec![0.0], Tail::None),
            Err(QuadratureError::Breakpoints)
        );
        assert!(QuadratureScheme::new(
            10,
            vec![0.0],
            Tail::Truncate {
                limit: -1.0,
                panel_width: 1.0
            }
        )
        .is_err());
    }

    #[test]
    fn reports_non_finite_abscissa() {
        let s = QuadratureScheme::new(4, vec![0.0, 1.0], Tail::None).unwrap();
        match integrate_panels(|x| if x > 0.5 { f64::NAN } else { x }, &s) {
            Err(QuadratureError::NonFinite { x, .. }) => assert!(x > 0.5 && x < 1.0),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn semi_infinite_integrals() {
        assert_abs_diff_eq!(
            integrate_semi_infinite(|r| (-r).exp(), 0.0, 1.0).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let alpha = 0.23165;
        let v = integrate_semi_infinite(|r| r * r * (-2.0 * alpha * r).exp(), 0.0, 2.0 * alpha)
            .unwrap();
        let exact = 2.0 / (2.0 * alpha).powi(3);
        assert_abs_diff_eq!(v / exact, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn richardson_central() {
        assert_abs_diff_eq!(
            differentiate(|x| x * x * x, 2.0, 1e-3),
            12.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(differentiate(f64::exp, 0.0, 1e-3), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn richardson_one_sided() {
        for side in [Side::Left, Side::Right] {
            assert_abs_diff_eq!(
                differentiate_one_sided(f64::exp, 0.0, 1e-3, side),
                1.0,
                epsilon = 1e-10
            );
            assert_abs_diff_eq!(
                differentiate_one_sided(|x| x.powi(4), 1.0, 1e-3, side),
                4.0,
                epsilon = 1e-9
            );
        }
        // pieces differ in the third derivative at 0; each side sees a smooth cubic
        let f = |x: f64| {
            if x < 0.0 {
                -x * x * x + x
            } else {
                x * x * x + x
            }
        };
        assert_abs_diff_eq!(
            differentiate_one_sided(f, 0.0, 1e-3, Side::Left),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            differentiate_one_sided(f, 0.0, 1e-3, Side::Right),
            1.0,
            epsilon = 1e-12
        );
    }
}
