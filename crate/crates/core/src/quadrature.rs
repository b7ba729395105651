//! Tanh-sinh quadrature on `[0, 1]` and the integral forms of `b_n`.
//!
//! The substitution `s = (1 + tanh((π/2) sinh t)) / 2` maps `t ∈ ℝ` onto
//! `(0, 1)` with weights that decay double-exponentially, so nodes crowd into
//! both endpoints. The trapezoid rule in `t` is refined by halving the step;
//! each level only evaluates the new odd nodes.

use std::f64::consts::{E, PI};
use std::sync::OnceLock;

use crate::coeffs::CoefficientTable;
use crate::error::{Error, Result};
use crate::integrand::{g_interior, h_interior, EndpointSafeFunction};
use crate::report::Check;

/// Nodes with `|t| > T_MAX` sit within ~1e-37 of an endpoint and are dropped.
const T_MAX: f64 = 4.0;
/// Deepest level with a node cache (step `2^-20`).
pub const MAX_SUPPORTED_LEVEL: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub target_abs_tol: f64,
    pub min_levels: u32,
    pub max_levels: u32,
}

impl QuadratureConfig {
    pub fn new(target_abs_tol: f64, min_levels: u32, max_levels: u32) -> Result<Self> {
        let config = Self { target_abs_tol, min_levels, max_levels };
        config.validate()?;
        Ok(config)
    }

    pub fn with_tolerance(target_abs_tol: f64) -> Result<Self> {
        Self::new(target_abs_tol, Self::default().min_levels, Self::default().max_levels)
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_abs_tol.is_nan() || self.target_abs_tol <= 0.0 {
            return Err(Error::Precondition("target_abs_tol must be positive".into()));
        }
        if self.min_levels == 0 || self.min_levels > self.max_levels {
            return Err(Error::Precondition("need 1 <= min_levels <= max_levels".into()));
        }
        if self.max_levels > MAX_SUPPORTED_LEVEL {
            return Err(Error::Precondition(format!(
                "max_levels is capped at {MAX_SUPPORTED_LEVEL}"
            )));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { target_abs_tol: 1e-13, min_levels: 3, max_levels: 12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Number of refinement levels evaluated, counting the coarse one.
    pub levels_used: u32,
    pub converged: bool,
}

impl QuadratureResult {
    fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}

/// A symmetric pair of abscissas `lo = 1 - hi`, stored separately so that the
/// small one keeps full relative precision.
#[derive(Clone, Copy, Debug)]
struct Node {
    lo: f64,
    hi: f64,
    weight: f64,
}

fn node_at(t: f64) -> Node {
    let q = (-PI * t.sinh()).exp();
    let denom = 1.0 + q;
    Node {
        lo: q / denom,
        hi: 1.0 / denom,
        weight: PI * t.cosh() * q / (denom * denom),
    }
}

/// New nodes of `level` (t > 0 only; the center is handled separately).
fn level_nodes(level: u32) -> &'static [Node] {
    static CACHE: [OnceLock<Vec<Node>>; MAX_SUPPORTED_LEVEL as usize + 1] =
        [const { OnceLock::new() }; MAX_SUPPORTED_LEVEL as usize + 1];
    CACHE[level as usize].get_or_init(|| {
        let h = 0.5f64.powi(level as i32);
        let (start, stride) = if level == 0 { (1u64, 1u64) } else { (1, 2) };
        (0..)
            .map(|j: u64| (start + stride * j) as f64 * h)
            .take_while(|&t| t <= T_MAX)
            .map(node_at)
            .collect()
    })
}

/// `∫₀¹ f(s) ds` by tanh-sinh with level doubling.
///
/// The error estimate is the change between successive levels; convergence
/// needs it under `target_abs_tol` on two consecutive levels and at least
/// `min_levels` levels evaluated.
pub fn integrate<F: Fn(f64) -> f64>(
    func: &EndpointSafeFunction<F>,
    config: &QuadratureConfig,
) -> QuadratureResult {
    let level_sum = |level: u32| -> f64 {
        level_nodes(level)
            .iter()
            .map(|node| node.weight * (func.eval(node.lo) + func.eval(node.hi)))
            .sum()
    };

    let mut estimate = (PI / 4.0) * func.eval(0.5) + level_sum(0);
    let mut error = f64::INFINITY;
    let mut streak = 0;
    for level in 1..config.max_levels {
        let h = 0.5f64.powi(level as i32);
        let refined = 0.5 * estimate + h * level_sum(level);
        error = (refined - estimate).abs();
        estimate = refined;
        streak = if error <= config.target_abs_tol { streak + 1 } else { 0 };
        let levels_used = level + 1;
        if streak >= 2 && levels_used >= config.min_levels {
            return QuadratureResult { value: estimate, error_estimate: error, levels_used, converged: true };
        }
    }
    QuadratureResult {
        value: estimate,
        error_estimate: error,
        levels_used: config.max_levels,
        converged: false,
    }
}

fn require_from_two(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "the integral representation covers n >= 2 (got {n})"
        )));
    }
    Ok(())
}

/// `(1/e) ∫₀¹ g(s) s^{n-2} ds`
pub fn b_quad_g(n: usize, config: &QuadratureConfig) -> Result<QuadratureResult> {
    require_from_two(n)?;
    let k = (n - 2) as i32;
    let f = EndpointSafeFunction::new(move |s: f64| g_interior(s) * s.powi(k), 0.0, 0.0);
    Ok(integrate(&f, config).scaled(1.0 / E))
}

/// `(1/e) ∫₀¹ g(s) (1-s)^{n-2} ds`
pub fn b_quad_g_reflected(n: usize, config: &QuadratureConfig) -> Result<QuadratureResult> {
    require_from_two(n)?;
    let k = (n - 2) as i32;
    let f = EndpointSafeFunction::new(move |s: f64| g_interior(s) * (1.0 - s).powi(k), 0.0, 0.0);
    Ok(integrate(&f, config).scaled(1.0 / E))
}

/// `-(1/((n-1)e)) ∫₀¹ h(s) s^{n-1} ds`
pub fn b_quad_h(n: usize, config: &QuadratureConfig) -> Result<QuadratureResult> {
    require_from_two(n)?;
    let k = (n - 1) as i32;
    let f = EndpointSafeFunction::new(move |s: f64| h_interior(s) * s.powi(k), 0.0, -1.0);
    Ok(integrate(&f, config).scaled(-1.0 / ((n - 1) as f64 * E)))
}

/// `L(n) = n ∫₀¹ s^n h(s) ds`, which tends to `h(1) = -1`.
pub fn lemma2_diagnostic(n: usize, config: &QuadratureConfig) -> Result<QuadratureResult> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let k = n as i32;
    let f = EndpointSafeFunction::new(move |s: f64| h_interior(s) * s.powi(k), 0.0, -1.0);
    Ok(integrate(&f, config).scaled(n as f64))
}

/// Exact-table value of `L(n)`: from the `h` representation of `b_{n+1}`,
/// `∫ h s^n = -n e b_{n+1}`, so `L(n) = -n² e b_{n+1}`.
pub fn lemma2_from_table(table: &CoefficientTable, n: usize) -> Result<f64> {
    let b = table.get(n + 1)?.to_f64();
    Ok(-(n as f64) * (n as f64) * E * b)
}

/// `b_{n+1} / b_n` for each requested `n`, exact division then rounded.
pub fn ratio_diagnostic(table: &CoefficientTable, ns: &[usize]) -> Result<Vec<f64>> {
    ns.iter()
        .map(|&n| {
            let next = table.get(n + 1)?;
            Ok(next.checked_div(table.get(n)?)?.to_f64())
        })
        .collect()
}

/// The integral identities `∫g = e/24`, `∫g s = e/48`, `∫g/s = ∫g/(1-s) = e/2 - 1`.
///
/// `moment_tol` applies to the first two, `reciprocal_tol` to the last two.
pub fn remark_integrals(config: &QuadratureConfig, moment_tol: f64, reciprocal_tol: f64) -> Vec<Check> {
    // name, integrand, endpoint limits, exact value, its label, tolerance
    type Case = (&'static str, Box<dyn Fn(f64) -> f64>, (f64, f64), f64, &'static str, f64);
    let cases: [Case; 4] = [
        ("integral_g", Box::new(g_interior), (0.0, 0.0), E / 24.0, "e/24", moment_tol),
        ("integral_g_times_s", Box::new(|s| g_interior(s) * s), (0.0, 0.0), E / 48.0, "e/48", moment_tol),
        ("integral_g_over_s", Box::new(|s| g_interior(s) / s), (1.0, 0.0), E / 2.0 - 1.0, "e/2 - 1", reciprocal_tol),
        (
            "integral_g_over_one_minus_s",
            Box::new(|s| g_interior(s) / (1.0 - s)),
            (0.0, 1.0),
            E / 2.0 - 1.0,
            "e/2 - 1",
            reciprocal_tol,
        ),
    ];
    cases
        .into_iter()
        .map(|(name, interior, (at_zero, at_one), expected, label, tol)| {
            let f = EndpointSafeFunction::new(interior, at_zero, at_one);
            let result = integrate(&f, config);
            let diff = (result.value - expected).abs();
            Check::pass_if(
                name,
                "Remark",
                result.converged && diff <= tol,
                format!("integral = {label} within {tol:e}"),
            )
            .with_f64("value", result.value)
            .with_f64("expected", expected)
            .with_f64("abs_diff", diff)
            .with_f64("error_estimate", result.error_estimate)
            .with_value("converged", result.converged)
        })
        .collect()
}
