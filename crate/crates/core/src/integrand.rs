//! Pointwise evaluation of
//!
//! * `g(s) = (1/π) s^s (1-s)^{1-s} sin(πs)`,
//! * `h(s) = s^s (1-s)^{1-s} [cos(πs) - (sin(πs)/π) ln((1-s)/s)]`,
//! * `f(x) = (x+1)(e - ((1+x)/x)^x)` in closed and integral form.
//!
//! All of them are continuous on `[0, 1]` once the removable endpoint limits
//! are filled in; [`EndpointSafeFunction`] carries those limits so that no
//! `0 * ln 0` ever reaches the quadrature.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig, QuadratureResult};

/// Distance from an endpoint inside which the stored limit is returned.
pub const ENDPOINT_EPS: f64 = 1e-12;

/// A function on `[0, 1]` with known finite values at both ends.
pub struct EndpointSafeFunction<F> {
    interior: F,
    at_zero: f64,
    at_one: f64,
}

impl<F: Fn(f64) -> f64> EndpointSafeFunction<F> {
    pub fn new(interior: F, at_zero: f64, at_one: f64) -> Self {
        Self { interior, at_zero, at_one }
    }

    pub fn endpoint_values(&self) -> (f64, f64) {
        (self.at_zero, self.at_one)
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if s <= ENDPOINT_EPS {
            self.at_zero
        } else if s >= 1.0 - ENDPOINT_EPS {
            self.at_one
        } else {
            (self.interior)(s)
        }
    }
}

fn check_unit(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::Domain { name: "s", value: s, domain: "0 <= s <= 1" })
    }
}

/// `s^s`, with the limit 1 at `s = 0`.
#[inline]
fn self_power(s: f64) -> f64 {
    if s < 1e-300 {
        1.0
    } else {
        (s * s.ln()).exp()
    }
}

/// `sin(πs)` evaluated from the nearer endpoint.
#[inline]
fn sin_pi(s: f64) -> f64 {
    if s <= 0.5 {
        (PI * s).sin()
    } else {
        (PI * (1.0 - s)).sin()
    }
}

#[inline]
pub(crate) fn g_interior(s: f64) -> f64 {
    self_power(s) * self_power(1.0 - s) * sin_pi(s) / PI
}

#[inline]
pub(crate) fn h_interior(s: f64) -> f64 {
    let log_ratio = if s < 0.5 { (-s).ln_1p() - s.ln() } else { (1.0 - s).ln() - s.ln() };
    self_power(s) * self_power(1.0 - s) * ((PI * s).cos() - sin_pi(s) / PI * log_ratio)
}

/// `g` with its endpoint limits `g(0) = g(1) = 0`.
pub fn g_function() -> EndpointSafeFunction<fn(f64) -> f64> {
    EndpointSafeFunction::new(g_interior, 0.0, 0.0)
}

/// `h` with its endpoint limits `h(0) = 1`, `h(1) = -1`.
pub fn h_function() -> EndpointSafeFunction<fn(f64) -> f64> {
    EndpointSafeFunction::new(h_interior, 1.0, -1.0)
}

pub fn g_eval(s: f64) -> Result<f64> {
    check_unit(s)?;
    Ok(g_function().eval(s))
}

pub fn h_eval(s: f64) -> Result<f64> {
    check_unit(s)?;
    Ok(h_function().eval(s))
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { name: "x", value: x, domain: "0 < x < inf" })
    }
}

/// `x ln(1 + 1/x) - 1`, accurate also when it is close to zero.
pub(crate) fn log_excess(x: f64) -> f64 {
    if x >= 4.0 {
        // Σ_{j≥1} (-u)^j / (j+1), u = 1/x <= 1/4
        let u = 1.0 / x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for j in 1..64 {
            term *= -u;
            let add = term / (j as f64 + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        x * (1.0 / x).ln_1p() - 1.0
    }
}

/// `(1 + 1/x)^x`
pub fn compound(x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(E * log_excess(x).exp())
}

/// `(x+1)(e - ((1+x)/x)^x)`, evaluated as `-(x+1) e expm1(x ln1p(1/x) - 1)`.
pub fn f_closed(x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(-(x + 1.0) * E * log_excess(x).exp_m1())
}

/// `e/2 + ∫₀¹ g(s) / (x + s) ds`; non-convergence is an error.
pub fn f_integral(x: f64, config: &QuadratureConfig) -> Result<QuadratureResult> {
    check_positive(x)?;
    let integrand = EndpointSafeFunction::new(move |s| g_interior(s) / (x + s), 0.0, 0.0);
    let mut result = integrate(&integrand, config);
    if !result.converged {
        return Err(Error::NotConverged {
            value: result.value + E / 2.0,
            error_estimate: result.error_estimate,
        });
    }
    result.value += E / 2.0;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn g_values() {
        assert_eq!(g_eval(0.0).unwrap(), 0.0);
        assert_eq!(g_eval(1.0).unwrap(), 0.0);
        assert_relative_eq!(g_eval(0.5).unwrap(), 1.0 / (2.0 * PI), epsilon = 1e-16);
    }

    #[test]
    fn h_values() {
        assert_eq!(h_eval(0.0).unwrap(), 1.0);
        assert_eq!(h_eval(1.0).unwrap(), -1.0);
        assert!(h_eval(0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        for s in [-1e-9, 1.0 + 1e-9, f64::NAN] {
            assert!(g_eval(s).is_err());
            assert!(h_eval(s).is_err());
        }
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(f_closed(x).is_err());
        }
    }

    #[test]
    fn g_is_nonnegative_and_finite() {
        for i in 0..=10_000 {
            let s = i as f64 / 10_000.0;
            let v = g_eval(s).unwrap();
            assert!(v.is_finite() && v >= 0.0, "g({s}) = {v}");
            assert!(h_eval(s).unwrap().is_finite());
        }
        for s in [1e-300, 1e-200, 1e-13, 1.0 - 1e-13, 1e-11, 1.0 - 1e-11] {
            assert!(g_eval(s).unwrap().is_finite());
            assert!(h_eval(s).unwrap().is_finite());
        }
    }

    #[test]
    fn h_approaches_its_endpoint_values() {
        assert!((h_eval(1e-6).unwrap() - 1.0).abs() < 1e-4);
        assert!((h_eval(1.0 - 1e-6).unwrap() + 1.0).abs() < 1e-4);
    }

    #[test]
    fn f_closed_values() {
        // 2(e - 2)
        assert_relative_eq!(f_closed(1.0).unwrap(), 2.0 * (E - 2.0), epsilon = 1e-14);
        // (3/2)(e - sqrt 3); mpmath: 1.4793465313352519
        assert_relative_eq!(f_closed(0.5).unwrap(), 1.5 * (E - 3f64.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(f_closed(0.5).unwrap(), 1.4793465313352519, epsilon = 1e-14);
        // mpmath at 50 digits
        assert_relative_eq!(f_closed(10.0).unwrap(), 1.3699330519494976, epsilon = 1e-14);
        assert_relative_eq!(f_closed(0.01).unwrap(), 1.687759573293915, epsilon = 1e-13);
    }

    #[test]
    fn log_excess_branches_agree() {
        for x in [4.0f64, 5.0, 10.0] {
            let direct = x * (1.0 / x).ln_1p() - 1.0;
            assert!((log_excess(x) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn f_minus_half_e_is_positive_and_decreasing() {
        let grid = [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e3, 1e4];
        let vals: Vec<f64> = grid.iter().map(|&x| f_closed(x).unwrap() - E / 2.0).collect();
        assert!(vals.iter().all(|&v| v > 0.0));
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    }

    #[test]
    fn f_closed_at_large_x() {
        let cfg = QuadratureConfig::default();
        let closed = f_closed(1e6).unwrap();
        let integral = f_integral(1e6, &cfg).unwrap().value;
        assert!((closed - integral).abs() < 1e-6, "{closed} vs {integral}");
    }

    #[test]
    fn f_integral_matches_closed_form() {
        let cfg = QuadratureConfig::default();
        for (x, tol) in [(1.0, 1e-10), (10.0, 1e-10), (0.01, 1e-8)] {
            let closed = f_closed(x).unwrap();
            let integral = f_integral(x, &cfg).unwrap();
            assert!(integral.converged);
            assert!((closed - integral.value).abs() <= tol, "x = {x}: {closed} vs {}", integral.value);
        }
    }
}
