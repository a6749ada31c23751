use std::f64::consts::E;

use crate::error::{Error, Result};

/// Growth factor in the velocity recursion, `4(4d + 13)`.
pub fn xi_constant(d: usize) -> Result<f64> {
    super::check_dimension(d)?;
    Ok(4.0 * (4.0 * d as f64 + 13.0))
}

/// `g_ε = d!/ε^d`, the constant in `x^d ≤ g_ε e^{εx}` for `x ≥ 0`.
pub fn g_epsilon(shell_epsilon: f64, d: usize) -> Result<f64> {
    super::check_dimension(d)?;
    if !(shell_epsilon > 0.0) {
        return Err(Error::domain("shell_epsilon", shell_epsilon, "(0, inf)"));
    }
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    Ok(factorial / shell_epsilon.powi(d as i32))
}

/// The prefactor that absorbs the shell-sum constants:
///
/// `g̃_ε = g_ε² · e^{2ε + ε√d} · (1 + e^{1+ε})² · 2^{2d}`
///
/// i.e. the `g_ε` bound applied to both dumbbell legs, the squared per-leg
/// decay constant, and the `(2R)^{2d}` volume factor with `R^{2d}` kept
/// outside.
pub fn g_tilde(shell_epsilon: f64, d: usize) -> Result<f64> {
    let g = g_epsilon(shell_epsilon, d)?;
    let sd = (d as f64).sqrt();
    Ok(g * g
        * (2.0 * shell_epsilon + shell_epsilon * sd).exp()
        * (1.0 + (1.0 + shell_epsilon).exp()).powi(2)
        * 2f64.powi(2 * d as i32))
}

/// Effective-interaction constant of the coarse-grained hypercube model:
///
/// `λ = g̃_ε · e²/(e−1) · e^{2+√d} · (e/(e−1) + g_ε) · e^{1/(1−ε)} · (1−ε)^{2d}`
pub fn lambda_constant(shell_epsilon: f64, d: usize) -> Result<f64> {
    if !(shell_epsilon > 0.0 && shell_epsilon <= 0.5) {
        return Err(Error::domain("shell_epsilon", shell_epsilon, "(0, 1/2]"));
    }
    let g = g_epsilon(shell_epsilon, d)?;
    let sd = (d as f64).sqrt();
    Ok(g_tilde(shell_epsilon, d)?
        * (E * E / (E - 1.0))
        * (2.0 + sd).exp()
        * (E / (E - 1.0) + g)
        * (1.0 / (1.0 - shell_epsilon)).exp()
        * (1.0 - shell_epsilon).powi(2 * d as i32))
}

/// Default for the exponential-interaction Lieb-Robinson constant `ν`,
/// which is known to exist but has no explicit value: `4e`.
pub fn default_nu() -> f64 {
    4.0 * E
}

/// `δ = (2d+1) / ((2d+1−α)(1 + η(2d+1−α)))`.
pub fn delta_constant(alpha: f64, d: usize, eta: f64) -> Result<f64> {
    super::check_polynomial_regime(alpha, d)?;
    if !(eta >= 0.0) {
        return Err(Error::domain("eta", eta, "[0, inf)"));
    }
    let k = 2.0 * d as f64 + 1.0;
    Ok(k / ((k - alpha) * (1.0 + eta * (k - alpha))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn xi_values() {
        assert_eq!(xi_constant(1).unwrap(), 68.0);
        assert_eq!(xi_constant(2).unwrap(), 84.0);
        assert_eq!(xi_constant(3).unwrap(), 100.0);
        assert!(xi_constant(0).is_err());
    }

    #[test]
    fn g_values() {
        assert_relative_eq!(g_epsilon(0.5, 1).unwrap(), 2.0);
        assert_relative_eq!(g_epsilon(0.25, 2).unwrap(), 32.0);
    }

    #[test]
    fn g_epsilon_bounds_the_power() {
        for d in 1..=3 {
            for eps in [0.1, 0.25, 0.5] {
                let g = g_epsilon(eps, d).unwrap();
                for k in 0..400 {
                    let x = 0.25 * k as f64;
                    assert!(x.powi(d as i32) <= g * (eps * x).exp() * (1.0 + 1e-12));
                }
            }
        }
    }

    // Frozen from a 40-digit mpmath evaluation of the same product.
    #[test]
    fn lambda_regression() {
        assert_relative_eq!(lambda_constant(0.25, 1).unwrap(), 2810656.213752151, max_relative = 1e-13);
        assert_relative_eq!(lambda_constant(0.5, 1).unwrap(), 1231459.8127700583, max_relative = 1e-13);
        assert_relative_eq!(lambda_constant(0.25, 2).unwrap(), 4086502668.512752, max_relative = 1e-13);
        assert_relative_eq!(lambda_constant(0.1, 3).unwrap(), 9.336011896318553e16, max_relative = 1e-13);
    }

    #[test]
    fn lambda_domain() {
        assert!(lambda_constant(0.0, 1).is_err());
        assert!(lambda_constant(0.6, 1).is_err());
        assert!(lambda_constant(0.5, 1).is_ok());
    }

    #[test]
    fn delta_values() {
        assert_relative_eq!(delta_constant(2.5, 1, 0.01).unwrap(), 3.0 / (0.5 * 1.005), epsilon = 1e-14);
        assert_relative_eq!(delta_constant(2.5, 1, 0.01).unwrap(), 5.9701, epsilon = 1e-4);
        assert_eq!(delta_constant(2.5, 1, 0.0).unwrap(), 6.0);
        assert_relative_eq!(delta_constant(2.5, 1, 1e-12).unwrap(), 6.0, epsilon = 1e-10);
        assert_relative_eq!(delta_constant(4.5, 2, 0.01).unwrap(), 5.0 / (0.5 * 1.005), epsilon = 1e-14);
        assert_relative_eq!(delta_constant(4.5, 2, 0.01).unwrap(), 9.9502, epsilon = 1e-4);
        assert!(delta_constant(3.5, 1, 0.01).is_err());
    }
}
