use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use super::exponential::base_bound;
use crate::error::{Error, Result};

/// `v_{k+1} = ξ log(r*) v_k + νλ ℓ_{k+1}^{2d+1} / ℓ_k^α`.
///
/// The ratio of powers is evaluated in log space so that large `L` does not
/// overflow intermediate values.
#[allow(clippy::too_many_arguments)]
pub fn recursion_step(
    v_k: f64,
    ell_k: f64,
    ell_next: f64,
    r_star: f64,
    xi: f64,
    nu: f64,
    lambda: f64,
    alpha: f64,
    d: usize,
) -> Result<f64> {
    if !(ell_k >= 1.0) {
        return Err(Error::domain("ell_k", ell_k, "[1, inf)"));
    }
    if !(ell_next > ell_k) {
        return Err(Error::Precondition(format!(
            "length scales must increase: ell_next = {ell_next} <= ell_k = {ell_k}"
        )));
    }
    if !(r_star >= E) {
        return Err(Error::domain("r_star", r_star, "[e, inf)"));
    }
    let k = 2.0 * d as f64 + 1.0;
    let ratio = (k * ell_next.ln() - alpha * ell_k.ln()).exp();
    Ok(xi * r_star.ln() * v_k + nu * lambda * ratio)
}

/// Base `L` of the length ladder, `L = (ξ log r*)^{1/(2d+1−α)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LChoice {
    pub value: f64,
    /// `x = ξ log r*`.
    pub x: f64,
    /// `L ≤ 1`: the configuration is outside the asymptotic regime.
    pub degenerate: bool,
}

pub fn choose_l(r_star: f64, xi: f64, alpha: f64, d: usize) -> Result<LChoice> {
    super::check_polynomial_regime(alpha, d)?;
    let x = xi * r_star.ln();
    if !(x >= 1.0) {
        return Err(Error::domain("xi * log(r_star)", x, "[1, inf)"));
    }
    let value = x.powf(1.0 / (2.0 * d as f64 + 1.0 - alpha));
    Ok(LChoice {
        value,
        x,
        degenerate: value <= 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelChoice {
    pub n: usize,
    /// The raw floor was below 1 and was raised to 1.
    pub clamped: bool,
}

/// `n = ⌊log[r (t/r^{α−2d})^η] / log L⌋`, clamped below at 1.
pub fn choose_n(r: f64, t: f64, alpha: f64, d: usize, eta: f64, base: f64) -> Result<LevelChoice> {
    if !(base > 1.0) {
        return Err(Error::domain("L", base, "(1, inf)"));
    }
    if !(r > 0.0 && t > 0.0) {
        return Err(Error::Precondition(format!("r and t must be positive (r = {r}, t = {t})")));
    }
    let upper = 1.0 / (alpha - d as f64);
    if !(eta > 0.0 && eta < upper) {
        return Err(Error::domain("eta", eta, format!("(0, {upper})")));
    }
    let arg = r.ln() + eta * (t.ln() - (alpha - 2.0 * d as f64) * r.ln());
    let raw = (arg / base.ln()).floor();
    if raw < 1.0 {
        Ok(LevelChoice { n: 1, clamped: true })
    } else {
        Ok(LevelChoice {
            n: raw as usize,
            clamped: false,
        })
    }
}

/// Inputs of a velocity recursion, echoed into its trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionInputs {
    pub tau: f64,
    #[serde(rename = "L")]
    pub base: f64,
    pub n: usize,
    pub xi: f64,
    pub nu: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub d: usize,
    pub r_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionTrace {
    pub inputs: RecursionInputs,
    /// `(ℓ_k, v_k)` for `k = 1..=n`.
    pub levels: Vec<(f64, f64)>,
}

impl RecursionTrace {
    pub fn final_velocity(&self) -> f64 {
        self.levels.last().map(|&(_, v)| v).unwrap_or(0.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Iterate [`recursion_step`] from the base bound `v₁ = 4eτL` over
/// `ℓ_k = L^k`.
pub fn run_recursion(inputs: RecursionInputs) -> Result<RecursionTrace> {
    if inputs.n == 0 {
        return Err(Error::Precondition("the recursion needs at least one level".into()));
    }
    let RecursionInputs {
        tau,
        base,
        n,
        xi,
        nu,
        lambda,
        alpha,
        d,
        r_star,
    } = inputs;
    let mut v = base_bound(tau, base)?.velocity;
    let mut levels = Vec::with_capacity(n);
    levels.push((base, v));
    for k in 1..n {
        let ell_k = base.powi(k as i32);
        let ell_next = base.powi(k as i32 + 1);
        v = recursion_step(v, ell_k, ell_next, r_star, xi, nu, lambda, alpha, d)?;
        levels.push((ell_next, v));
    }
    Ok(RecursionTrace { inputs, levels })
}

/// `v_n = x^{n−1} [v₁ + (n−1) L^{2d+1} νλ]`, exact when `L^{2d+1−α} = x`.
pub fn closed_form_velocity(inputs: &RecursionInputs) -> Result<f64> {
    let x = inputs.xi * inputs.r_star.ln();
    let v1 = base_bound(inputs.tau, inputs.base)?.velocity;
    let n = inputs.n as f64;
    let k = 2.0 * inputs.d as f64 + 1.0;
    Ok(x.powf(n - 1.0) * (v1 + (n - 1.0) * inputs.base.powf(k) * inputs.nu * inputs.lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn step_examples() {
        let v = recursion_step(1.0, 1.0, 2.0, E, 68.0, 1.0, 1.0, 2.5, 1).unwrap();
        assert_relative_eq!(v, 76.0, epsilon = 1e-12);
        let pure = recursion_step(3.0, 2.0, 4.0, 10.0, 68.0, 0.0, 123.0, 2.5, 1).unwrap();
        assert_relative_eq!(pure, 68.0 * 10f64.ln() * 3.0, max_relative = 1e-15);
        let only_second = recursion_step(0.0, 2.0, 4.0, 10.0, 999.0, 2.0, 3.0, 2.5, 1).unwrap();
        assert_relative_eq!(only_second, 6.0 * 4f64.powi(3) / 2f64.powf(2.5), max_relative = 1e-14);
        assert!(recursion_step(1.0, 2.0, 2.0, E, 68.0, 1.0, 1.0, 2.5, 1).is_err());
        assert!(recursion_step(1.0, 1.0, 2.0, 2.0, 68.0, 1.0, 1.0, 2.5, 1).is_err());
    }

    #[test]
    fn l_examples() {
        let l = choose_l(E, 68.0, 2.5, 1).unwrap();
        assert_relative_eq!(l.value, 4624.0, max_relative = 1e-12);
        let unit = choose_l(E, 1.0, 2.5, 1).unwrap();
        assert_eq!(unit.value, 1.0);
        assert!(unit.degenerate);
        let steep = choose_l(E, 68.0, 2.9, 1).unwrap();
        assert_relative_eq!(steep.value, 68f64.powi(10), max_relative = 1e-12);
        assert_relative_eq!(steep.value, 2.11e18, max_relative = 1e-2);
        assert!(choose_l(E, 68.0, 3.5, 1).is_err());
        assert!(choose_l(E, 68.0, 2.0, 1).is_err());
    }

    #[test]
    fn n_examples() {
        let c = choose_n(100.0, 1.0, 2.5, 1, 0.1, 10.0).unwrap();
        assert_eq!(c, LevelChoice { n: 1, clamped: false });
        let raw = (100f64 * 0.1f64.powf(0.1)).ln() / 10f64.ln();
        assert_relative_eq!(raw, 1.9, epsilon = 1e-12);
        let clamp = choose_n(3.0, 1.0, 2.5, 1, 0.1, 10.0).unwrap();
        assert_eq!(clamp, LevelChoice { n: 1, clamped: true });
        // t = r^{α−2d} makes the inner factor 1.
        let r: f64 = 1000.0;
        let c = choose_n(r, r.powf(0.5), 2.5, 1, 0.3, 3.0).unwrap();
        assert_eq!(c.n, (r.ln() / 3f64.ln()).floor() as usize);
        assert!(choose_n(r, 1.0, 2.5, 1, 0.7, 3.0).is_err());
    }

    fn inputs(n: usize, base: f64, nu: f64) -> RecursionInputs {
        RecursionInputs {
            tau: 2.25,
            base,
            n,
            xi: 68.0,
            nu,
            lambda: 7.5,
            alpha: 2.5,
            d: 1,
            r_star: 50.0,
        }
    }

    #[test]
    fn single_level() {
        let t = run_recursion(inputs(1, 3.0, 1.0)).unwrap();
        assert_eq!(t.levels.len(), 1);
        assert_relative_eq!(t.final_velocity(), 4.0 * E * 2.25 * 3.0, max_relative = 1e-15);
    }

    #[test]
    fn two_levels_match_closed_form() {
        let l = choose_l(50.0, 68.0, 2.5, 1).unwrap();
        let inp = inputs(2, l.value, 1.0);
        let trace = run_recursion(inp).unwrap();
        let by_hand = l.x * (4.0 * E * 2.25 * l.value + l.value.powi(3) * 7.5);
        assert_relative_eq!(trace.final_velocity(), by_hand, max_relative = 1e-12);
        assert_relative_eq!(closed_form_velocity(&inp).unwrap(), by_hand, max_relative = 1e-12);
    }

    #[test]
    fn geometric_growth_without_long_range_term() {
        let inp = inputs(5, 4.0, 0.0);
        let trace = run_recursion(inp).unwrap();
        let x = 68.0 * 50f64.ln();
        let v1 = 4.0 * E * 2.25 * 4.0;
        assert_relative_eq!(trace.final_velocity(), x.powi(4) * v1, max_relative = 1e-13);
    }

    #[test]
    fn ladder_is_powers_of_l() {
        let trace = run_recursion(inputs(4, 3.0, 1.0)).unwrap();
        for (k, &(ell, _)) in trace.levels.iter().enumerate() {
            assert_eq!(ell, 3f64.powi(k as i32 + 1));
        }
    }
}
