use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bound of the form `c · r^ξ · exp((v t − r)/ℓ)`, valid for `t ≤ Δt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpBoundParams {
    pub coefficient: f64,
    pub poly_exponent: f64,
    pub velocity: f64,
    pub length: f64,
    /// `None` when the bound holds for all times.
    pub horizon: Option<f64>,
}

impl ExpBoundParams {
    pub fn new(coefficient: f64, poly_exponent: f64, velocity: f64, length: f64) -> Self {
        ExpBoundParams {
            coefficient,
            poly_exponent,
            velocity,
            length,
            horizon: None,
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn evaluate(&self, r: f64, t: f64) -> f64 {
        self.coefficient * r.powf(self.poly_exponent) * ((self.velocity * t - r) / self.length).exp()
    }

    pub fn is_valid_at(&self, t: f64) -> bool {
        self.horizon.is_none_or(|h| t <= h)
    }
}

/// Nearest-neighbour starting bound: `v₁ = 4eτℓ₁`, `c = 1`, `ξ = 0`.
pub fn base_bound(tau: f64, ell1: f64) -> Result<ExpBoundParams> {
    if !(tau > 0.0) {
        return Err(Error::domain("tau", tau, "(0, inf)"));
    }
    if !(ell1 >= 1.0) {
        return Err(Error::domain("ell1", ell1, "[1, inf)"));
    }
    Ok(ExpBoundParams::new(1.0, 0.0, 4.0 * E * tau * ell1, ell1))
}

/// Bound for `e^{ℒ₂t} e^{ℒ₁t}` from bounds on each factor; requires
/// `ℓ₂ ≥ ℓ₁`.
pub fn combine_bounds(b1: &ExpBoundParams, b2: &ExpBoundParams, d: usize) -> Result<ExpBoundParams> {
    super::check_dimension(d)?;
    if b2.length < b1.length {
        return Err(Error::Precondition(format!(
            "second bound's length scale {} is below the first's {}",
            b2.length, b1.length
        )));
    }
    let horizon = match (b1.horizon, b2.horizon) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(ExpBoundParams {
        coefficient: 2f64.powi(d as i32 + 5) * b1.coefficient * b2.coefficient,
        poly_exponent: b1.poly_exponent + b2.poly_exponent + d as f64 + 1.0,
        velocity: b1.velocity + b2.velocity,
        length: b2.length,
        horizon,
    })
}

/// Result of doubling the validity window of a bound `k` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeExtension {
    /// `c_k = 2^{(d+5)(2^k−1)} c₀^{2^k}`, `ξ_k = (2^k−1)(d+1) + 2^k ξ₀`,
    /// same `v` and `ℓ`, horizon `2^k Δt`.
    pub doubled: ExpBoundParams,
    /// `χ = 2[log(2^{d+5} c₀) + (d+1+ξ₀) log r]`.
    pub chi: f64,
}

impl TimeExtension {
    /// All-time form `exp(χ t/Δt + (v t − r)/ℓ)`, using the original horizon
    /// `base_horizon`. `χ` must have been computed at this `r`.
    pub fn all_time(&self, r: f64, t: f64, base_horizon: f64) -> f64 {
        (self.chi * t / base_horizon + (self.doubled.velocity * t - r) / self.doubled.length).exp()
    }
}

pub fn extend_time(b0: &ExpBoundParams, d: usize, k: u32, r: f64) -> Result<TimeExtension> {
    super::check_dimension(d)?;
    let doublings = 2f64.powi(k as i32);
    let dd = d as f64;
    let coefficient = 2f64.powf((dd + 5.0) * (doublings - 1.0)) * b0.coefficient.powf(doublings);
    let poly_exponent = (doublings - 1.0) * (dd + 1.0) + doublings * b0.poly_exponent;
    let chi = 2.0 * ((2f64.powi(d as i32 + 5) * b0.coefficient).ln() + (dd + 1.0 + b0.poly_exponent) * r.ln());
    Ok(TimeExtension {
        doubled: ExpBoundParams {
            coefficient,
            poly_exponent,
            velocity: b0.velocity,
            length: b0.length,
            horizon: b0.horizon.map(|h| h * doublings),
        },
        chi,
    })
}
