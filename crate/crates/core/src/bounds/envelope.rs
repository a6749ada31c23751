use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the admissible `ε` interval, `(α−2d)² / ((α−2d)² + α − d)`.
pub fn theorem_epsilon_limit(alpha: f64, d: usize) -> f64 {
    let a = alpha - 2.0 * d as f64;
    let b = alpha - d as f64;
    a * a / (a * a + b)
}

/// Existential constants of the final bound. The default of 1 for all three
/// is a placeholder; the verification harness fits `C` from data instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConstants {
    pub c1: f64,
    pub c2: f64,
    /// Window constant: the bound is claimed for `t ≤ c r^{α−2d−ε}`.
    pub c: f64,
}

impl Default for EnvelopeConstants {
    fn default() -> Self {
        EnvelopeConstants { c1: 1.0, c2: 1.0, c: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub value: f64,
    pub valid: bool,
}

fn check_theorem_epsilon(alpha: f64, d: usize, epsilon: f64) -> Result<()> {
    let limit = theorem_epsilon_limit(alpha, d);
    if !(epsilon > 0.0 && epsilon < limit) {
        return Err(Error::domain("theorem_epsilon", epsilon, format!("(0, {limit})")));
    }
    Ok(())
}

/// `C₁ (t / r^{α−2d−ε})^{(α−d)/(α−2d) − ε/2} + C₂ t / r^{α−d}`, together with
/// whether `t ≤ c r^{α−2d−ε}`.
pub fn theorem_envelope(
    r: f64,
    t: f64,
    alpha: f64,
    d: usize,
    epsilon: f64,
    constants: EnvelopeConstants,
) -> Result<EnvelopePoint> {
    super::check_polynomial_regime(alpha, d)?;
    check_theorem_epsilon(alpha, d, epsilon)?;
    let (front, tail) = envelope_terms(r, t, alpha, d, epsilon);
    Ok(EnvelopePoint {
        value: constants.c1 * front + constants.c2 * tail,
        valid: t <= constants.c * r.powf(alpha - 2.0 * d as f64 - epsilon),
    })
}

/// The envelope with `C₁ = C₂ = 1`; the shape against which data are fitted.
pub fn envelope_shape(r: f64, t: f64, alpha: f64, d: usize, epsilon: f64) -> f64 {
    let (front, tail) = envelope_terms(r, t, alpha, d, epsilon);
    front + tail
}

fn envelope_terms(r: f64, t: f64, alpha: f64, d: usize, epsilon: f64) -> (f64, f64) {
    let dd = d as f64;
    let cone = alpha - 2.0 * dd - epsilon;
    let power = (alpha - dd) / (alpha - 2.0 * dd) - epsilon / 2.0;
    ((t / r.powf(cone)).powf(power), t / r.powf(alpha - dd))
}

/// Shape of the light cone `t ≳ f(r)` as a function of `α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "lowercase")]
pub enum LightCone {
    /// `d < α ≤ 2d`: `t ≳ log r`.
    Logarithmic,
    /// `2d < α ≤ 2d+1`: `t ≳ r^{α−2d}` (up to an arbitrarily small loss).
    Polynomial { exponent: f64 },
    /// `α > 2d+1`: `t ≳ r`.
    Linear,
}

impl LightCone {
    /// Power of `r` in the cone; `None` for the logarithmic regime.
    pub fn exponent(&self) -> Option<f64> {
        match self {
            LightCone::Logarithmic => None,
            LightCone::Polynomial { exponent } => Some(*exponent),
            LightCone::Linear => Some(1.0),
        }
    }
}

pub fn light_cone_exponent(alpha: f64, d: usize) -> Result<LightCone> {
    super::check_dimension(d)?;
    let dd = d as f64;
    if !(alpha > dd) {
        return Err(Error::domain("alpha", alpha, format!("({dd}, inf)")));
    }
    Ok(if alpha <= 2.0 * dd {
        LightCone::Logarithmic
    } else if alpha <= 2.0 * dd + 1.0 {
        LightCone::Polynomial {
            exponent: alpha - 2.0 * dd,
        }
    } else {
        LightCone::Linear
    })
}

/// Exponent produced when the lattice-size dependence is removed:
///
/// `(1 + (α−d)/(α−2d) − ε)(α−2d−ε) / (α − 2d − ε((α−2d)² + α − d)/(α−2d) + ε²)`
///
/// which is never below `(α−d)/(α−2d)`. Accepts `ε ∈ [0, limit]`.
pub fn untrunc_exponent(alpha: f64, d: usize, epsilon: f64) -> Result<f64> {
    super::check_polynomial_regime(alpha, d)?;
    let limit = theorem_epsilon_limit(alpha, d);
    if !(epsilon >= 0.0 && epsilon <= limit) {
        return Err(Error::domain("theorem_epsilon", epsilon, format!("[0, {limit}]")));
    }
    let a = alpha - 2.0 * d as f64;
    let b = alpha - d as f64;
    let value = (1.0 + b / a - epsilon) * (a - epsilon) / (a - epsilon * (a * a + b) / a + epsilon * epsilon);
    debug_assert!(value >= b / a * (1.0 - 1e-12));
    Ok(value)
}

/// `C(r,t) ≤ 2^{β+2} c t^γ / r^β`.
pub fn correlator_envelope(c: f64, gamma: f64, beta: f64, r: f64, t: f64) -> Result<f64> {
    if !(c > 0.0 && gamma > 0.0 && beta > 0.0) {
        return Err(Error::Precondition(format!(
            "c, gamma, beta must be positive (got {c}, {gamma}, {beta})"
        )));
    }
    Ok(2f64.powf(beta + 2.0) * c * t.powf(gamma) / r.powf(beta))
}
