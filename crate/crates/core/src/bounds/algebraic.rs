use serde::{Deserialize, Serialize};

use super::constants::delta_constant;
use crate::error::{Error, Result};

/// A bound of the form `C · log^κ(r*) · t^γ / r^β`, valid for
/// `t^γ ≤ c r^β / log^δ(r*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgBoundParams {
    pub coefficient: f64,
    pub log_exponent: f64,
    pub time_exponent: f64,
    pub distance_exponent: f64,
    pub validity_c: f64,
    pub validity_delta: f64,
}

impl AlgBoundParams {
    pub fn evaluate(&self, r: f64, t: f64, r_star: f64) -> f64 {
        self.coefficient * r_star.ln().powf(self.log_exponent) * t.powf(self.time_exponent)
            / r.powf(self.distance_exponent)
    }

    pub fn is_valid_at(&self, r: f64, t: f64, r_star: f64) -> bool {
        t.powf(self.time_exponent)
            <= self.validity_c * r.powf(self.distance_exponent) / r_star.ln().powf(self.validity_delta)
    }
}

fn check_eta(alpha: f64, d: usize, eta: f64) -> Result<()> {
    let upper = 1.0 / (alpha - d as f64);
    if !(eta >= 0.0 && eta < upper) {
        return Err(Error::domain("eta", eta, format!("[0, {upper})")));
    }
    Ok(())
}

/// Starting point of the tightening iteration: the earlier power-law bound
/// with `γ₀ = α(α−d+1)/(α−2d)`, `β₀ = α−d`, `κ₀ = δ`. Prefactors are
/// placeholders set to 1.
pub fn seed_bound(alpha: f64, d: usize, eta: f64) -> Result<AlgBoundParams> {
    let delta = delta_constant(alpha, d, eta)?;
    check_eta(alpha, d, eta)?;
    let dd = d as f64;
    Ok(AlgBoundParams {
        coefficient: 1.0,
        log_exponent: delta,
        time_exponent: alpha * (alpha - dd + 1.0) / (alpha - 2.0 * dd),
        distance_exponent: alpha - dd,
        validity_c: 1.0,
        validity_delta: delta,
    })
}

/// One application of the tightening map:
///
/// * `κ′ = max{κ − δ(β−d)/β + (α−d)/(2d+1−α), δ}`
/// * `γ′ = γd/β + 1 − η(α−d)`
/// * `β′ = α − d − η(α−2d)(α−d)`
///
/// The prefactor `C′` and window constant `c′` depend on constants that are
/// only shown to exist; they are carried through unchanged (a slot with
/// multiplier 1).
pub fn tighten_step(b: &AlgBoundParams, alpha: f64, d: usize, eta: f64, delta: f64) -> Result<AlgBoundParams> {
    super::check_polynomial_regime(alpha, d)?;
    check_eta(alpha, d, eta)?;
    let dd = d as f64;
    if !(b.distance_exponent > dd) {
        return Err(Error::Precondition(format!(
            "distance exponent {} must exceed d = {d}",
            b.distance_exponent
        )));
    }
    if b.log_exponent < delta * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "log exponent {} is below delta = {delta}",
            b.log_exponent
        )));
    }
    let beta = b.distance_exponent;
    let log_exponent = (b.log_exponent - delta * (beta - dd) / beta + (alpha - dd) / (2.0 * dd + 1.0 - alpha)).max(delta);
    let time_exponent = b.time_exponent * dd / beta + 1.0 - eta * (alpha - dd);
    let distance_exponent = alpha - dd - eta * (alpha - 2.0 * dd) * (alpha - dd);
    if !(distance_exponent > dd) {
        return Err(Error::Precondition(format!(
            "tightened distance exponent {distance_exponent} does not exceed d = {d}"
        )));
    }
    Ok(AlgBoundParams {
        log_exponent,
        time_exponent,
        distance_exponent,
        validity_delta: delta,
        ..*b
    })
}

/// `lim γ_m = (α − d − η(α−2d)(α−d)) / (α − 2d)`.
pub fn fixpoint_limit(alpha: f64, d: usize, eta: f64) -> f64 {
    let dd = d as f64;
    (alpha - dd - eta * (alpha - 2.0 * dd) * (alpha - dd)) / (alpha - 2.0 * dd)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixpointStep {
    pub gamma: f64,
    pub beta: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixpointTrace {
    pub alpha: f64,
    pub d: usize,
    pub eta: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// `m = 0` is the seed bound.
    pub steps: Vec<FixpointStep>,
    pub converged: bool,
    pub limit: f64,
    pub closed_form_limit: f64,
}

impl FixpointTrace {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Iterate [`tighten_step`] from [`seed_bound`] until the time exponent
/// settles.
///
/// The `γ` map is affine with slope `q = d/β′ < 1`, so the distance of the
/// current iterate to the fixed point is exactly `q/(1−q)` times the last
/// step. Iteration stops once both the last step and that distance are below
/// `tol`. Fails with [`Error::NotConverged`] after `max_iter` steps.
pub fn fixpoint_gamma(alpha: f64, d: usize, eta: f64, tol: f64, max_iter: usize) -> Result<FixpointTrace> {
    if !(tol > 0.0) {
        return Err(Error::domain("tol", tol, "(0, inf)"));
    }
    let delta = delta_constant(alpha, d, eta)?;
    let mut current = seed_bound(alpha, d, eta)?;
    let mut steps = vec![FixpointStep {
        gamma: current.time_exponent,
        beta: current.distance_exponent,
        kappa: current.log_exponent,
    }];
    let mut last_step = f64::INFINITY;
    for _ in 0..max_iter {
        let next = tighten_step(&current, alpha, d, eta, delta)?;
        last_step = (next.time_exponent - current.time_exponent).abs();
        steps.push(FixpointStep {
            gamma: next.time_exponent,
            beta: next.distance_exponent,
            kappa: next.log_exponent,
        });
        let q = d as f64 / next.distance_exponent;
        current = next;
        if last_step < tol && q / (1.0 - q) * last_step < tol {
            return Ok(FixpointTrace {
                alpha,
                d,
                eta,
                tol,
                max_iter,
                steps,
                converged: true,
                limit: current.time_exponent,
                closed_form_limit: fixpoint_limit(alpha, d, eta),
            });
        }
    }
    Err(Error::NotConverged { max_iter, last_step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn beta_after_one_step() {
        let delta = delta_constant(2.5, 1, 0.01).unwrap();
        let seed = seed_bound(2.5, 1, 0.01).unwrap();
        let next = tighten_step(&seed, 2.5, 1, 0.01, delta).unwrap();
        assert_relative_eq!(next.distance_exponent, 1.4925, epsilon = 1e-14);
    }

    #[test]
    fn first_gamma_from_seed() {
        let seed = seed_bound(2.5, 1, 0.01).unwrap();
        assert_relative_eq!(seed.time_exponent, 12.5, epsilon = 1e-14);
        assert_eq!(seed.distance_exponent, 1.5);
        let delta = delta_constant(2.5, 1, 0.01).unwrap();
        let next = tighten_step(&seed, 2.5, 1, 0.01, delta).unwrap();
        assert_relative_eq!(next.time_exponent, 12.5 / 1.5 + 1.0 - 0.015, epsilon = 1e-13);
        assert_relative_eq!(next.time_exponent, 9.3183, epsilon = 1e-4);
    }

    #[test]
    fn fixed_point_is_invariant() {
        let (alpha, d, eta) = (2.5, 1, 0.01);
        let delta = delta_constant(alpha, d, eta).unwrap();
        let beta = alpha - 1.0 - eta * 0.5 * 1.5;
        let b = AlgBoundParams {
            coefficient: 1.0,
            log_exponent: delta,
            time_exponent: fixpoint_limit(alpha, d, eta),
            distance_exponent: beta,
            validity_c: 1.0,
            validity_delta: delta,
        };
        let next = tighten_step(&b, alpha, d, eta, delta).unwrap();
        assert_relative_eq!(next.time_exponent, b.time_exponent, epsilon = 1e-14);
    }

    #[test]
    fn kappa_floor_is_delta() {
        let delta = delta_constant(2.5, 1, 0.01).unwrap();
        let seed = seed_bound(2.5, 1, 0.01).unwrap();
        let next = tighten_step(&seed, 2.5, 1, 0.01, delta).unwrap();
        assert!(next.log_exponent >= delta);
        let bad = AlgBoundParams { log_exponent: delta / 2.0, ..seed };
        assert!(tighten_step(&bad, 2.5, 1, 0.01, delta).is_err());
        let flat = AlgBoundParams { distance_exponent: 1.0, ..seed };
        assert!(tighten_step(&flat, 2.5, 1, 0.01, delta).is_err());
    }

    #[test]
    fn limits() {
        let t = fixpoint_gamma(2.5, 1, 0.01, 1e-12, 10_000).unwrap();
        assert!(t.converged);
        assert_relative_eq!(t.limit, 1.4925 / 0.5, epsilon = 1e-10);
        assert_relative_eq!(t.limit, 2.985, epsilon = 1e-10);
        let zero = fixpoint_gamma(2.5, 1, 0.0, 1e-12, 10_000).unwrap();
        assert_relative_eq!(zero.limit, 3.0, epsilon = 1e-10);
        let steep = fixpoint_gamma(2.9, 1, 0.0, 1e-12, 10_000).unwrap();
        assert_relative_eq!(steep.limit, 1.9 / 0.9, epsilon = 1e-10);
        assert_relative_eq!(steep.closed_form_limit, 2.1111, epsilon = 1e-4);
    }

    #[test]
    fn beta_constant_after_first_step_and_monotone_gamma() {
        let t = fixpoint_gamma(2.3, 1, 0.05, 1e-12, 10_000).unwrap();
        let beta1 = t.steps[1].beta;
        assert!(t.steps[1..].iter().all(|s| s.beta == beta1));
        let errs: Vec<f64> = t.steps.iter().map(|s| (s.gamma - t.closed_form_limit).abs()).collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn not_converged_and_domain_errors() {
        assert!(matches!(
            fixpoint_gamma(2.5, 1, 0.0, 1e-12, 10),
            Err(Error::NotConverged { max_iter: 10, .. })
        ));
        assert!(fixpoint_gamma(2.5, 1, 1.0 / 1.5, 1e-12, 100).is_err());
        assert!(fixpoint_gamma(2.5, 1, -0.1, 1e-12, 100).is_err());
        assert!(fixpoint_gamma(2.5, 1, 0.1, 0.0, 100).is_err());
    }

    #[test]
    fn evaluate_and_validity() {
        let b = AlgBoundParams {
            coefficient: 2.0,
            log_exponent: 1.0,
            time_exponent: 2.0,
            distance_exponent: 3.0,
            validity_c: 1.0,
            validity_delta: 1.0,
        };
        let e = std::f64::consts::E;
        assert_relative_eq!(b.evaluate(2.0, 3.0, e), 2.0 * 9.0 / 8.0, epsilon = 1e-14);
        assert!(b.is_valid_at(2.0, 2.0, e));
        assert!(!b.is_valid_at(2.0, 3.0, e));
    }
}
