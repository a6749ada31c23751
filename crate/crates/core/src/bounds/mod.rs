//! Closed-form bound machinery for power-law interactions.
//!
//! Everything here is a pure function of its arguments. Logarithms are
//! natural throughout. Constants that are only known to exist (rather than
//! given explicitly) are exposed as parameters.

mod algebraic;
mod compare;
mod constants;
mod envelope;
mod exponential;
mod recursion;

pub use algebraic::{fixpoint_gamma, fixpoint_limit, seed_bound, tighten_step, AlgBoundParams, FixpointStep, FixpointTrace};
pub use compare::{compare_bounds, BoundComparison, BoundExponents, ExactValue, PhiDifference};
pub use constants::{default_nu, delta_constant, g_epsilon, g_tilde, lambda_constant, xi_constant};
pub use envelope::{
    correlator_envelope, envelope_shape, light_cone_exponent, theorem_epsilon_limit, theorem_envelope,
    untrunc_exponent, EnvelopeConstants, EnvelopePoint, LightCone,
};
pub use exponential::{base_bound, combine_bounds, extend_time, ExpBoundParams, TimeExtension};
pub use recursion::{
    choose_l, choose_n, closed_form_velocity, recursion_step, run_recursion, LChoice, LevelChoice,
    RecursionInputs, RecursionTrace,
};

use crate::error::{Error, Result};

/// Require `2d < α < 2d + 1`, the regime with a polynomial light cone.
pub(crate) fn check_polynomial_regime(alpha: f64, d: usize) -> Result<()> {
    let lo = 2.0 * d as f64;
    if !(alpha > lo && alpha < lo + 1.0) {
        return Err(Error::domain("alpha", alpha, format!("({}, {})", lo, lo + 1.0)));
    }
    Ok(())
}

pub(crate) fn check_dimension(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("d", 0.0, "[1, inf)"));
    }
    Ok(())
}
