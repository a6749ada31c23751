//! Side-by-side comparison of three power-law bounds of the form
//! `‖[A(t), B]‖ ≤ c t^γ / r^β`, in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub value: f64,
    pub exact: String,
}

impl From<&BigRational> for ExactValue {
    fn from(q: &BigRational) -> Self {
        ExactValue {
            value: q.to_f64().unwrap_or(f64::NAN),
            exact: q.to_string(),
        }
    }
}

/// Exponents of one bound. Primed exponents govern the truncation error
/// `‖A(t) − Ã(t)‖ ≲ t^{γ′}/r^{β′}`; `φ = γ′/β′`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundExponents {
    pub name: String,
    pub gamma: ExactValue,
    pub beta: ExactValue,
    pub gamma_prime: ExactValue,
    pub beta_prime: ExactValue,
    pub phi: ExactValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiDifference {
    pub pair: String,
    /// From the tabulated `(γ′, β′)`.
    pub direct: ExactValue,
    /// From the published closed-form difference.
    pub stated_formula: ExactValue,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub alpha: ExactValue,
    pub d: usize,
    pub bounds: Vec<BoundExponents>,
    pub differences: Vec<PhiDifference>,
}

impl BoundComparison {
    /// True when any stated difference formula disagrees with the table.
    pub fn discrepancy(&self) -> bool {
        self.differences.iter().any(|d| !d.agree)
    }

    pub fn bound(&self, name: &str) -> Option<&BoundExponents> {
        self.bounds.iter().find(|b| b.name == name)
    }

    pub fn difference(&self, pair: &str) -> Option<&PhiDifference> {
        self.differences.iter().find(|d| d.pair == pair)
    }
}

struct Row {
    gamma: BigRational,
    beta: BigRational,
    gamma_prime: BigRational,
    beta_prime: BigRational,
}

impl Row {
    fn phi(&self) -> BigRational {
        &self.gamma_prime / &self.beta_prime
    }
}

/// Tabulated exponents for `2d < α < 2d+1`:
///
/// | bound | γ | β | γ′ | β′ |
/// |---|---|---|---|---|
/// | B1 | (α−d)/(α−2d) | α−d | γ+1 | β |
/// | B2 | α(α−d+1)/(α−2d) | α−d | γ+1 | β |
/// | B3 | α−d | α−2d | γ | β |
///
/// `α` is converted to the rational with the same binary value, so all
/// arithmetic below is exact.
pub fn compare_bounds(alpha: f64, d: usize) -> Result<BoundComparison> {
    super::check_polynomial_regime(alpha, d)?;
    let a = BigRational::from_float(alpha).ok_or_else(|| Error::domain("alpha", alpha, "finite"))?;
    Ok(compare_bounds_exact(&a, d))
}

pub(crate) fn compare_bounds_exact(alpha: &BigRational, d: usize) -> BoundComparison {
    let one = BigRational::one();
    let dq = BigRational::from_integer(BigInt::from(d));
    let two_d = &dq + &dq;
    let a_minus_d = alpha - &dq;
    let a_minus_2d = alpha - &two_d;

    let b1_gamma = &a_minus_d / &a_minus_2d;
    let b1 = Row {
        gamma_prime: &b1_gamma + &one,
        gamma: b1_gamma,
        beta: a_minus_d.clone(),
        beta_prime: a_minus_d.clone(),
    };
    let b2_gamma = alpha * (&a_minus_d + &one) / &a_minus_2d;
    let b2 = Row {
        gamma_prime: &b2_gamma + &one,
        gamma: b2_gamma,
        beta: a_minus_d.clone(),
        beta_prime: a_minus_d.clone(),
    };
    let b3 = Row {
        gamma: a_minus_d.clone(),
        beta: a_minus_2d.clone(),
        gamma_prime: a_minus_d.clone(),
        beta_prime: a_minus_2d.clone(),
    };

    let denom = &a_minus_d * &a_minus_2d;
    let stated_12 = -((alpha - &one) * &a_minus_d + alpha) / &denom;
    let stated_13 = -(&a_minus_d * &a_minus_d + &dq) / &denom;
    let direct_12 = b1.phi() - b2.phi();
    let direct_13 = b1.phi() - b3.phi();

    let bounds = [("B1", &b1), ("B2", &b2), ("B3", &b3)]
        .into_iter()
        .map(|(name, row)| BoundExponents {
            name: name.to_string(),
            gamma: (&row.gamma).into(),
            beta: (&row.beta).into(),
            gamma_prime: (&row.gamma_prime).into(),
            beta_prime: (&row.beta_prime).into(),
            phi: (&row.phi()).into(),
        })
        .collect();

    let diff = |pair: &str, direct: BigRational, stated: BigRational| PhiDifference {
        pair: pair.to_string(),
        agree: (&direct - &stated).is_zero(),
        direct: (&direct).into(),
        stated_formula: (&stated).into(),
    };

    BoundComparison {
        alpha: alpha.into(),
        d,
        bounds,
        differences: vec![diff("B1-B2", direct_12, stated_12), diff("B1-B3", direct_13, stated_13)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn table_at_two_and_a_half() {
        let c = compare_bounds(2.5, 1).unwrap();
        let exact = |name: &str| {
            let b = c.bound(name).unwrap();
            [&b.gamma, &b.beta, &b.gamma_prime, &b.beta_prime].map(|v| v.exact.clone())
        };
        assert_eq!(exact("B1"), ["3", "3/2", "4", "3/2"]);
        assert_eq!(exact("B2"), ["25/2", "3/2", "27/2", "3/2"]);
        assert_eq!(exact("B3"), ["3/2", "1/2", "3/2", "1/2"]);
    }

    #[test]
    fn phi_differences() {
        let c = compare_bounds(2.5, 1).unwrap();
        let d12 = c.difference("B1-B2").unwrap();
        assert_eq!(d12.direct.exact, "-19/3");
        assert_eq!(d12.stated_formula.exact, "-19/3");
        assert!(d12.agree);
        let d13 = c.difference("B1-B3").unwrap();
        assert_eq!(d13.direct.exact, "-1/3");
        assert_eq!(d13.stated_formula.exact, "-13/3");
        assert!(!d13.agree);
        assert!(c.discrepancy());
    }

    #[test]
    fn b1_b2_formula_holds_for_every_dimension() {
        for d in 1..=4usize {
            for k in 1..10 {
                let alpha = q(20 * d as i64 * 10 + 10 * k, 100);
                let c = compare_bounds_exact(&alpha, d);
                assert!(c.difference("B1-B2").unwrap().agree, "d={d} alpha={alpha}");
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(compare_bounds(2.0, 1).is_err());
        assert!(compare_bounds(3.0, 1).is_err());
        assert!(compare_bounds(4.5, 2).is_ok());
    }
}
