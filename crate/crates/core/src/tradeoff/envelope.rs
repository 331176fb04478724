use serde::{Deserialize, Serialize};

use super::TradeoffFunction;
use crate::error::{Error, Result};
use crate::tol;

/// Least upper bound of a finite set of trade-off functions in the privacy
/// order: the largest trade-off function lying below every member.
///
/// This is the lower convex envelope of the pointwise minimum. Its vertices
/// are always breakpoints of some member, so the hull of all member
/// breakpoints is exact.
pub fn sup_set(curves: &[TradeoffFunction]) -> Result<TradeoffFunction> {
    match curves {
        [] => Err(Error::EmptySet),
        [only] => Ok(only.clone()),
        _ => Ok(TradeoffFunction::from_points_unchecked(
            curves.iter().flat_map(|c| c.breakpoints().iter().copied()).collect(),
        )),
    }
}

/// A random choice `F` of a member of a finite set of trade-off functions,
/// together with a type-I budget `A(f)` for each member.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureWitness {
    pub weights: Vec<f64>,
    pub budgets: Vec<f64>,
}

impl MixtureWitness {
    pub fn new(weights: Vec<f64>, budgets: Vec<f64>) -> Result<Self> {
        if weights.len() != budgets.len() || weights.is_empty() {
            return Err(Error::InvalidParam("witness weights and budgets differ in length".into()));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w >= 0.0)) || (total - 1.0).abs() > tol::MASS {
            return Err(Error::InvalidParam("witness weights are not a distribution".into()));
        }
        if let Some(&b) = budgets.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(Error::OutOfRange(b));
        }
        Ok(MixtureWitness { weights, budgets })
    }

    /// `E[A(F)]`.
    pub fn spent(&self) -> f64 {
        self.weights.iter().zip(&self.budgets).map(|(w, a)| w * a).sum()
    }
}

/// `E[F(A(F))]` for a witness with `E[A(F)] <= alpha`.
pub fn tradeoff_oracle_mixture(
    set: &[TradeoffFunction],
    witness: &MixtureWitness,
    alpha: f64,
) -> Result<f64> {
    if witness.weights.len() != set.len() {
        return Err(Error::InvalidParam("witness does not match the set".into()));
    }
    let spent = witness.spent();
    if spent > alpha + tol::EQ {
        return Err(Error::BudgetViolation { spent, alpha });
    }
    set.iter()
        .zip(witness.weights.iter().zip(&witness.budgets))
        .map(|(f, (w, a))| f.eval(*a).map(|v| w * v))
        .sum()
}
