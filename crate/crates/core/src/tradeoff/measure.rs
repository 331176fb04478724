use super::{np_tradeoff, sup_set, TradeoffFunction};
use crate::distributions::{FiniteDistribution, PrivacyMeasure};
use crate::error::Result;

/// f-DP as a privacy measure: `D(P, Q) = T(P, Q)` with `f ⪯ g` iff `f >= g`
/// pointwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct TradeoffMeasure;

impl PrivacyMeasure for TradeoffMeasure {
    type Value = TradeoffFunction;

    fn name(&self) -> String {
        "tradeoff".into()
    }

    fn distance(&self, p: &FiniteDistribution, q: &FiniteDistribution) -> Result<TradeoffFunction> {
        Ok(np_tradeoff(p, q))
    }

    fn precedes(&self, a: &TradeoffFunction, b: &TradeoffFunction, tol: f64) -> bool {
        a.dominates(b, tol)
    }

    fn supremum(&self, values: &[TradeoffFunction]) -> Result<TradeoffFunction> {
        sup_set(values)
    }
}
