use std::collections::BTreeMap;

use super::TradeoffFunction;
use crate::distributions::{FiniteDistribution, Outcome};
use crate::error::{Error, Result};

/// Trade-off function of a two-stage pair `(X, Y)` vs `(X', Y')` from the
/// first-stage laws and the conditional curves `f_x = T(Y|x, Y'|x)`.
///
/// Computes `α ↦ inf { E_{X'}[f_x(α_x)] : E_X[α_x] <= α }`. Outcomes seen only
/// under `X` spend no budget (`α_x = 0`); outcomes seen only under `X'` are
/// rejected outright (`α_x = 1`, cost `f_x(1) = 0`). The program is separable
/// and convex, so spending budget on segments in decreasing order of
/// cost-per-budget `(p'_x |Δβ|) / (p_x Δα)` is exact.
pub fn chain_rule(
    first: &FiniteDistribution,
    first_prime: &FiniteDistribution,
    conditionals: &BTreeMap<Outcome, TradeoffFunction>,
) -> Result<TradeoffFunction> {
    let pm = first.to_map();
    let qm = first_prime.to_map();
    let mut base_cost = 0.0;
    let mut total_budget = 0.0;
    // (efficiency, outcome, segment index, budget, cost reduction)
    let mut segments: Vec<(f64, &Outcome, usize, f64, f64)> = Vec::new();
    for (x, &px) in pm.iter().filter(|(_, &w)| w > 0.0) {
        let qx = qm.get(x).copied().unwrap_or(0.0);
        if qx <= 0.0 {
            continue;
        }
        let f = conditionals.get(x).ok_or_else(|| Error::MissingConditional(x.clone()))?;
        base_cost += qx * f.breakpoints()[0].1;
        total_budget += px;
        for (k, ((a0, b0), (a1, b1))) in f.segments().enumerate() {
            let budget = px * (a1 - a0);
            let gain = qx * (b0 - b1);
            segments.push((gain / budget, x, k, budget, gain));
        }
    }
    segments.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)).then(a.2.cmp(&b.2)));

    let mut points = Vec::with_capacity(segments.len() + 2);
    let (mut alpha, mut cost) = (0.0, base_cost);
    points.push((alpha, cost));
    for (_, _, _, budget, gain) in segments {
        alpha += budget;
        cost -= gain;
        points.push((alpha, cost.max(0.0)));
    }
    if total_budget < 1.0 {
        points.push((total_budget, 0.0));
    }
    points.push((1.0, 0.0));
    Ok(TradeoffFunction::from_points_unchecked(points))
}
