use super::TradeoffFunction;
use crate::distributions::{FiniteDistribution, Outcome};

/// A pair `(P, P')` with `T(P, P') = f`.
///
/// Each segment of `f` becomes one outcome carrying `Δα` under `P` and `-Δβ`
/// under `P'`; when `f(0) < 1` an extra outcome holds the `1 - f(0)` mass
/// that `P'` places where `P` has none. A flat tail at zero is the final
/// segment and gets `P'`-mass zero. Outcomes are labeled `0, 1, …` in segment
/// order, with the extra outcome labeled `-1`.
pub fn canonical_pair(f: &TradeoffFunction) -> (FiniteDistribution, FiniteDistribution) {
    let mut outcomes = Vec::new();
    let mut p = Vec::new();
    let mut p_prime = Vec::new();
    let head = f.breakpoints()[0].1;
    if head < 1.0 {
        outcomes.push(Outcome::Int(-1));
        p.push(0.0);
        p_prime.push(1.0 - head);
    }
    for (k, ((a0, b0), (a1, b1))) in f.segments().enumerate() {
        outcomes.push(Outcome::Int(k as i64));
        p.push(a1 - a0);
        p_prime.push(b0 - b1);
    }
    let pairs_p: Vec<_> = outcomes.iter().cloned().zip(p).collect();
    let pairs_q = outcomes.into_iter().zip(p_prime);
    (
        FiniteDistribution::normalized(pairs_p).expect("segment lengths sum to one"),
        FiniteDistribution::normalized(pairs_q).expect("segment drops sum to one"),
    )
}
