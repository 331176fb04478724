//! Fixtures shared by the benchmarks under `benches/`.

use concomp_core::interactive::{concomp, randomized_response, Mechanism};
use concomp_core::{FiniteDistribution, Outcome};

/// A pair on `n` outcomes with a geometric likelihood ratio, so every
/// outcome contributes a breakpoint.
pub fn geometric_pair(n: usize, ratio: f64) -> (FiniteDistribution, FiniteDistribution) {
    let outcomes: Vec<Outcome> = (0..n as i64).map(Outcome::Int).collect();
    let up: Vec<(Outcome, f64)> = outcomes.iter().cloned().zip((0..n).map(|i| ratio.powi(i as i32))).collect();
    let down: Vec<(Outcome, f64)> = outcomes.into_iter().zip((0..n).map(|i| ratio.powi(-(i as i32)))).collect();
    (
        FiniteDistribution::normalized(up).expect("positive masses"),
        FiniteDistribution::normalized(down).expect("positive masses"),
    )
}

/// `k` concurrent copies of randomized response.
pub fn rr_composition(k: usize, eps: f64) -> Mechanism {
    let rr = randomized_response(eps).expect("eps >= 0");
    concomp(&vec![rr; k]).expect("identical components compose")
}
