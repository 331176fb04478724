use serde::{Deserialize, Serialize};

use super::processor::simulate_view;
use super::reduce::ReductionResult;
use crate::error::Result;
use crate::interactive::{enumerate_adversaries_on, view_distribution, Mechanism};
use crate::tol;
use crate::tradeoff::np_tradeoff;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub adversaries: usize,
    /// Largest per-transcript gap between the mechanism's view and the
    /// simulated one, over all adversaries, on `x` and `x_prime`.
    pub max_view_deviation: f64,
    pub max_view_deviation_prime: f64,
    /// Index of the adversary attaining the larger of the two.
    pub worst_adversary: Option<usize>,
    /// Adversaries for which the processor had no answer.
    pub undefined_responses: usize,
    /// `min (T(Y, Y') - privacy_curve)` over breakpoints; negative means the
    /// seeds are less private than the mechanism.
    pub curve_gap: f64,
    /// `|1 - mass|` of the seed distributions, larger of the two.
    pub seed_mass_error: f64,
    pub passed: bool,
}

/// Checks the reduction postconditions against every adversary reachable on
/// `(x, x_prime)`. Failures are reported, not returned as errors; only the
/// adversary enumeration itself can fail.
pub fn verify_reduction(
    m: &Mechanism,
    x: &str,
    x_prime: &str,
    result: &ReductionResult,
    guard: u64,
) -> Result<ReductionReport> {
    let adversaries = enumerate_adversaries_on(m, &[x, x_prime], guard)?;
    let mut dev = [0.0_f64; 2];
    let mut worst: Option<(usize, f64)> = None;
    let mut undefined = 0;
    for (i, b) in adversaries.iter().enumerate() {
        let mut local = 0.0_f64;
        for (k, (dataset, seeds)) in [(x, &result.y), (x_prime, &result.y_prime)].into_iter().enumerate() {
            let truth = view_distribution(m, dataset, b)?;
            match simulate_view(&result.proc, seeds, b) {
                Ok(sim) => {
                    let gap = truth.max_abs_diff(&sim);
                    dev[k] = dev[k].max(gap);
                    local = local.max(gap);
                }
                Err(_) => {
                    undefined += 1;
                    local = f64::INFINITY;
                }
            }
        }
        if worst.is_none_or(|w| local > w.1) {
            worst = Some((i, local));
        }
    }
    let curve_gap = np_tradeoff(&result.y, &result.y_prime).min_gap(&result.privacy_curve);
    let seed_mass_error = [&result.y, &result.y_prime]
        .iter()
        .map(|d| (1.0 - d.weights().iter().sum::<f64>()).abs())
        .fold(0.0, f64::max);
    let passed = dev[0] <= tol::EQ
        && dev[1] <= tol::EQ
        && undefined == 0
        && curve_gap >= -tol::EQ
        && seed_mass_error <= tol::EQ;
    Ok(ReductionReport {
        adversaries: adversaries.len(),
        max_view_deviation: dev[0],
        max_view_deviation_prime: dev[1],
        worst_adversary: worst.map(|w| w.0),
        undefined_responses: undefined,
        curve_gap,
        seed_mass_error,
        passed,
    })
}
