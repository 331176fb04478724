//! Piecewise-linear trade-off function calculus.
//!
//! The privacy order on curves is reversed with respect to pointwise
//! comparison: `f ⪯ g` (f is at least as private as g) iff `f(α) >= g(α)` for
//! every `α`. Suprema therefore move pointwise *down*.

mod canonical;
mod chain;
mod curve;
mod envelope;
mod measure;
mod neyman_pearson;

pub use canonical::canonical_pair;
pub use chain::chain_rule;
pub use curve::{format_sig, grid_with_breakpoints, TradeoffFunction};
pub use envelope::{sup_set, tradeoff_oracle_mixture, MixtureWitness};
pub use measure::TradeoffMeasure;
pub use neyman_pearson::{np_tradeoff, RandomizedTest};

/// Number of uniform grid points used by oracle comparisons.
pub const ORACLE_GRID: usize = 101;

/// `f ⪯ g` in the privacy order: `f(α) >= g(α) - 1e-9` at every breakpoint
/// of either curve.
pub fn poset_leq(f: &TradeoffFunction, g: &TradeoffFunction) -> bool {
    f.dominates(g, crate::tol::EQ)
}

pub fn eval(f: &TradeoffFunction, alpha: f64) -> crate::error::Result<f64> {
    f.eval(alpha)
}

pub fn f_eps_delta(eps: f64, delta: f64) -> crate::error::Result<TradeoffFunction> {
    TradeoffFunction::eps_delta(eps, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_the_minimum() {
        let id = TradeoffFunction::identity();
        for f in [
            f_eps_delta(0.3, 0.0).unwrap(),
            f_eps_delta(2.0, 0.2).unwrap(),
            TradeoffFunction::from_breakpoints(vec![(0.0, 0.0), (1.0, 0.0)]).unwrap(),
        ] {
            assert!(poset_leq(&id, &f));
            assert!(poset_leq(&f, &f));
        }
    }

    #[test]
    fn larger_epsilon_is_higher_in_the_order() {
        let f2 = f_eps_delta(std::f64::consts::LN_2, 0.0).unwrap();
        let f3 = f_eps_delta(3f64.ln(), 0.0).unwrap();
        assert!(poset_leq(&f2, &f3));
        assert!(!poset_leq(&f3, &f2));
    }
}
