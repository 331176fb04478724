use rayon::prelude::*;

use super::adversary::{enumerate_adversaries_on, view_distribution};
use super::mechanism::Mechanism;
use crate::error::Result;
use crate::tradeoff::{np_tradeoff, sup_set, TradeoffFunction};

/// Tightest `f` such that `m` is f-DP on `(x, x_prime)`: the supremum over all
/// deterministic adversaries of the trade-off between their two views.
pub fn mechanism_privacy(m: &Mechanism, x: &str, x_prime: &str, guard: u64) -> Result<TradeoffFunction> {
    let adversaries = enumerate_adversaries_on(m, &[x, x_prime], guard)?;
    let curves = adversaries
        .par_iter()
        .map(|b| Ok(np_tradeoff(&view_distribution(m, x, b)?, &view_distribution(m, x_prime, b)?)))
        .collect::<Result<Vec<_>>>()?;
    sup_set(&curves)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::distributions::{FiniteDistribution, Outcome};
    use crate::interactive::{randomized_response, Round};
    use crate::tol::DEFAULT_GUARD;

    fn same(a: &TradeoffFunction, b: &TradeoffFunction) -> bool {
        a.dominates(b, 1e-9) && b.dominates(a, 1e-9)
    }

    fn bit(hit: &str, miss: &str, p: f64) -> FiniteDistribution {
        FiniteDistribution::from_pairs([(Outcome::text(hit), p), (Outcome::text(miss), 1.0 - p)]).unwrap()
    }

    #[test]
    fn rr_is_f_eps() {
        for eps in [0.0, 0.3, 2.0_f64.ln(), 1.7] {
            let m = randomized_response(eps).unwrap();
            let f = mechanism_privacy(&m, "0", "1", DEFAULT_GUARD).unwrap();
            assert!(same(&f, &TradeoffFunction::eps_delta(eps, 0.0).unwrap()), "eps {eps}");
        }
    }

    #[test]
    fn dataset_blind_mechanism() {
        let mut k = BTreeMap::new();
        for d in ["x", "y"] {
            k.insert(format!("{d}|q"), bit("a", "b", 0.3));
        }
        let m = Mechanism::new(vec!["x".into(), "y".into()], vec![Round::new(["q"], ["a", "b"])], false, k).unwrap();
        let f = mechanism_privacy(&m, "x", "y", DEFAULT_GUARD).unwrap();
        assert!(same(&f, &TradeoffFunction::identity()));
    }

    #[test]
    fn two_query_sup() {
        let (p1, p2) = (0.6, 0.9);
        let mut k = BTreeMap::new();
        k.insert("x|q1".into(), bit("1", "0", p1));
        k.insert("y|q1".into(), bit("0", "1", p1));
        k.insert("x|q2".into(), bit("1", "0", p2));
        k.insert("y|q2".into(), bit("0", "1", p2));
        let m = Mechanism::new(
            vec!["x".into(), "y".into()],
            vec![Round::new(["q1", "q2"], ["0", "1"])],
            false,
            k,
        )
        .unwrap();
        let f = mechanism_privacy(&m, "x", "y", DEFAULT_GUARD).unwrap();
        let eps2 = (p2 / (1.0 - p2)).ln();
        assert!(same(&f, &TradeoffFunction::eps_delta(eps2, 0.0).unwrap()));
    }
}
