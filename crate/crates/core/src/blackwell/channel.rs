use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::simplex::{solve_feasibility, Feasibility, FeasibilityProblem};
use crate::distributions::{FiniteDistribution, Outcome, StochasticKernel};
use crate::error::Result;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ChannelSearch {
    Feasible(StochasticKernel),
    Infeasible { phase_one_optimum: f64 },
}

impl ChannelSearch {
    pub fn kernel(&self) -> Option<&StochasticKernel> {
        match self {
            ChannelSearch::Feasible(k) => Some(k),
            ChannelSearch::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.kernel().is_some()
    }
}

/// Searches for a kernel `K` with `K(p) = x` and `K(p_prime) = x_prime`.
///
/// Rows cover the union of both source supports; columns cover the union of
/// both target supports. Such a kernel exists exactly when
/// `T(p, p_prime) <= T(x, x_prime)` pointwise.
pub fn find_channel(
    p: &FiniteDistribution,
    p_prime: &FiniteDistribution,
    x: &FiniteDistribution,
    x_prime: &FiniteDistribution,
) -> Result<ChannelSearch> {
    let inputs: Vec<Outcome> = p
        .support()
        .chain(p_prime.support())
        .map(|(o, _)| o.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let outputs: Vec<Outcome> = x
        .support()
        .chain(x_prime.support())
        .map(|(o, _)| o.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (ni, no) = (inputs.len(), outputs.len());
    let var = |z: usize, o: usize| z * no + o;

    let mut rows = Vec::with_capacity(ni + 2 * no);
    let mut rhs = Vec::with_capacity(ni + 2 * no);
    for z in 0..ni {
        let mut row = vec![0.0; ni * no];
        for o in 0..no {
            row[var(z, o)] = 1.0;
        }
        rows.push(row);
        rhs.push(1.0);
    }
    for (source, target) in [(p, x), (p_prime, x_prime)] {
        for (o, label) in outputs.iter().enumerate() {
            let mut row = vec![0.0; ni * no];
            for (z, input) in inputs.iter().enumerate() {
                row[var(z, o)] = source.prob(input);
            }
            rows.push(row);
            rhs.push(target.prob(label));
        }
    }

    let problem = FeasibilityProblem::new(ni * no, rows, rhs)?;
    match solve_feasibility(&problem)? {
        Feasibility::Infeasible { phase_one_optimum } => Ok(ChannelSearch::Infeasible { phase_one_optimum }),
        Feasibility::Feasible(point) => {
            let dense = inputs
                .into_iter()
                .enumerate()
                .map(|(z, input)| {
                    let mut row: Vec<f64> = point[z * no..(z + 1) * no].to_vec();
                    let total: f64 = row.iter().sum();
                    row.iter_mut().for_each(|v| *v /= total);
                    (input, row)
                })
                .collect();
            Ok(ChannelSearch::Feasible(StochasticKernel::from_dense(outputs, dense)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::pushforward;
    use crate::tradeoff::{canonical_pair, np_tradeoff};

    fn rr(eps: f64) -> (FiniteDistribution, FiniteDistribution) {
        let p = eps.exp() / (1.0 + eps.exp());
        (
            FiniteDistribution::bernoulli(p).unwrap(),
            FiniteDistribution::bernoulli(1.0 - p).unwrap(),
        )
    }

    fn check(k: &StochasticKernel, p: &FiniteDistribution, p2: &FiniteDistribution, x: &FiniteDistribution, x2: &FiniteDistribution) {
        assert!(pushforward(p, k).unwrap().approx_eq(x, 1e-9));
        assert!(pushforward(p2, k).unwrap().approx_eq(x2, 1e-9));
    }

    #[test]
    fn self_channel() {
        let p = FiniteDistribution::new(vec![1.into(), 2.into(), 3.into()], vec![0.5, 0.3, 0.2]).unwrap();
        let q = FiniteDistribution::new(vec![1.into(), 2.into(), 3.into()], vec![0.2, 0.3, 0.5]).unwrap();
        let found = find_channel(&p, &q, &p, &q).unwrap();
        check(found.kernel().unwrap(), &p, &q, &p, &q);
    }

    #[test]
    fn randomized_response_orientation() {
        let (a, a2) = rr(3.0_f64.ln());
        let (b, b2) = rr(2.0_f64.ln());
        let found = find_channel(&a, &a2, &b, &b2).unwrap();
        check(found.kernel().unwrap(), &a, &a2, &b, &b2);
        assert!(!find_channel(&b, &b2, &a, &a2).unwrap().is_feasible());
    }

    #[test]
    fn from_canonical_source() {
        let x = FiniteDistribution::new(vec![0.into(), 1.into(), 2.into()], vec![0.6, 0.3, 0.1]).unwrap();
        let x2 = FiniteDistribution::new(vec![0.into(), 1.into(), 2.into()], vec![0.1, 0.3, 0.6]).unwrap();
        let (p, p2) = canonical_pair(&np_tradeoff(&x, &x2));
        let found = find_channel(&p, &p2, &x, &x2).unwrap();
        check(found.kernel().unwrap(), &p, &p2, &x, &x2);
    }

    #[test]
    fn disjoint_supports() {
        // a perfectly distinguishable source can produce anything
        let (p, p2) = (FiniteDistribution::point(0), FiniteDistribution::point(1));
        let (x, x2) = rr(0.7);
        let found = find_channel(&p, &p2, &x, &x2).unwrap();
        check(found.kernel().unwrap(), &p, &p2, &x, &x2);
        assert!(!find_channel(&x, &x2, &p, &p2).unwrap().is_feasible());
    }
}
