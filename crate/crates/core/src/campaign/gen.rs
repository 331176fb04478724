//! Random instances for the campaigns.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::distributions::{FiniteDistribution, Outcome, StochasticKernel};
use crate::error::Result;
use crate::interactive::{kernel_key, Mechanism, Round, Step};

/// Chance that a weight is forced to zero, so supports differ.
const ZERO_WEIGHT: f64 = 0.15;

pub fn weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(ZERO_WEIGHT) { 0.0 } else { rng.random::<f64>() + 1e-3 })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        let i = rng.random_range(0..n);
        w[i] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Strictly positive weights.
pub fn positive_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-2).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

pub fn distribution(rng: &mut ChaCha8Rng, labels: &[Outcome]) -> FiniteDistribution {
    FiniteDistribution::new(labels.to_vec(), weights(rng, labels.len())).expect("normalized weights")
}

pub fn int_labels(n: usize) -> Vec<Outcome> {
    (0..n as i64).map(Outcome::Int).collect()
}

/// Two distributions on `0..k` for a random `k <= max_support`.
pub fn pair(rng: &mut ChaCha8Rng, max_support: usize) -> (FiniteDistribution, FiniteDistribution) {
    let labels = int_labels(rng.random_range(1..=max_support));
    (distribution(rng, &labels), distribution(rng, &labels))
}

pub fn kernel(rng: &mut ChaCha8Rng, inputs: &[Outcome], outputs: &[Outcome]) -> StochasticKernel {
    StochasticKernel::from_rows(inputs.iter().map(|i| (i.clone(), distribution(rng, outputs)))).expect("distinct inputs")
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub depth: usize,
    pub queries: usize,
    pub answers: usize,
    pub mech_first: bool,
}

impl Shape {
    pub fn random(rng: &mut ChaCha8Rng, max_depth: usize, max_alphabet: usize) -> Shape {
        let depth = rng.random_range(1..=max_depth);
        Shape {
            depth,
            queries: rng.random_range(1..=max_alphabet),
            answers: rng.random_range(1..=max_alphabet.max(2)),
            mech_first: depth > 1 && rng.random_bool(0.5),
        }
    }
}

/// A mechanism on datasets `"0"` and `"1"` with kernels on every prefix,
/// reachable or not. Round `r` uses queries `q1…` and answers `a1…`.
pub fn mechanism(rng: &mut ChaCha8Rng, shape: Shape) -> Result<Mechanism> {
    let answers: Vec<String> = (1..=shape.answers).map(|i| format!("a{i}")).collect();
    let queries: Vec<String> = (1..=shape.queries).map(|i| format!("q{i}")).collect();
    let rounds: Vec<Round> = (0..shape.depth)
        .map(|r| Round {
            queries: if shape.mech_first && r == 0 { Vec::new() } else { queries.clone() },
            answers: answers.clone(),
        })
        .collect();
    let datasets = vec!["0".to_string(), "1".to_string()];
    let labels: Vec<Outcome> = answers.iter().map(|a| Outcome::text(a.as_str())).collect();
    let mut kernel = BTreeMap::new();
    for d in &datasets {
        fill(rng, &rounds, shape.mech_first, d, &labels, &mut Vec::new(), &mut kernel);
    }
    Mechanism::new(datasets, rounds, shape.mech_first, kernel)
}

fn fill(
    rng: &mut ChaCha8Rng,
    rounds: &[Round],
    mech_first: bool,
    dataset: &str,
    labels: &[Outcome],
    steps: &mut Vec<Step>,
    kernel: &mut BTreeMap<String, FiniteDistribution>,
) {
    let r = steps.len();
    if r == rounds.len() {
        return;
    }
    let pending: Vec<String> = if mech_first && r == 0 {
        vec![String::new()]
    } else {
        rounds[r].queries.clone()
    };
    for q in pending {
        kernel.insert(kernel_key(dataset, steps, &q), distribution(rng, labels));
        for a in &rounds[r].answers {
            steps.push((q.clone(), a.clone()));
            fill(rng, rounds, mech_first, dataset, labels, steps, kernel);
            steps.pop();
        }
    }
}

/// A component for composition campaigns: depth one with up to two queries,
/// or depth two with a single query per round or a prologue.
pub fn component(rng: &mut ChaCha8Rng, max_alphabet: usize) -> Result<Mechanism> {
    let small = max_alphabet.min(2);
    let shape = match rng.random_range(0..3) {
        0 => Shape {
            depth: 1,
            queries: rng.random_range(1..=small),
            answers: 2,
            mech_first: false,
        },
        1 => Shape {
            depth: 2,
            queries: 1,
            answers: 2,
            mech_first: false,
        },
        _ => Shape {
            depth: 2,
            queries: rng.random_range(1..=small),
            answers: 2,
            mech_first: true,
        },
    };
    mechanism(rng, shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_mechanisms_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let shape = Shape::random(&mut rng, 3, 3);
            let m = mechanism(&mut rng, shape).unwrap();
            assert_eq!(m.depth(), shape.depth);
        }
    }

    #[test]
    fn weights_are_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..6 {
            let w = weights(&mut rng, n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
