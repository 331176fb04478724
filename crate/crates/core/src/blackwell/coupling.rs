use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::channel::{find_channel, ChannelSearch};
use crate::distributions::{FiniteDistribution, JointDistribution, Outcome, StochasticKernel};
use crate::error::{Error, Result};
use crate::tol;
use crate::tradeoff::{canonical_pair, np_tradeoff, TradeoffFunction};

/// A shared canonical source for `f` driving one channel per coupled pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiCoupling {
    pub source: FiniteDistribution,
    pub source_prime: FiniteDistribution,
    pub channels: Vec<StochasticKernel>,
    pub joint: JointDistribution,
    pub joint_prime: JointDistribution,
}

/// Couples two pairs that are each at least as private as `f` so that the
/// joint pair is still at least as private as `f`.
pub fn couple(
    f: &TradeoffFunction,
    x: &FiniteDistribution,
    x_prime: &FiniteDistribution,
    y: &FiniteDistribution,
    y_prime: &FiniteDistribution,
) -> Result<(JointDistribution, JointDistribution)> {
    let c = multi_couple(f, &[(x.clone(), x_prime.clone()), (y.clone(), y_prime.clone())])?;
    Ok((c.joint, c.joint_prime))
}

/// Joint outcomes are `k`-tuples aligned with `pairs`.
pub fn multi_couple(f: &TradeoffFunction, pairs: &[(FiniteDistribution, FiniteDistribution)]) -> Result<MultiCoupling> {
    if pairs.is_empty() {
        return Err(Error::InvalidParam("nothing to couple".into()));
    }
    for (i, (x, x_prime)) in pairs.iter().enumerate() {
        let t = np_tradeoff(x, x_prime);
        if !t.dominates(f, tol::EQ) {
            return Err(Error::DominanceViolated(format!(
                "pair {i} falls below the target curve by {:e}",
                -t.min_gap(f)
            )));
        }
    }
    let (source, source_prime) = canonical_pair(f);
    let mut channels = Vec::with_capacity(pairs.len());
    for (i, (x, x_prime)) in pairs.iter().enumerate() {
        match find_channel(&source, &source_prime, x, x_prime)? {
            ChannelSearch::Feasible(k) => channels.push(k),
            ChannelSearch::Infeasible { phase_one_optimum } => {
                return Err(Error::DominanceViolated(format!(
                    "no channel onto pair {i} (phase-1 optimum {phase_one_optimum:e})"
                )))
            }
        }
    }

    // Every channel has a row for each supported source outcome.
    let inputs: Vec<&Outcome> = channels[0].inputs().collect();
    let mut acc: BTreeMap<Outcome, (f64, f64)> = BTreeMap::new();
    for z in inputs {
        let (pz, pz_prime) = (source.prob(z), source_prime.prob(z));
        let mut partial: Vec<(Vec<Outcome>, f64)> = vec![(Vec::new(), 1.0)];
        for k in &channels {
            let row = k.row_weights(z).expect("shared row set");
            let mut next = Vec::new();
            for (prefix, w) in &partial {
                for (o, r) in k.outputs().iter().zip(row) {
                    if *r > 0.0 {
                        let mut t = prefix.clone();
                        t.push(o.clone());
                        next.push((t, w * r));
                    }
                }
            }
            partial = next;
        }
        for (t, w) in partial {
            let e = acc.entry(Outcome::Tuple(t)).or_insert((0.0, 0.0));
            e.0 += pz * w;
            e.1 += pz_prime * w;
        }
    }
    let joint = FiniteDistribution::normalized(acc.iter().map(|(o, w)| (o.clone(), w.0)))?;
    let joint_prime = FiniteDistribution::normalized(acc.into_iter().map(|(o, w)| (o, w.1)))?;
    Ok(MultiCoupling {
        source,
        source_prime,
        channels,
        joint: JointDistribution::new(joint)?,
        joint_prime: JointDistribution::new(joint_prime)?,
    })
}
