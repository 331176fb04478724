use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::processor::PostProcessor;
use crate::blackwell::multi_couple;
use crate::distributions::{FiniteDistribution, Outcome};
use crate::error::Result;
use crate::interactive::{mechanism_privacy, Mechanism};
use crate::tradeoff::TradeoffFunction;

/// A non-interactive pair `(Y, Y')` and a post-processor that turns a sample
/// of either into an interaction indistinguishable from the mechanism on the
/// corresponding dataset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReductionResult {
    pub y: FiniteDistribution,
    pub y_prime: FiniteDistribution,
    pub proc: PostProcessor,
    /// `mechanism_privacy` of the source mechanism on the pair.
    pub privacy_curve: TradeoffFunction,
}

type Rules = BTreeMap<Outcome, BTreeMap<String, String>>;

struct Node {
    y: FiniteDistribution,
    y_prime: FiniteDistribution,
    rules: Rules,
}

const X: &str = "x";
const X_PRIME: &str = "x'";

/// Reduces `m` on `(x, x_prime)` to a non-interactive pair.
///
/// The recursion follows the speaker of the first round. When the mechanism
/// speaks, the seed records its answer `a` next to the seed of the residual
/// mechanism after `a`. When the adversary speaks, the residual seeds for all
/// possible queries are coupled through one canonical source for the
/// mechanism's privacy curve, and the processor reads the coordinate of the
/// query actually asked. A single possible query needs no coupling.
pub fn reduce(m: &Mechanism, x: &str, x_prime: &str, guard: u64) -> Result<ReductionResult> {
    let base = m.relabel_datasets(&[(X, x), (X_PRIME, x_prime)])?;
    let privacy_curve = mechanism_privacy(&base, X, X_PRIME, guard)?;
    let node = reduce_node(&base, guard)?;
    Ok(ReductionResult {
        y: node.y,
        y_prime: node.y_prime,
        proc: PostProcessor::new(m.rounds().to_vec(), m.mech_first(), node.rules),
        privacy_curve,
    })
}

fn reduce_node(m: &Mechanism, guard: u64) -> Result<Node> {
    if m.depth() == 0 {
        let seed = Outcome::unit();
        return Ok(Node {
            y: FiniteDistribution::point(seed.clone()),
            y_prime: FiniteDistribution::point(seed.clone()),
            rules: BTreeMap::from([(seed, BTreeMap::new())]),
        });
    }
    if m.mech_first() {
        speak_first(m, guard)
    } else {
        listen_first(m, guard)
    }
}

fn speak_first(m: &Mechanism, guard: u64) -> Result<Node> {
    let a_dist = m.kernel(X, &[], "")?;
    let a_dist_prime = m.kernel(X_PRIME, &[], "")?;
    let answers: BTreeSet<&Outcome> = a_dist.support().chain(a_dist_prime.support()).map(|p| p.0).collect();
    let mut y = Vec::new();
    let mut y_prime = Vec::new();
    let mut rules = Rules::new();
    for o in answers {
        let a = o.as_text().expect("validated answer label");
        let (pa, pa_prime) = (a_dist.prob(o), a_dist_prime.prob(o));
        // a branch one dataset never reaches is resolved with the other's tree
        let sub = match (pa > 0.0, pa_prime > 0.0) {
            (true, true) => m.after_answer(a)?,
            (true, false) => m.relabel_datasets(&[(X, X), (X_PRIME, X)])?.after_answer(a)?,
            _ => m.relabel_datasets(&[(X, X_PRIME), (X_PRIME, X_PRIME)])?.after_answer(a)?,
        };
        let terminal = sub.depth() == 0;
        let child = reduce_node(&sub, guard)?;
        let lift = |c: &Outcome| {
            if terminal {
                o.clone()
            } else {
                Outcome::Tuple(vec![o.clone(), c.clone()])
            }
        };
        y.extend(child.y.iter().map(|(c, w)| (lift(c), pa * w)));
        y_prime.extend(child.y_prime.iter().map(|(c, w)| (lift(c), pa_prime * w)));
        for (c, child_rules) in child.rules {
            let mut r: BTreeMap<String, String> = child_rules
                .into_iter()
                .map(|(k, v)| (format!("={a};{k}"), v))
                .collect();
            r.insert(String::new(), a.to_string());
            rules.insert(lift(&c), r);
        }
    }
    Ok(Node {
        y: FiniteDistribution::normalized(y)?,
        y_prime: FiniteDistribution::normalized(y_prime)?,
        rules,
    })
}

fn listen_first(m: &Mechanism, guard: u64) -> Result<Node> {
    let queries = &m.rounds()[0].queries;
    let mut children = Vec::with_capacity(queries.len());
    for q in queries {
        let child = reduce_node(&m.after_query(q)?, guard)?;
        // the child is mechanism-first: its keys are "" or "=a;…"
        let rules: Rules = child
            .rules
            .into_iter()
            .map(|(c, r)| (c, r.into_iter().map(|(k, v)| (format!("{q}{k}"), v)).collect()))
            .collect();
        children.push(Node { rules, ..child });
    }
    if children.len() == 1 {
        return Ok(children.pop().expect("one child"));
    }
    let d = mechanism_privacy(m, X, X_PRIME, guard)?;
    let pairs: Vec<_> = children.iter().map(|c| (c.y.clone(), c.y_prime.clone())).collect();
    let coupling = multi_couple(&d, &pairs)?;
    let mut rules = Rules::new();
    for (seed, _) in coupling.joint.dist().iter() {
        let parts = seed.as_tuple().expect("joint outcome");
        let mut merged = BTreeMap::new();
        for (child, part) in children.iter().zip(parts) {
            merged.extend(child.rules[part].iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        rules.insert(seed.clone(), merged);
    }
    Ok(Node {
        y: coupling.joint.into_dist(),
        y_prime: coupling.joint_prime.into_dist(),
        rules,
    })
}
