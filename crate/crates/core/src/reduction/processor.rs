use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{FiniteDistribution, Outcome};
use crate::error::{Error, Result};
use crate::interactive::{encode_prefix, finish_view, AdversaryStrategy, Round, Step, Transcript};

/// An interactive machine that answers from a seed drawn once up front.
///
/// All of its randomness lives in the seed, so each response rule is a point
/// mass: `responses[seed][prefix]` is the answer to the pending query of
/// `prefix`, using the same prefix encoding as mechanism kernels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostProcessor {
    rounds: Vec<Round>,
    mech_first: bool,
    #[serde(with = "rule_list")]
    responses: BTreeMap<Outcome, BTreeMap<String, String>>,
}

mod rule_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Rule {
        seed: Outcome,
        responses: BTreeMap<String, String>,
    }

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<Outcome, BTreeMap<String, String>>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rules: Vec<Rule> = map
            .iter()
            .map(|(seed, responses)| Rule {
                seed: seed.clone(),
                responses: responses.clone(),
            })
            .collect();
        rules.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Outcome, BTreeMap<String, String>>, D::Error> {
        let rules = Vec::<Rule>::deserialize(d)?;
        Ok(rules.into_iter().map(|r| (r.seed, r.responses)).collect())
    }
}

impl PostProcessor {
    pub fn new(rounds: Vec<Round>, mech_first: bool, responses: BTreeMap<Outcome, BTreeMap<String, String>>) -> Self {
        PostProcessor {
            rounds,
            mech_first,
            responses,
        }
    }

    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn mech_first(&self) -> bool {
        self.mech_first
    }

    pub fn seeds(&self) -> impl Iterator<Item = &Outcome> {
        self.responses.keys()
    }

    pub fn responses(&self) -> &BTreeMap<Outcome, BTreeMap<String, String>> {
        &self.responses
    }

    pub fn answer(&self, seed: &Outcome, prefix: &str) -> Result<&str> {
        self.responses
            .get(seed)
            .and_then(|r| r.get(prefix))
            .map(String::as_str)
            .ok_or_else(|| Error::UndefinedResponse {
                seed: seed.clone(),
                prefix: prefix.to_string(),
            })
    }

    /// The response rule as a distribution over the round's answers.
    pub fn respond(&self, seed: &Outcome, prefix: &str) -> Result<FiniteDistribution> {
        Ok(FiniteDistribution::point(self.answer(seed, prefix)?))
    }
}

/// Transcript distribution of `b` interacting with `proc` when the seed is
/// drawn from `seed_dist`.
pub fn simulate_view(
    proc: &PostProcessor,
    seed_dist: &FiniteDistribution,
    b: &AdversaryStrategy,
) -> Result<FiniteDistribution> {
    let mut acc = Vec::new();
    for (seed, w) in seed_dist.support() {
        let mut steps: Vec<Step> = Vec::new();
        while steps.len() < proc.depth() {
            let q = if proc.mech_first && steps.is_empty() {
                String::new()
            } else {
                let history: Vec<String> = steps.iter().map(|s| s.1.clone()).collect();
                b.choose(&history)?.to_string()
            };
            let a = proc.answer(seed, &encode_prefix(&steps, &q))?.to_string();
            steps.push((q, a));
        }
        acc.push((Transcript::new(steps), w));
    }
    finish_view(acc)
}
