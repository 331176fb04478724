use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::labels::{check_label, decode_prefix, kernel_key, Step};
use crate::distributions::{FiniteDistribution, Outcome};
use crate::error::{Error, Result};

/// Query and answer alphabets of one round. The prologue round of a
/// mechanism-first mechanism has no queries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    #[serde(default)]
    pub queries: Vec<String>,
    pub answers: Vec<String>,
}

impl Round {
    pub fn new<Q, A>(queries: Q, answers: A) -> Self
    where
        Q: IntoIterator,
        Q::Item: Into<String>,
        A: IntoIterator,
        A::Item: Into<String>,
    {
        Round {
            queries: queries.into_iter().map(Into::into).collect(),
            answers: answers.into_iter().map(Into::into).collect(),
        }
    }
}

/// A finite-communication interactive mechanism.
///
/// Every round is a query from the adversary followed by an answer drawn from
/// `kernel["<dataset>|<prefix>"]`, except an optional leading prologue round
/// in which the mechanism answers unprompted (pending query `""`). Random
/// coins are folded into the kernel entries.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "MechanismRepr", into = "MechanismRepr")]
pub struct Mechanism {
    datasets: Vec<String>,
    rounds: Vec<Round>,
    mech_first: bool,
    kernel: BTreeMap<String, FiniteDistribution>,
}

#[derive(Serialize, Deserialize)]
struct MechanismRepr {
    datasets: Vec<String>,
    rounds: Vec<Round>,
    kernel: BTreeMap<String, FiniteDistribution>,
    #[serde(default)]
    mech_first: bool,
}

impl TryFrom<MechanismRepr> for Mechanism {
    type Error = Error;

    fn try_from(r: MechanismRepr) -> Result<Self> {
        Mechanism::new(r.datasets, r.rounds, r.mech_first, r.kernel)
    }
}

impl From<Mechanism> for MechanismRepr {
    fn from(m: Mechanism) -> Self {
        MechanismRepr {
            datasets: m.datasets,
            rounds: m.rounds,
            kernel: m.kernel,
            mech_first: m.mech_first,
        }
    }
}

impl Mechanism {
    pub fn new(
        datasets: Vec<String>,
        rounds: Vec<Round>,
        mech_first: bool,
        kernel: BTreeMap<String, FiniteDistribution>,
    ) -> Result<Self> {
        let m = Mechanism {
            datasets,
            rounds,
            mech_first,
            kernel,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::InvalidMechanism("no datasets".into()));
        }
        distinct(&self.datasets, "dataset")?;
        if self.mech_first && self.rounds.is_empty() {
            return Err(Error::InvalidMechanism("mechanism-first flag without a prologue round".into()));
        }
        for (r, round) in self.rounds.iter().enumerate() {
            distinct(&round.answers, "answer")?;
            distinct(&round.queries, "query")?;
            if round.answers.is_empty() {
                return Err(Error::InvalidMechanism(format!("round {r} has no answers")));
            }
            let prologue = self.mech_first && r == 0;
            if prologue != round.queries.is_empty() {
                return Err(Error::InvalidMechanism(if prologue {
                    "the prologue round takes no queries".into()
                } else {
                    format!("round {r} has no queries")
                }));
            }
        }
        for key in self.kernel.keys() {
            let (dataset, prefix) = key
                .split_once('|')
                .ok_or_else(|| Error::InvalidMechanism(format!("kernel key {key:?} lacks '|'")))?;
            if !self.datasets.iter().any(|d| d == dataset) {
                return Err(Error::InvalidMechanism(format!("kernel key {key:?} names an unknown dataset")));
            }
            decode_prefix(prefix)?;
        }
        for d in &self.datasets {
            self.check_reachable(d, &mut Vec::new())?;
        }
        Ok(())
    }

    fn check_reachable(&self, dataset: &str, steps: &mut Vec<Step>) -> Result<()> {
        let r = steps.len();
        if r == self.depth() {
            return Ok(());
        }
        for q in self.pending_queries(r) {
            let dist = self.kernel(dataset, steps, q)?;
            for (o, w) in dist.iter() {
                let a = o.as_text().filter(|a| self.rounds[r].answers.iter().any(|x| x == a));
                let Some(a) = a else {
                    return Err(Error::InvalidMechanism(format!(
                        "{} answers {o} outside the round-{r} alphabet",
                        kernel_key(dataset, steps, q)
                    )));
                };
                if w > 0.0 {
                    steps.push((q.to_string(), a.to_string()));
                    self.check_reachable(dataset, steps)?;
                    steps.pop();
                }
            }
        }
        Ok(())
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    pub fn mech_first(&self) -> bool {
        self.mech_first
    }

    /// Rounds in which the adversary sends a query.
    pub fn adversary_rounds(&self) -> usize {
        self.depth() - usize::from(self.mech_first)
    }

    pub fn kernel_entries(&self) -> &BTreeMap<String, FiniteDistribution> {
        &self.kernel
    }

    /// Queries the adversary may send in round `r`; `[""]` for the prologue.
    pub fn pending_queries(&self, r: usize) -> Vec<&str> {
        if self.mech_first && r == 0 {
            vec![""]
        } else {
            self.rounds[r].queries.iter().map(String::as_str).collect()
        }
    }

    pub fn has_dataset(&self, dataset: &str) -> bool {
        self.datasets.iter().any(|d| d == dataset)
    }

    /// Answer distribution after `steps` with `query` pending.
    pub fn kernel(&self, dataset: &str, steps: &[Step], query: &str) -> Result<&FiniteDistribution> {
        let key = kernel_key(dataset, steps, query);
        self.kernel.get(&key).ok_or(Error::UndefinedKernel(key))
    }

    /// A mechanism whose dataset `new` behaves like dataset `old` of `self`,
    /// for each `(new, old)` pair.
    pub fn relabel_datasets(&self, pairs: &[(&str, &str)]) -> Result<Mechanism> {
        let mut kernel = BTreeMap::new();
        for (new, old) in pairs {
            if !self.has_dataset(old) {
                return Err(Error::InvalidMechanism(format!("unknown dataset {old:?}")));
            }
            for (key, dist) in &self.kernel {
                let (d, prefix) = key.split_once('|').expect("validated key");
                if d == *old {
                    kernel.insert(format!("{new}|{prefix}"), dist.clone());
                }
            }
        }
        let datasets = pairs.iter().map(|p| p.0.to_string()).collect();
        Mechanism::new(datasets, self.rounds.clone(), self.mech_first, kernel)
    }

    /// The rest of the interaction once the adversary has sent `query` in the
    /// first round; the pending answer becomes a prologue.
    pub fn after_query(&self, query: &str) -> Result<Mechanism> {
        if self.mech_first || self.rounds.is_empty() || !self.rounds[0].queries.iter().any(|q| q == query) {
            return Err(Error::InvalidMechanism(format!("{query:?} is not an opening query")));
        }
        let mut rounds = self.rounds.clone();
        rounds[0].queries.clear();
        let kernel = self.remap_kernel(|mut steps, pending| {
            if steps.is_empty() {
                (pending == query).then(|| (steps, String::new()))
            } else if steps[0].0 == query {
                steps[0].0.clear();
                Some((steps, pending))
            } else {
                None
            }
        });
        Mechanism::new(self.datasets.clone(), rounds, true, kernel)
    }

    /// The rest of the interaction after the prologue answer `answer`.
    pub fn after_answer(&self, answer: &str) -> Result<Mechanism> {
        if !self.mech_first {
            return Err(Error::InvalidMechanism("no prologue to condition on".into()));
        }
        let kernel = self.remap_kernel(|steps, pending| {
            (steps.first().map(|s| s.1.as_str()) == Some(answer)).then(|| (steps[1..].to_vec(), pending))
        });
        Mechanism::new(self.datasets.clone(), self.rounds[1..].to_vec(), false, kernel)
    }

    fn remap_kernel<F>(&self, mut f: F) -> BTreeMap<String, FiniteDistribution>
    where
        F: FnMut(Vec<Step>, String) -> Option<(Vec<Step>, String)>,
    {
        self.kernel
            .iter()
            .filter_map(|(key, dist)| {
                let (d, prefix) = key.split_once('|').expect("validated key");
                let (steps, pending) = decode_prefix(prefix).expect("validated prefix");
                let (steps, pending) = f(steps, pending)?;
                Some((kernel_key(d, &steps, &pending), dist.clone()))
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Mechanism> {
        Ok(serde_json::from_str(s)?)
    }
}

fn distinct(labels: &[String], what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for l in labels {
        check_label(l, what)?;
        if !seen.insert(l) {
            return Err(Error::DuplicateOutcome(Outcome::text(l.as_str())));
        }
    }
    Ok(())
}

/// Randomized response on datasets `"0"` and `"1"`: the single query `"q"` is
/// answered with the dataset bit with probability `e^eps / (1 + e^eps)`.
pub fn randomized_response(eps: f64) -> Result<Mechanism> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParam(format!("epsilon must be finite and >= 0, got {eps}")));
    }
    let p = 1.0 / (1.0 + (-eps).exp());
    let mut kernel = BTreeMap::new();
    for (bit, other) in [("0", "1"), ("1", "0")] {
        kernel.insert(
            format!("{bit}|q"),
            FiniteDistribution::new(vec![Outcome::text(bit), Outcome::text(other)], vec![p, 1.0 - p])?,
        );
    }
    Mechanism::new(vec!["0".into(), "1".into()], vec![Round::new(["q"], ["0", "1"])], false, kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn dist(pairs: &[(&str, f64)]) -> FiniteDistribution {
        FiniteDistribution::from_pairs(pairs.iter().map(|(o, w)| (Outcome::text(*o), *w))).unwrap()
    }

    fn two_round() -> Mechanism {
        // adversary first: q then r; dataset-dependent first answer
        let mut k = BTreeMap::new();
        k.insert("x|q".into(), dist(&[("a", 0.75), ("b", 0.25)]));
        k.insert("y|q".into(), dist(&[("a", 0.25), ("b", 0.75)]));
        for d in ["x", "y"] {
            for a in ["a", "b"] {
                k.insert(format!("{d}|q={a};r"), dist(&[("c", 1.0)]));
            }
        }
        Mechanism::new(
            vec!["x".into(), "y".into()],
            vec![Round::new(["q"], ["a", "b"]), Round::new(["r"], ["c"])],
            false,
            k,
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let m = two_round();
        let s = m.to_json().unwrap();
        let back = Mechanism::from_json(&s).unwrap();
        assert_eq!(back.to_json().unwrap(), s);
        let rr = randomized_response(1.0).unwrap();
        let s = serde_json::to_string(&rr).unwrap();
        assert_eq!(serde_json::to_string(&Mechanism::from_json(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn missing_reachable_kernel() {
        let mut k = BTreeMap::new();
        k.insert("x|q".into(), dist(&[("a", 1.0)]));
        let err = Mechanism::new(
            vec!["x".into(), "y".into()],
            vec![Round::new(["q"], ["a"])],
            false,
            k,
        )
        .unwrap_err();
        assert_eq!(err, Error::UndefinedKernel("y|q".into()));
    }

    #[test]
    fn answer_outside_alphabet() {
        let mut k = BTreeMap::new();
        k.insert("x|q".into(), dist(&[("z", 1.0)]));
        let err = Mechanism::new(vec!["x".into()], vec![Round::new(["q"], ["a"])], false, k).unwrap_err();
        assert!(matches!(err, Error::InvalidMechanism(_)));
    }

    #[test]
    fn zero_mass_branches_need_no_kernel() {
        let mut k = BTreeMap::new();
        k.insert("x|q".into(), dist(&[("a", 1.0), ("b", 0.0)]));
        k.insert("x|q=a;q".into(), dist(&[("a", 1.0)]));
        let m = Mechanism::new(vec!["x".into()], vec![Round::new(["q"], ["a", "b"]); 2], false, k);
        assert!(m.is_ok());
    }

    #[test]
    fn residuals() {
        let m = two_round();
        let mq = m.after_query("q").unwrap();
        assert!(mq.mech_first());
        assert_eq!(mq.kernel("x", &[], "").unwrap().prob(&Outcome::text("a")), 0.75);
        let ma = mq.after_answer("b").unwrap();
        assert_eq!(ma.depth(), 1);
        assert!(!ma.mech_first());
        assert_eq!(ma.kernel("y", &[], "r").unwrap().prob(&Outcome::text("c")), 1.0);
        assert!(m.after_query("r").is_err());
        assert!(m.after_answer("a").is_err());
    }

    #[test]
    fn relabel() {
        let m = two_round().relabel_datasets(&[("x", "y"), ("x'", "y")]).unwrap();
        assert_eq!(m.datasets(), ["x", "x'"]);
        assert_eq!(m.kernel("x'", &[], "q").unwrap().prob(&Outcome::text("b")), 0.75);
    }

    #[test]
    fn rr_entries() {
        let m = randomized_response(2.0_f64.ln()).unwrap();
        let d = m.kernel("1", &[], "q").unwrap();
        assert!((d.prob(&Outcome::text("1")) - 2.0 / 3.0).abs() < 1e-15);
        assert!(randomized_response(-1.0).is_err());
    }
}
