use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::labels::{Step, Transcript};
use super::mechanism::Mechanism;
use crate::distributions::FiniteDistribution;
use crate::error::{Error, Result};
use crate::tol;

/// A deterministic adversary: the next query as a function of the answers
/// received so far.
///
/// Strategies produced by [`enumerate_adversaries`] are defined exactly on the
/// histories they can reach, so two of them never induce the same behavior.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Choice>", into = "Vec<Choice>")]
pub struct AdversaryStrategy {
    choices: BTreeMap<Vec<String>, String>,
}

#[derive(Serialize, Deserialize)]
struct Choice {
    history: Vec<String>,
    query: String,
}

impl From<Vec<Choice>> for AdversaryStrategy {
    fn from(v: Vec<Choice>) -> Self {
        AdversaryStrategy {
            choices: v.into_iter().map(|c| (c.history, c.query)).collect(),
        }
    }
}

impl From<AdversaryStrategy> for Vec<Choice> {
    fn from(s: AdversaryStrategy) -> Self {
        s.choices
            .into_iter()
            .map(|(history, query)| Choice { history, query })
            .collect()
    }
}

impl AdversaryStrategy {
    pub fn new(choices: BTreeMap<Vec<String>, String>) -> Self {
        AdversaryStrategy { choices }
    }

    pub fn from_choices<I, H, S, Q>(choices: I) -> Self
    where
        I: IntoIterator<Item = (H, Q)>,
        H: IntoIterator<Item = S>,
        S: Into<String>,
        Q: Into<String>,
    {
        AdversaryStrategy {
            choices: choices
                .into_iter()
                .map(|(h, q)| (h.into_iter().map(Into::into).collect(), q.into()))
                .collect(),
        }
    }

    pub fn choose(&self, history: &[String]) -> Result<&str> {
        self.choices
            .get(history)
            .map(String::as_str)
            .ok_or_else(|| Error::UndefinedStrategy(history.to_vec()))
    }

    pub fn choices(&self) -> &BTreeMap<Vec<String>, String> {
        &self.choices
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }
}

/// Answers with positive mass under at least one live dataset, each with the
/// datasets that reach it. Sorted by answer label.
fn branches<'a>(
    m: &Mechanism,
    live: &[&'a str],
    steps: &[Step],
    query: &str,
) -> Result<Vec<(String, Vec<&'a str>)>> {
    let mut out: BTreeMap<String, Vec<&'a str>> = BTreeMap::new();
    for &d in live {
        for (o, _) in m.kernel(d, steps, query)?.support() {
            let a = o.as_text().expect("validated answer label");
            out.entry(a.to_string()).or_default().push(d);
        }
    }
    Ok(out.into_iter().collect())
}

fn count_from(m: &Mechanism, live: &[&str], steps: &mut Vec<Step>) -> Result<u128> {
    let r = steps.len();
    if r == m.depth() {
        return Ok(1);
    }
    let mut total: u128 = 0;
    for q in m.pending_queries(r) {
        let mut prod: u128 = 1;
        for (a, reach) in branches(m, live, steps, q)? {
            steps.push((q.to_string(), a));
            let c = count_from(m, &reach, steps)?;
            steps.pop();
            prod = prod.saturating_mul(c);
        }
        total = total.saturating_add(prod);
    }
    Ok(total)
}

/// Number of behaviorally distinct deterministic adversaries against `m` when
/// only `datasets` can be behind it.
pub fn count_adversaries(m: &Mechanism, datasets: &[&str]) -> Result<u128> {
    check_datasets(m, datasets)?;
    count_from(m, datasets, &mut Vec::new())
}

type Partial = Vec<(Vec<String>, String)>;

fn enumerate_from(m: &Mechanism, live: &[&str], steps: &mut Vec<Step>) -> Result<Vec<Partial>> {
    let r = steps.len();
    if r == m.depth() {
        return Ok(vec![Vec::new()]);
    }
    let prologue = m.mech_first() && r == 0;
    let history: Vec<String> = steps.iter().map(|s| s.1.clone()).collect();
    let mut out = Vec::new();
    for q in m.pending_queries(r) {
        let mut children = Vec::new();
        for (a, reach) in branches(m, live, steps, q)? {
            steps.push((q.to_string(), a));
            children.push(enumerate_from(m, &reach, steps)?);
            steps.pop();
        }
        // mixed-radix product over the answer subtrees, last answer fastest
        let mut digits = vec![0usize; children.len()];
        loop {
            let mut s: Partial = Vec::new();
            if !prologue {
                s.push((history.clone(), q.to_string()));
            }
            for (child, &i) in children.iter().zip(&digits) {
                s.extend(child[i].iter().cloned());
            }
            out.push(s);
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < children[pos].len() {
                    break;
                }
                digits[pos] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// Every behaviorally distinct deterministic adversary against `m`, in
/// canonical order (queries in alphabet order, answers sorted).
pub fn enumerate_adversaries(m: &Mechanism, guard: u64) -> Result<Vec<AdversaryStrategy>> {
    let all: Vec<&str> = m.datasets().iter().map(String::as_str).collect();
    enumerate_adversaries_on(m, &all, guard)
}

/// As [`enumerate_adversaries`], restricted to histories reachable from
/// `datasets`.
pub fn enumerate_adversaries_on(m: &Mechanism, datasets: &[&str], guard: u64) -> Result<Vec<AdversaryStrategy>> {
    let count = count_adversaries(m, datasets)?;
    if count > u128::from(guard) {
        return Err(Error::ExplosionGuard { count, guard });
    }
    Ok(enumerate_from(m, datasets, &mut Vec::new())?
        .into_iter()
        .map(|p| AdversaryStrategy {
            choices: p.into_iter().collect(),
        })
        .collect())
}

fn check_datasets(m: &Mechanism, datasets: &[&str]) -> Result<()> {
    match datasets.iter().find(|d| !m.has_dataset(d)) {
        Some(d) => Err(Error::InvalidParam(format!("unknown dataset {d:?}"))),
        None => Ok(()),
    }
}

/// Exact distribution of the transcript when `b` interacts with `m` on `dataset`.
pub fn view_distribution(m: &Mechanism, dataset: &str, b: &AdversaryStrategy) -> Result<FiniteDistribution> {
    check_datasets(m, &[dataset])?;
    let mut acc = Vec::new();
    walk_view(m, dataset, b, &mut Vec::new(), 1.0, &mut acc)?;
    finish_view(acc)
}

fn walk_view(
    m: &Mechanism,
    dataset: &str,
    b: &AdversaryStrategy,
    steps: &mut Vec<Step>,
    mass: f64,
    acc: &mut Vec<(Transcript, f64)>,
) -> Result<()> {
    let r = steps.len();
    if r == m.depth() {
        acc.push((Transcript::new(steps.clone()), mass));
        return Ok(());
    }
    let q = if m.mech_first() && r == 0 {
        String::new()
    } else {
        let history: Vec<String> = steps.iter().map(|s| s.1.clone()).collect();
        b.choose(&history)?.to_string()
    };
    for (o, w) in m.kernel(dataset, steps, &q)?.support() {
        steps.push((q.clone(), o.as_text().expect("validated answer label").to_string()));
        walk_view(m, dataset, b, steps, mass * w, acc)?;
        steps.pop();
    }
    Ok(())
}

pub(crate) fn finish_view(acc: Vec<(Transcript, f64)>) -> Result<FiniteDistribution> {
    let total: f64 = acc.iter().map(|p| p.1).sum();
    if (total - 1.0).abs() > tol::EQ {
        return Err(Error::InvalidDistribution(format!("view mass {total} differs from 1")));
    }
    FiniteDistribution::normalized(acc.into_iter().map(|(t, w)| (t.to_outcome(), w)))
}
