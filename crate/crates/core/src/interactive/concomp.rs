use std::collections::{BTreeMap, BTreeSet};

use super::labels::{check_label, kernel_key, Step};
use super::mechanism::{Mechanism, Round};
use crate::distributions::{FiniteDistribution, Outcome};
use crate::error::{Error, Result};

/// Answer sent when a tagged query does not parse as a query its component
/// can take next, including every query to a component that has run out of
/// rounds. It carries no information about the dataset.
pub const HALT: &str = "halt";

/// `ConComp(m_1, …, m_k)` materialized as an ordinary [`Mechanism`], together
/// with what is needed to map composed labels back to the components.
///
/// Queries are `"<tag>.<query>"`. Components that speak first contribute to
/// one joint prologue whose answer label joins their prologue answers with
/// `','`. When all components share the same dataset list the composition
/// uses it; otherwise datasets are tuples `"(d_1,…,d_k)"`.
#[derive(Clone, Debug)]
pub struct ConcurrentComposition {
    mechanism: Mechanism,
    components: Vec<Mechanism>,
    tags: Vec<String>,
    datasets: BTreeMap<String, Vec<String>>,
    prologues: BTreeMap<String, Vec<String>>,
}

/// The composed mechanism with tags `"1"`, `"2"`, ….
pub fn concomp(ms: &[Mechanism]) -> Result<Mechanism> {
    Ok(ConcurrentComposition::new(ms)?.into_mechanism())
}

struct Walk<'a> {
    comps: &'a [Mechanism],
    tagged: Vec<(usize, String, String)>,
    first: Vec<usize>,
    depth: usize,
    kernel: BTreeMap<String, FiniteDistribution>,
    alphabets: Vec<BTreeSet<String>>,
    prologues: BTreeMap<String, Vec<String>>,
}

impl ConcurrentComposition {
    pub fn new(ms: &[Mechanism]) -> Result<Self> {
        let tags: Vec<String> = (1..=ms.len()).map(|j| j.to_string()).collect();
        Self::with_tags(ms, &tags)
    }

    pub fn with_tags<S: AsRef<str>>(ms: &[Mechanism], tags: &[S]) -> Result<Self> {
        if ms.is_empty() {
            return Err(Error::InvalidMechanism("nothing to compose".into()));
        }
        if tags.len() != ms.len() {
            return Err(Error::InvalidParam(format!("{} tags for {} mechanisms", tags.len(), ms.len())));
        }
        let tags: Vec<String> = tags.iter().map(|t| t.as_ref().to_string()).collect();
        let mut seen_tags = BTreeSet::new();
        for t in &tags {
            check_label(t, "tag")?;
            if t.contains('.') || !seen_tags.insert(t) {
                return Err(Error::AlphabetClash(t.clone()));
            }
        }
        for m in ms {
            if m.rounds().iter().any(|r| r.answers.iter().any(|a| a == HALT)) {
                return Err(Error::AlphabetClash(HALT.into()));
            }
        }

        let mut tagged = Vec::new();
        let mut seen = BTreeSet::new();
        for (j, m) in ms.iter().enumerate() {
            let mut own = BTreeSet::new();
            for q in m.rounds().iter().flat_map(|r| &r.queries) {
                if own.insert(q) {
                    let t = format!("{}.{q}", tags[j]);
                    if !seen.insert(t.clone()) {
                        return Err(Error::AlphabetClash(t));
                    }
                    tagged.push((j, q.clone(), t));
                }
            }
        }

        let shared = ms.iter().all(|m| m.datasets() == ms[0].datasets());
        let mut datasets: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut order = Vec::new();
        if shared {
            for d in ms[0].datasets() {
                order.push(d.clone());
                datasets.insert(d.clone(), vec![d.clone(); ms.len()]);
            }
        } else {
            let mut combos: Vec<Vec<String>> = vec![Vec::new()];
            for m in ms {
                combos = combos
                    .into_iter()
                    .flat_map(|c| {
                        m.datasets().iter().map(move |d| {
                            let mut c = c.clone();
                            c.push(d.clone());
                            c
                        })
                    })
                    .collect();
            }
            for c in combos {
                let label = format!("({})", c.join(","));
                if datasets.insert(label.clone(), c).is_some() {
                    return Err(Error::AlphabetClash(label));
                }
                order.push(label);
            }
        }

        let first: Vec<usize> = (0..ms.len()).filter(|&j| ms[j].mech_first()).collect();
        let adversary_rounds: usize = ms.iter().map(Mechanism::adversary_rounds).sum();
        let depth = adversary_rounds + usize::from(!first.is_empty());
        let mut walk = Walk {
            comps: ms,
            tagged,
            first,
            depth,
            kernel: BTreeMap::new(),
            alphabets: vec![BTreeSet::new(); depth],
            prologues: BTreeMap::new(),
        };
        for label in &order {
            let own = datasets[label].clone();
            let mut own_steps = vec![Vec::new(); ms.len()];
            walk.explore(label, &own, &mut Vec::new(), &mut own_steps)?;
        }

        let mech_first = !walk.first.is_empty();
        let queries: Vec<String> = walk.tagged.iter().map(|t| t.2.clone()).collect();
        let rounds = walk
            .alphabets
            .iter()
            .enumerate()
            .map(|(r, answers)| Round {
                queries: if mech_first && r == 0 { Vec::new() } else { queries.clone() },
                answers: answers.iter().cloned().collect(),
            })
            .collect();
        let mechanism = Mechanism::new(order, rounds, mech_first, walk.kernel)?;
        Ok(ConcurrentComposition {
            mechanism,
            components: ms.to_vec(),
            tags,
            datasets,
            prologues: walk.prologues,
        })
    }

    pub fn mechanism(&self) -> &Mechanism {
        &self.mechanism
    }

    pub fn into_mechanism(self) -> Mechanism {
        self.mechanism
    }

    pub fn components(&self) -> &[Mechanism] {
        &self.components
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn tagged_query(&self, component: usize, query: &str) -> String {
        format!("{}.{query}", self.tags[component])
    }

    /// Per-component datasets behind a composed dataset label.
    pub fn component_datasets(&self, label: &str) -> Option<&[String]> {
        self.datasets.get(label).map(Vec::as_slice)
    }

    /// The composed dataset label whose per-component datasets are `parts`.
    pub fn composed_dataset(&self, parts: &[&str]) -> Option<&str> {
        self.datasets
            .iter()
            .find(|(_, v)| v.iter().map(String::as_str).eq(parts.iter().copied()))
            .map(|(k, _)| k.as_str())
    }

    /// Prologue answers of the mechanism-first components, in component
    /// order, behind a composed prologue answer.
    pub fn prologue_answers(&self, label: &str) -> Option<&[String]> {
        self.prologues.get(label).map(Vec::as_slice)
    }
}

impl Walk<'_> {
    fn explore(&mut self, label: &str, own: &[String], steps: &mut Vec<Step>, own_steps: &mut [Vec<Step>]) -> Result<()> {
        let r = steps.len();
        if r == self.depth {
            return Ok(());
        }
        if r == 0 && !self.first.is_empty() {
            let mut combos: Vec<(Vec<String>, f64)> = vec![(Vec::new(), 1.0)];
            for &j in &self.first {
                let d = self.comps[j].kernel(&own[j], &[], "")?;
                let mut next = Vec::new();
                for (answers, w) in &combos {
                    for (o, p) in d.support() {
                        let mut a = answers.clone();
                        a.push(o.as_text().expect("validated answer label").to_string());
                        next.push((a, w * p));
                    }
                }
                combos = next;
            }
            let mut pairs = Vec::new();
            for (answers, w) in &combos {
                let joined = answers.join(",");
                match self.prologues.get(&joined) {
                    Some(prev) if prev != answers => return Err(Error::AlphabetClash(joined)),
                    _ => {
                        self.prologues.insert(joined.clone(), answers.clone());
                    }
                }
                pairs.push((Outcome::Text(joined), *w));
            }
            self.kernel
                .insert(kernel_key(label, &[], ""), FiniteDistribution::from_pairs(pairs)?);
            for (answers, _) in combos {
                let joined = answers.join(",");
                self.alphabets[0].insert(joined.clone());
                for (&j, a) in self.first.iter().zip(&answers) {
                    own_steps[j].push((String::new(), a.clone()));
                }
                steps.push((String::new(), joined));
                self.explore(label, own, steps, own_steps)?;
                steps.pop();
                for &j in &self.first {
                    own_steps[j].pop();
                }
            }
            return Ok(());
        }
        for t in 0..self.tagged.len() {
            let (j, q, tag) = self.tagged[t].clone();
            let comp = &self.comps[j];
            let s = own_steps[j].len();
            let dist = if s < comp.depth() && comp.rounds()[s].queries.contains(&q) {
                comp.kernel(&own[j], &own_steps[j], &q)?.clone()
            } else {
                FiniteDistribution::point(HALT)
            };
            self.kernel.insert(kernel_key(label, steps, &tag), dist.clone());
            for (o, _) in dist.support() {
                let a = o.as_text().expect("validated answer label").to_string();
                self.alphabets[r].insert(a.clone());
                steps.push((tag.clone(), a.clone()));
                let live = a != HALT;
                if live {
                    own_steps[j].push((q.clone(), a));
                }
                self.explore(label, own, steps, own_steps)?;
                if live {
                    own_steps[j].pop();
                }
                steps.pop();
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::product;
    use crate::interactive::{
        enumerate_adversaries, mechanism_privacy, randomized_response, view_distribution, AdversaryStrategy,
    };
    use crate::tol::DEFAULT_GUARD;
    use crate::tradeoff::np_tradeoff;

    fn text(s: &str) -> Outcome {
        Outcome::text(s)
    }

    #[test]
    fn single_component_is_tag_lifted() {
        let rr = randomized_response(0.9).unwrap();
        let c = concomp(std::slice::from_ref(&rr)).unwrap();
        assert_eq!(c.depth(), 1);
        assert_eq!(c.rounds()[0].queries, ["1.q"]);
        let b = AdversaryStrategy::from_choices([(Vec::<String>::new(), "q")]);
        let lifted = AdversaryStrategy::from_choices([(Vec::<String>::new(), "1.q")]);
        for d in ["0", "1"] {
            let direct = view_distribution(&rr, d, &b).unwrap();
            let composed = view_distribution(&c, d, &lifted).unwrap();
            let relabeled = composed.map_outcomes(|o| text(&o.as_text().unwrap().replacen("1.", "", 1)));
            assert!(relabeled.approx_eq(&direct, 1e-15));
        }
    }

    #[test]
    fn two_rr_views_are_products() {
        let rr = randomized_response(2.0_f64.ln()).unwrap();
        let c = concomp(&[rr.clone(), rr]).unwrap();
        assert_eq!(c.depth(), 2);
        let b = AdversaryStrategy::from_choices([
            (vec![], "1.q"),
            (vec!["0"], "2.q"),
            (vec!["1"], "2.q"),
        ]);
        let view = view_distribution(&c, "1", &b).unwrap();
        let (hi, lo) = (2.0 / 3.0, 1.0 / 3.0);
        assert!((view.prob(&text("1.q=1;2.q=1")) - hi * hi).abs() < 1e-15);
        assert!((view.prob(&text("1.q=1;2.q=0")) - hi * lo).abs() < 1e-15);
    }

    #[test]
    fn exhausted_component_halts() {
        let rr = randomized_response(1.0).unwrap();
        let c = concomp(&[rr.clone(), rr]).unwrap();
        let b = AdversaryStrategy::from_choices([(vec![], "1.q"), (vec!["0"], "1.q"), (vec!["1"], "1.q")]);
        let view = view_distribution(&c, "0", &b).unwrap();
        assert_eq!(view.support().count(), 2);
        assert!(view.support().all(|(o, _)| o.as_text().unwrap().ends_with("1.q=halt")));
    }

    #[test]
    fn interleaving_on_a_hand_tree() {
        // m1 answers a bit; the adversary then picks m2's query from it
        let m1 = randomized_response(0.5).unwrap();
        let mut k = BTreeMap::new();
        for (d, pu, pv) in [("0", 0.9, 0.6), ("1", 0.2, 0.3)] {
            k.insert(format!("{d}|u"), FiniteDistribution::from_pairs([(text("y"), pu), (text("n"), 1.0 - pu)]).unwrap());
            k.insert(format!("{d}|v"), FiniteDistribution::from_pairs([(text("y"), pv), (text("n"), 1.0 - pv)]).unwrap());
        }
        let m2 = Mechanism::new(vec!["0".into(), "1".into()], vec![Round::new(["u", "v"], ["n", "y"])], false, k).unwrap();
        let c = concomp(&[m1, m2]).unwrap();
        let b = AdversaryStrategy::from_choices([(vec![], "1.q"), (vec!["0"], "2.u"), (vec!["1"], "2.v")]);
        let view = view_distribution(&c, "0", &b).unwrap();
        let p0 = 1.0 / (1.0 + (-0.5_f64).exp());
        assert!((view.prob(&text("1.q=0;2.u=y")) - p0 * 0.9).abs() < 1e-15);
        assert!((view.prob(&text("1.q=1;2.v=n")) - (1.0 - p0) * 0.4).abs() < 1e-15);
    }

    #[test]
    fn concurrent_rr_privacy_is_the_product_curve() {
        let rr = randomized_response(2.0_f64.ln()).unwrap();
        let c = concomp(&[rr.clone(), rr]).unwrap();
        assert!(enumerate_adversaries(&c, DEFAULT_GUARD).unwrap().len() > 1);
        let f = mechanism_privacy(&c, "0", "1", DEFAULT_GUARD).unwrap();
        let (hi, lo) = (
            FiniteDistribution::bernoulli(2.0 / 3.0).unwrap(),
            FiniteDistribution::bernoulli(1.0 / 3.0).unwrap(),
        );
        let g = np_tradeoff(product(&lo, &lo).dist(), product(&hi, &hi).dist());
        assert!(f.dominates(&g, 1e-9) && g.dominates(&f, 1e-9));
    }

    #[test]
    fn mech_first_prologues_multiply() {
        let mut k = BTreeMap::new();
        k.insert("0|".into(), FiniteDistribution::from_pairs([(text("a"), 0.25), (text("b"), 0.75)]).unwrap());
        k.insert("1|".into(), FiniteDistribution::from_pairs([(text("a"), 0.5), (text("b"), 0.5)]).unwrap());
        let m = Mechanism::new(vec!["0".into(), "1".into()], vec![Round::new(Vec::<String>::new(), ["a", "b"])], true, k)
            .unwrap();
        let cc = ConcurrentComposition::new(&[m.clone(), m]).unwrap();
        let c = cc.mechanism();
        assert!(c.mech_first());
        assert_eq!(c.depth(), 1);
        assert!((c.kernel("0", &[], "").unwrap().prob(&text("a,b")) - 0.25 * 0.75).abs() < 1e-15);
        assert_eq!(cc.prologue_answers("b,a").unwrap(), ["b", "a"]);
    }

    #[test]
    fn tupled_datasets_and_clashes() {
        let rr = randomized_response(0.4).unwrap();
        let other = rr.relabel_datasets(&[("x", "0"), ("y", "1")]).unwrap();
        let cc = ConcurrentComposition::new(&[rr.clone(), other]).unwrap();
        assert_eq!(cc.mechanism().datasets().len(), 4);
        assert_eq!(cc.component_datasets("(1,x)").unwrap(), ["1", "x"]);
        assert_eq!(cc.composed_dataset(&["0", "y"]), Some("(0,y)"));
        let err = ConcurrentComposition::with_tags(&[rr.clone(), rr.clone()], &["a", "a"]).unwrap_err();
        assert_eq!(err, Error::AlphabetClash("a".into()));
        assert!(ConcurrentComposition::with_tags(&[rr], &["a.b"]).is_err());
    }
}
