use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::error::{Error, Result};
use crate::tol;

/// A probability vector over labeled discrete outcomes.
///
/// Outcomes keep the order they were constructed with. Zero-weight outcomes
/// are allowed; [`FiniteDistribution::canonical`] strips them and sorts by
/// label, which is the form used for equality.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct FiniteDistribution {
    outcomes: Vec<Outcome>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    outcomes: Vec<Outcome>,
    weights: Vec<f64>,
}

impl TryFrom<DistributionRepr> for FiniteDistribution {
    type Error = Error;

    fn try_from(repr: DistributionRepr) -> Result<Self> {
        FiniteDistribution::new(repr.outcomes, repr.weights)
    }
}

impl From<FiniteDistribution> for DistributionRepr {
    fn from(d: FiniteDistribution) -> Self {
        DistributionRepr {
            outcomes: d.outcomes,
            weights: d.weights,
        }
    }
}

impl FiniteDistribution {
    pub fn new(outcomes: Vec<Outcome>, weights: Vec<f64>) -> Result<Self> {
        if outcomes.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} outcomes but {} weights",
                outcomes.len(),
                weights.len()
            )));
        }
        if outcomes.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        let mut seen = BTreeSet::new();
        for o in &outcomes {
            if !seen.insert(o) {
                return Err(Error::DuplicateOutcome(o.clone()));
            }
        }
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!("weight {w} is not a probability")));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol::MASS {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(FiniteDistribution { outcomes, weights })
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Outcome, f64)>,
    {
        let (outcomes, weights) = pairs.into_iter().unzip();
        Self::new(outcomes, weights)
    }

    /// Builds a distribution from nonnegative masses, merging repeated labels
    /// and dividing by the total.
    pub fn normalized<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Outcome, f64)>,
    {
        let mut order = Vec::new();
        let mut mass: BTreeMap<Outcome, f64> = BTreeMap::new();
        for (o, w) in pairs {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!("mass {w} is not nonnegative")));
            }
            let slot = mass.entry(o.clone()).or_insert_with(|| {
                order.push(o);
                0.0
            });
            *slot += w;
        }
        let total: f64 = mass.values().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("total mass is zero".into()));
        }
        let weights = order.iter().map(|o| mass[o] / total).collect();
        Self::new(order, weights)
    }

    pub fn point(outcome: impl Into<Outcome>) -> Self {
        FiniteDistribution {
            outcomes: vec![outcome.into()],
            weights: vec![1.0],
        }
    }

    pub fn uniform<I, O>(outcomes: I) -> Result<Self>
    where
        I: IntoIterator<Item = O>,
        O: Into<Outcome>,
    {
        let outcomes: Vec<Outcome> = outcomes.into_iter().map(Into::into).collect();
        let n = outcomes.len() as f64;
        let weights = vec![1.0 / n; outcomes.len()];
        Self::normalized(outcomes.into_iter().zip(weights))
    }

    /// Bernoulli(p) on the integer outcomes `1` and `0`, in that order.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParam(format!("bernoulli parameter {p}")));
        }
        Self::new(vec![Outcome::Int(1), Outcome::Int(0)], vec![p, 1.0 - p])
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, f64)> + '_ {
        self.outcomes.iter().zip(self.weights.iter().copied())
    }

    /// Outcomes with strictly positive weight.
    pub fn support(&self) -> impl Iterator<Item = (&Outcome, f64)> + '_ {
        self.iter().filter(|(_, w)| *w > 0.0)
    }

    pub fn prob(&self, outcome: &Outcome) -> f64 {
        self.outcomes
            .iter()
            .position(|o| o == outcome)
            .map_or(0.0, |i| self.weights[i])
    }

    /// Weight lookup table, convenient when many lookups follow.
    pub fn to_map(&self) -> BTreeMap<Outcome, f64> {
        let mut map = BTreeMap::new();
        for (o, w) in self.iter() {
            *map.entry(o.clone()).or_insert(0.0) += w;
        }
        map
    }

    /// Zero-weight outcomes removed, remaining outcomes sorted by label.
    pub fn canonical(&self) -> Self {
        let mut pairs: Vec<(Outcome, f64)> = self
            .support()
            .map(|(o, w)| (o.clone(), w))
            .collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let (outcomes, weights) = pairs.into_iter().unzip();
        FiniteDistribution { outcomes, weights }
    }

    /// Largest per-outcome absolute weight difference over the union of labels.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self.to_map();
        let b = other.to_map();
        a.keys()
            .chain(b.keys())
            .map(|o| (a.get(o).copied().unwrap_or(0.0) - b.get(o).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Relabels outcomes, merging the mass of labels that collide.
    pub fn map_outcomes<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&Outcome) -> Outcome,
    {
        let mut order = Vec::new();
        let mut mass: BTreeMap<Outcome, f64> = BTreeMap::new();
        for (o, w) in self.iter() {
            let target = f(o);
            let slot = mass.entry(target.clone()).or_insert_with(|| {
                order.push(target);
                0.0
            });
            *slot += w;
        }
        let weights = order.iter().map(|o| mass[o]).collect();
        FiniteDistribution {
            outcomes: order,
            weights,
        }
    }
}

/// Mixture `Σ_i weights[i] · components[i]`.
pub fn mixture(weights: &[f64], components: &[FiniteDistribution]) -> Result<FiniteDistribution> {
    if weights.len() != components.len() || components.is_empty() {
        return Err(Error::InvalidParam("mixture weights and components differ in length".into()));
    }
    let w = FiniteDistribution::new((0..weights.len() as i64).map(Outcome::Int).collect(), weights.to_vec())?;
    let pairs = w
        .weights()
        .iter()
        .zip(components)
        .flat_map(|(&wi, c)| c.iter().map(move |(o, p)| (o.clone(), wi * p)));
    let mut order = Vec::new();
    let mut mass: BTreeMap<Outcome, f64> = BTreeMap::new();
    for (o, m) in pairs {
        let slot = mass.entry(o.clone()).or_insert_with(|| {
            order.push(o);
            0.0
        });
        *slot += m;
    }
    let weights = order.iter().map(|o| mass[o]).collect();
    FiniteDistribution::new(order, weights)
}

/// A distribution whose outcomes are tuples of a fixed arity.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FiniteDistribution", into = "FiniteDistribution")]
pub struct JointDistribution {
    dist: FiniteDistribution,
    arity: usize,
}

impl TryFrom<FiniteDistribution> for JointDistribution {
    type Error = Error;

    fn try_from(dist: FiniteDistribution) -> Result<Self> {
        JointDistribution::new(dist)
    }
}

impl From<JointDistribution> for FiniteDistribution {
    fn from(j: JointDistribution) -> Self {
        j.dist
    }
}

impl JointDistribution {
    pub fn new(dist: FiniteDistribution) -> Result<Self> {
        let arity = match dist.outcomes()[0].as_tuple() {
            Some(items) if !items.is_empty() => items.len(),
            _ => return Err(Error::InvalidDistribution("joint outcomes must be non-empty tuples".into())),
        };
        if dist
            .outcomes()
            .iter()
            .any(|o| o.as_tuple().map(<[Outcome]>::len) != Some(arity))
        {
            return Err(Error::InvalidDistribution("joint outcomes have mixed arity".into()));
        }
        Ok(JointDistribution { dist, arity })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dist(&self) -> &FiniteDistribution {
        &self.dist
    }

    pub fn into_dist(self) -> FiniteDistribution {
        self.dist
    }

    pub fn marginal(&self, coordinate: usize) -> FiniteDistribution {
        assert!(coordinate < self.arity, "coordinate {coordinate} out of range");
        self.dist
            .map_outcomes(|o| o.as_tuple().expect("validated tuple")[coordinate].clone())
    }

    pub fn left(&self) -> FiniteDistribution {
        self.marginal(0)
    }

    pub fn right(&self) -> FiniteDistribution {
        self.marginal(self.arity - 1)
    }

    /// Distribution of the second coordinate of a pair given the first equals `x`.
    /// `None` when `x` has zero mass.
    pub fn conditional_right(&self, x: &Outcome) -> Option<FiniteDistribution> {
        let pairs: Vec<(Outcome, f64)> = self
            .dist
            .iter()
            .filter_map(|(o, w)| {
                let t = o.as_tuple()?;
                (&t[0] == x).then(|| (t[1].clone(), w))
            })
            .collect();
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if total <= 0.0 {
            return None;
        }
        FiniteDistribution::normalized(pairs).ok()
    }
}

/// Independent product, enumerated with `p` as the major index.
pub fn product(p: &FiniteDistribution, q: &FiniteDistribution) -> JointDistribution {
    product_many(&[p.clone(), q.clone()])
}

pub fn product_many(factors: &[FiniteDistribution]) -> JointDistribution {
    assert!(!factors.is_empty(), "product of zero distributions");
    let mut acc: Vec<(Vec<Outcome>, f64)> = vec![(Vec::new(), 1.0)];
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.len());
        for (prefix, w) in &acc {
            for (o, p) in f.iter() {
                let mut t = prefix.clone();
                t.push(o.clone());
                next.push((t, w * p));
            }
        }
        acc = next;
    }
    let total: f64 = acc.iter().map(|p| p.1).sum();
    let (outcomes, weights) = acc
        .into_iter()
        .map(|(t, w)| (Outcome::Tuple(t), w / total))
        .unzip();
    JointDistribution {
        dist: FiniteDistribution { outcomes, weights },
        arity: factors.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(p: f64) -> FiniteDistribution {
        FiniteDistribution::bernoulli(p).unwrap()
    }

    #[test]
    fn rejects_bad_mass_and_duplicates() {
        assert!(FiniteDistribution::new(vec![1.into(), 2.into()], vec![0.5, 0.6]).is_err());
        assert!(FiniteDistribution::new(vec![1.into(), 2.into()], vec![-0.1, 1.1]).is_err());
        assert!(matches!(
            FiniteDistribution::new(vec![1.into(), 1.into()], vec![0.5, 0.5]),
            Err(Error::DuplicateOutcome(_))
        ));
    }

    #[test]
    fn canonical_strips_and_sorts() {
        let d = FiniteDistribution::new(vec!["b".into(), "z".into(), "a".into()], vec![0.5, 0.0, 0.5]).unwrap();
        let c = d.canonical();
        assert_eq!(c.outcomes(), &[Outcome::text("a"), Outcome::text("b")]);
    }

    #[test]
    fn product_point_masses() {
        let j = product(&FiniteDistribution::point("a"), &FiniteDistribution::point("b"));
        assert_eq!(j.dist().len(), 1);
        assert_eq!(j.dist().prob(&Outcome::pair("a".into(), "b".into())), 1.0);
    }

    #[test]
    fn product_of_fair_coins_is_uniform() {
        let j = product(&bern(0.5), &bern(0.5));
        assert_eq!(j.dist().len(), 4);
        for w in j.dist().weights() {
            assert!((w - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn product_bernoulli_order() {
        let j = product(&bern(2.0 / 3.0), &bern(1.0 / 3.0));
        let expected = [2.0 / 9.0, 4.0 / 9.0, 1.0 / 9.0, 2.0 / 9.0];
        let labels = [(1, 1), (1, 0), (0, 1), (0, 0)];
        for ((a, b), e) in labels.iter().zip(expected) {
            let o = Outcome::pair(Outcome::Int(*a), Outcome::Int(*b));
            assert!((j.dist().prob(&o) - e).abs() < 1e-12);
        }
        assert!(j.left().approx_eq(&bern(2.0 / 3.0), 1e-12));
        assert!(j.right().approx_eq(&bern(1.0 / 3.0), 1e-12));
    }

    #[test]
    fn mixture_and_conditionals() {
        let m = mixture(&[0.25, 0.75], &[bern(1.0), bern(0.0)]).unwrap();
        assert!((m.prob(&Outcome::Int(1)) - 0.25).abs() < 1e-15);
        let j = product(&bern(0.3), &bern(0.6));
        let c = j.conditional_right(&Outcome::Int(0)).unwrap();
        assert!(c.approx_eq(&bern(0.6), 1e-12));
    }

    #[test]
    fn json_roundtrip_validates() {
        let d = bern(0.25);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"outcomes":[1,0],"weights":[0.25,0.75]}"#);
        let back: FiniteDistribution = serde_json::from_str(&s).unwrap();
        assert!(back.approx_eq(&d, 0.0));
        assert!(serde_json::from_str::<FiniteDistribution>(r#"{"outcomes":[1],"weights":[0.5]}"#).is_err());
    }
}
