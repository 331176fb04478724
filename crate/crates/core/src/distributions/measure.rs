//! The generic privacy-measure contract: a partially ordered value domain,
//! a distance between distributions, and suprema over finite sets.

use super::{kl_divergence, max_divergence, renyi_divergence, ExtReal, FiniteDistribution};
use crate::error::{Error, Result};

pub trait PrivacyMeasure {
    type Value: Clone + std::fmt::Debug;

    fn name(&self) -> String;

    fn distance(&self, p: &FiniteDistribution, q: &FiniteDistribution) -> Result<Self::Value>;

    /// `a ⪯ b` up to `tol`.
    fn precedes(&self, a: &Self::Value, b: &Self::Value, tol: f64) -> bool;

    fn supremum(&self, values: &[Self::Value]) -> Result<Self::Value>;
}

fn ext_sup(values: &[ExtReal]) -> Result<ExtReal> {
    values.iter().copied().reduce(ExtReal::max).ok_or(Error::EmptySet)
}

fn ext_precedes(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    match (a, b) {
        (_, ExtReal::Infinity) => true,
        (ExtReal::Infinity, ExtReal::Finite(_)) => false,
        (ExtReal::Finite(a), ExtReal::Finite(b)) => a <= b + tol,
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MaxDivergence;

impl PrivacyMeasure for MaxDivergence {
    type Value = ExtReal;

    fn name(&self) -> String {
        "max".into()
    }

    fn distance(&self, p: &FiniteDistribution, q: &FiniteDistribution) -> Result<ExtReal> {
        Ok(max_divergence(p, q))
    }

    fn precedes(&self, a: &ExtReal, b: &ExtReal, tol: f64) -> bool {
        ext_precedes(*a, *b, tol)
    }

    fn supremum(&self, values: &[ExtReal]) -> Result<ExtReal> {
        ext_sup(values)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Renyi {
    pub alpha: f64,
}

impl PrivacyMeasure for Renyi {
    type Value = ExtReal;

    fn name(&self) -> String {
        format!("renyi({})", self.alpha)
    }

    fn distance(&self, p: &FiniteDistribution, q: &FiniteDistribution) -> Result<ExtReal> {
        renyi_divergence(p, q, self.alpha)
    }

    fn precedes(&self, a: &ExtReal, b: &ExtReal, tol: f64) -> bool {
        ext_precedes(*a, *b, tol)
    }

    fn supremum(&self, values: &[ExtReal]) -> Result<ExtReal> {
        ext_sup(values)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct KullbackLeibler;

impl PrivacyMeasure for KullbackLeibler {
    type Value = ExtReal;

    fn name(&self) -> String {
        "kl".into()
    }

    fn distance(&self, p: &FiniteDistribution, q: &FiniteDistribution) -> Result<ExtReal> {
        Ok(kl_divergence(p, q))
    }

    fn precedes(&self, a: &ExtReal, b: &ExtReal, tol: f64) -> bool {
        ext_precedes(*a, *b, tol)
    }

    fn supremum(&self, values: &[ExtReal]) -> Result<ExtReal> {
        ext_sup(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_is_top() {
        let m = MaxDivergence;
        assert!(m.precedes(&ExtReal::Finite(3.0), &ExtReal::Infinity, 0.0));
        assert!(!m.precedes(&ExtReal::Infinity, &ExtReal::Finite(3.0), 0.0));
        let s = m
            .supremum(&[ExtReal::Finite(1.0), ExtReal::Finite(2.0)])
            .unwrap();
        assert_eq!(s, ExtReal::Finite(2.0));
        assert_eq!(m.supremum(&[]).unwrap_err(), Error::EmptySet);
    }
}
