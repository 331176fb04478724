use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::TradeoffFunction;
use crate::distributions::{FiniteDistribution, Outcome};
use crate::error::{Error, Result};

/// Trade-off function `T(p, q)`: the smallest type-II error `1 - E_q[φ]` over
/// rejection rules with type-I error `E_p[φ] <= α`.
///
/// The optimal rules reject outcomes in decreasing order of the likelihood
/// ratio `q(x)/p(x)`, so the curve is the polyline through the cumulative
/// `(Σp, 1 - Σq)` sums in that order.
pub fn np_tradeoff(p: &FiniteDistribution, q: &FiniteDistribution) -> TradeoffFunction {
    let pm = p.to_map();
    let qm = q.to_map();
    let mut cells: Vec<(&Outcome, f64, f64)> = pm
        .keys()
        .chain(qm.keys())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|o| (o, pm.get(o).copied().unwrap_or(0.0), qm.get(o).copied().unwrap_or(0.0)))
        .filter(|&(_, px, qx)| px > 0.0 || qx > 0.0)
        .collect();
    // q_a/p_a > q_b/p_b  <=>  q_a p_b > q_b p_a, which also orders p = 0 first.
    cells.sort_by(|a, b| {
        (b.2 * a.1)
            .partial_cmp(&(a.2 * b.1))
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.cmp(b.0))
    });
    let mut points = Vec::with_capacity(cells.len() + 1);
    points.push((0.0, 1.0));
    let (mut alpha, mut mass_q) = (0.0, 0.0);
    for (_, px, qx) in cells {
        alpha += px;
        mass_q += qx;
        points.push((alpha, 1.0 - mass_q));
    }
    points.push((1.0, 0.0));
    TradeoffFunction::from_points_unchecked(points)
}

/// A randomized rejection rule: reject on outcome `x` with probability `φ(x)`.
#[derive(Clone, Debug, Default)]
pub struct RandomizedTest {
    phi: BTreeMap<Outcome, f64>,
}

impl RandomizedTest {
    pub fn new<I>(phi: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Outcome, f64)>,
    {
        let phi: BTreeMap<Outcome, f64> = phi.into_iter().collect();
        if let Some((_, &v)) = phi.iter().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfRange(v));
        }
        Ok(RandomizedTest { phi })
    }

    pub fn reject_prob(&self, x: &Outcome) -> f64 {
        self.phi.get(x).copied().unwrap_or(0.0)
    }

    /// `(E_p[φ], 1 - E_q[φ])`.
    pub fn errors(&self, p: &FiniteDistribution, q: &FiniteDistribution) -> (f64, f64) {
        let type_one = p.iter().map(|(x, w)| w * self.reject_prob(x)).sum();
        let power: f64 = q.iter().map(|(x, w)| w * self.reject_prob(x)).sum();
        (type_one, 1.0 - power)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;

    fn bern(p: f64) -> FiniteDistribution {
        FiniteDistribution::bernoulli(p).unwrap()
    }

    #[test]
    fn identical_pair_is_identity_curve() {
        let p = FiniteDistribution::new(vec![1.into(), 2.into(), 3.into()], vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(np_tradeoff(&p, &p).breakpoints(), &[(0.0, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn bernoulli_pair_kink() {
        let f = np_tradeoff(&bern(2.0 / 3.0), &bern(1.0 / 3.0));
        let bp = f.breakpoints();
        assert_eq!(bp.len(), 3);
        assert!((bp[1].0 - 1.0 / 3.0).abs() < 1e-15 && (bp[1].1 - 1.0 / 3.0).abs() < 1e-15);
        let closed = TradeoffFunction::eps_delta(std::f64::consts::LN_2, 0.0).unwrap();
        assert!(f.sup_distance(&closed, 101) < 1e-12);
    }

    #[test]
    fn disjoint_supports() {
        let f = np_tradeoff(&FiniteDistribution::point("a"), &FiniteDistribution::point("b"));
        assert_eq!(f.breakpoints(), &[(0.0, 0.0), (1.0, 0.0)]);
    }

    #[test]
    fn partial_support_overlap() {
        // q puts 0.5 on an outcome p never produces: free rejection at alpha = 0
        let p = FiniteDistribution::new(vec!["a".into(), "b".into()], vec![0.5, 0.5]).unwrap();
        let q = FiniteDistribution::new(vec!["a".into(), "c".into()], vec![0.5, 0.5]).unwrap();
        let f = np_tradeoff(&p, &q);
        assert!((f.eval(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(f.eval(0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn tests_never_beat_the_curve() {
        let p = FiniteDistribution::new(vec![1.into(), 2.into(), 3.into()], vec![0.2, 0.3, 0.5]).unwrap();
        let q = FiniteDistribution::new(vec![1.into(), 2.into(), 3.into()], vec![0.6, 0.1, 0.3]).unwrap();
        let f = np_tradeoff(&p, &q);
        for phi in [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 0.2, 0.9], [1.0, 1.0, 1.0], [0.3, 0.0, 0.0]] {
            let t = RandomizedTest::new([(1.into(), phi[0]), (2.into(), phi[1]), (3.into(), phi[2])]).unwrap();
            let (a, b) = t.errors(&p, &q);
            assert!(b >= f.eval(a).unwrap() - tol::EQ);
        }
        assert!(RandomizedTest::new([(Outcome::Int(1), 1.5)]).is_err());
    }
}
