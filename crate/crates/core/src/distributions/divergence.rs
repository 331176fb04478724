use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::FiniteDistribution;
use crate::error::{Error, Result};

/// A nonnegative real or `+∞`.
///
/// Support violations produce [`ExtReal::Infinity`]; no finite sentinel is
/// ever used in its place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinity => None,
        }
    }

    /// `f64` view, mapping infinity to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Equal within `tol`; two infinities are equal.
    pub fn approx_eq(self, other: ExtReal, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs() <= tol,
            (ExtReal::Infinity, ExtReal::Infinity) => true,
            _ => false,
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinity) => Some(Ordering::Less),
            (ExtReal::Infinity, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Infinity, ExtReal::Infinity) => Some(Ordering::Equal),
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinity,
        }
    }
}

impl std::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, Add::add)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => serializer.serialize_f64(*v),
            ExtReal::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
                if v == "inf" {
                    Ok(ExtReal::Infinity)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}

/// Rényi divergence of order `alpha > 1`, natural log.
pub fn renyi_divergence(p: &FiniteDistribution, q: &FiniteDistribution, alpha: f64) -> Result<ExtReal> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidOrder(alpha));
    }
    let q = q.to_map();
    let mut sum = 0.0;
    for (x, px) in p.support() {
        let qx = q.get(x).copied().unwrap_or(0.0);
        if qx <= 0.0 {
            return Ok(ExtReal::Infinity);
        }
        sum += (alpha * px.ln() - (alpha - 1.0) * qx.ln()).exp();
    }
    Ok(ExtReal::Finite((sum.ln() / (alpha - 1.0)).max(0.0)))
}

/// `sup_x log(p(x)/q(x))` over the support of `p`.
pub fn max_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> ExtReal {
    let q = q.to_map();
    let mut best = 0.0_f64;
    for (x, px) in p.support() {
        let qx = q.get(x).copied().unwrap_or(0.0);
        if qx <= 0.0 {
            return ExtReal::Infinity;
        }
        best = best.max((px / qx).ln());
    }
    ExtReal::Finite(best)
}

pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> ExtReal {
    let q = q.to_map();
    let mut sum = 0.0;
    for (x, px) in p.support() {
        let qx = q.get(x).copied().unwrap_or(0.0);
        if qx <= 0.0 {
            return ExtReal::Infinity;
        }
        sum += px * (px / qx).ln();
    }
    ExtReal::Finite(sum.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::product;

    fn bern(p: f64) -> FiniteDistribution {
        FiniteDistribution::bernoulli(p).unwrap()
    }

    #[test]
    fn self_divergence_is_zero() {
        let p = FiniteDistribution::new(vec![1.into(), 2.into(), 3.into()], vec![0.2, 0.3, 0.5]).unwrap();
        for alpha in [1.5, 2.0, 10.0] {
            assert_eq!(renyi_divergence(&p, &p, alpha).unwrap(), ExtReal::Finite(0.0));
        }
        assert!(max_divergence(&p, &p).approx_eq(ExtReal::ZERO, 1e-15));
        assert!(kl_divergence(&p, &p).approx_eq(ExtReal::ZERO, 1e-15));
    }

    #[test]
    fn renyi_two_on_bernoulli_pair() {
        // Σ p²/q = (4/9)/(1/3) + (1/9)/(2/3) = 4/3 + 1/6 = 3/2
        let d = renyi_divergence(&bern(2.0 / 3.0), &bern(1.0 / 3.0), 2.0).unwrap();
        assert!(d.approx_eq(ExtReal::Finite(1.5_f64.ln()), 1e-12));
        assert!((1.5_f64.ln() - 0.405465).abs() < 1e-6);
    }

    #[test]
    fn max_divergence_on_bernoulli_pair() {
        let d = max_divergence(&bern(2.0 / 3.0), &bern(1.0 / 3.0));
        assert!(d.approx_eq(ExtReal::Finite(2.0_f64.ln()), 1e-12));
    }

    #[test]
    fn kl_on_bernoulli_pair() {
        let d = kl_divergence(&bern(0.5), &bern(0.25));
        let expected = 0.5 * 2.0_f64.ln() + 0.5 * (2.0_f64 / 3.0).ln();
        assert!(d.approx_eq(ExtReal::Finite(expected), 1e-12));
        assert!((expected - 0.143841).abs() < 1e-6);
    }

    #[test]
    fn support_violation_is_infinite() {
        let p = bern(0.5);
        let q = bern(1.0);
        assert_eq!(renyi_divergence(&p, &q, 2.0).unwrap(), ExtReal::Infinity);
        assert_eq!(max_divergence(&p, &q), ExtReal::Infinity);
        assert_eq!(kl_divergence(&p, &q), ExtReal::Infinity);
        // the reverse direction only looks at supp(q) = {1}
        assert!(max_divergence(&q, &p).approx_eq(ExtReal::Finite(2.0_f64.ln()), 1e-12));
    }

    #[test]
    fn invalid_order() {
        let p = bern(0.5);
        assert_eq!(renyi_divergence(&p, &p, 1.0).unwrap_err(), Error::InvalidOrder(1.0));
        assert!(renyi_divergence(&p, &p, f64::NAN).is_err());
    }

    #[test]
    fn independent_pairs_add() {
        let (u, u2) = (bern(0.7), bern(0.4));
        let (v, v2) = (bern(0.2), bern(0.55));
        let joint = renyi_divergence(product(&u, &v).dist(), product(&u2, &v2).dist(), 3.0).unwrap();
        let sum = renyi_divergence(&u, &u2, 3.0).unwrap() + renyi_divergence(&v, &v2, 3.0).unwrap();
        assert!(joint.approx_eq(sum, 1e-12));
    }

    #[test]
    fn extended_arithmetic_and_json() {
        assert_eq!(ExtReal::Finite(1.0) + ExtReal::Infinity, ExtReal::Infinity);
        assert!(ExtReal::Infinity > ExtReal::Finite(1e300));
        let s = serde_json::to_string(&vec![ExtReal::Finite(0.5), ExtReal::Infinity]).unwrap();
        assert_eq!(s, r#"[0.5,"inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![ExtReal::Finite(0.5), ExtReal::Infinity]);
    }
}
