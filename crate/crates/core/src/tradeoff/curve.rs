use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A convex, continuous, non-increasing piecewise-linear curve on `[0, 1]`
/// lying below `1 - α`.
///
/// Stored in canonical form: breakpoints with strictly increasing `alpha`,
/// first at `alpha = 0`, last at `(1, 0)`, and no three consecutive collinear
/// points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveRepr", into = "CurveRepr")]
pub struct TradeoffFunction {
    breakpoints: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct CurveRepr {
    breakpoints: Vec<[f64; 2]>,
}

impl TryFrom<CurveRepr> for TradeoffFunction {
    type Error = Error;

    fn try_from(repr: CurveRepr) -> Result<Self> {
        TradeoffFunction::from_breakpoints(repr.breakpoints.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<TradeoffFunction> for CurveRepr {
    fn from(f: TradeoffFunction) -> Self {
        CurveRepr {
            breakpoints: f.breakpoints.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

fn slope(a: (f64, f64), b: (f64, f64)) -> f64 {
    (b.1 - a.1) / (b.0 - a.0)
}

fn slope_tol(s1: f64, s2: f64) -> f64 {
    tol::SLOPE * 1f64.max(s1.abs()).max(s2.abs())
}

/// Alphas closer than this are treated as the same abscissa.
const ALPHA_MERGE: f64 = 1e-14;

/// Lower convex hull of a point cloud, sorted by alpha, with near-duplicate
/// abscissae merged and collinear interior points removed.
pub(crate) fn lower_hull(mut points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        match merged.last_mut() {
            Some(last) if p.0 - last.0 <= ALPHA_MERGE => {
                if p.1 < last.1 {
                    last.1 = p.1;
                }
            }
            _ => merged.push(p),
        }
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(merged.len());
    for p in merged {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let (s1, s2) = (slope(a, b), slope(b, p));
            if s1 >= s2 - slope_tol(s1, s2) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

impl TradeoffFunction {
    /// Validates and canonicalizes a list of breakpoints.
    pub fn from_breakpoints(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCurve("need at least two breakpoints".into()));
        }
        for &(a, b) in &points {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidCurve("non-finite breakpoint".into()));
            }
            if !(-tol::EQ..=1.0 + tol::EQ).contains(&a) || !(-tol::EQ..=1.0 + tol::EQ).contains(&b) {
                return Err(Error::InvalidCurve(format!("breakpoint ({a}, {b}) outside the unit square")));
            }
            if b > 1.0 - a + tol::EQ {
                return Err(Error::InvalidCurve(format!("breakpoint ({a}, {b}) above 1 - alpha")));
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidCurve("alphas must be strictly increasing".into()));
            }
            if w[1].1 > w[0].1 + tol::EQ {
                return Err(Error::InvalidCurve("curve is increasing".into()));
            }
        }
        for w in points.windows(3) {
            let (s1, s2) = (slope(w[0], w[1]), slope(w[1], w[2]));
            if s2 < s1 - slope_tol(s1, s2) - tol::EQ {
                return Err(Error::InvalidCurve("curve is not convex".into()));
            }
        }
        if points[0].0.abs() > tol::EQ {
            return Err(Error::InvalidCurve("first breakpoint must be at alpha = 0".into()));
        }
        let last = points[points.len() - 1];
        if (last.0 - 1.0).abs() > tol::EQ || last.1.abs() > tol::EQ {
            return Err(Error::InvalidCurve("last breakpoint must be (1, 0)".into()));
        }
        Ok(Self::from_points_unchecked(points))
    }

    /// Canonical curve through the lower convex hull of `points`, which must
    /// include an `alpha = 0` and an `alpha = 1` point.
    pub(crate) fn from_points_unchecked(points: Vec<(f64, f64)>) -> Self {
        let clamped = points
            .into_iter()
            .map(|(a, b)| {
                let a = a.clamp(0.0, 1.0);
                (a, b.clamp(0.0, 1.0 - a))
            })
            .collect();
        let mut hull = lower_hull(clamped);
        debug_assert!(hull.len() >= 2, "hull needs both endpoints");
        hull[0].0 = 0.0;
        let n = hull.len();
        hull[n - 1] = (1.0, 0.0);
        // Forcing the endpoint may expose a collinear tail.
        let hull = lower_hull(hull);
        TradeoffFunction { breakpoints: hull }
    }

    /// `f(α) = 1 - α`, the curve of two identical distributions.
    pub fn identity() -> Self {
        TradeoffFunction {
            breakpoints: vec![(0.0, 1.0), (1.0, 0.0)],
        }
    }

    /// `f_{ε,δ}(α) = max{0, 1 - δ - e^ε α, e^{-ε}(1 - δ - α)}`.
    pub fn eps_delta(eps: f64, delta: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidParam(format!("epsilon {eps} must be finite and >= 0")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParam(format!("delta {delta} must lie in [0, 1]")));
        }
        let kink = (1.0 - delta) / (1.0 + eps.exp());
        Ok(Self::from_points_unchecked(vec![
            (0.0, 1.0 - delta),
            (kink, kink),
            (1.0 - delta, 0.0),
            (1.0, 0.0),
        ]))
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// Interior breakpoints.
    pub fn kinks(&self) -> &[(f64, f64)] {
        &self.breakpoints[1..self.breakpoints.len() - 1]
    }

    pub fn alphas(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.iter().map(|p| p.0)
    }

    /// Segments as `(start, end)` breakpoint pairs.
    pub fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.breakpoints.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn eval(&self, alpha: f64) -> Result<f64> {
        if alpha.is_nan() || !(-tol::MASS..=1.0 + tol::MASS).contains(&alpha) {
            return Err(Error::OutOfRange(alpha));
        }
        Ok(self.value_at(alpha.clamp(0.0, 1.0)))
    }

    /// Interpolated value for an alpha already known to lie in `[0, 1]`.
    pub(crate) fn value_at(&self, alpha: f64) -> f64 {
        let bp = &self.breakpoints;
        let i = bp.partition_point(|p| p.0 < alpha);
        if i == 0 {
            return bp[0].1;
        }
        if i == bp.len() {
            return bp[bp.len() - 1].1;
        }
        let (a0, b0) = bp[i - 1];
        let (a1, b1) = bp[i];
        if a1 == alpha {
            return b1;
        }
        b0 + (b1 - b0) * (alpha - a0) / (a1 - a0)
    }

    /// `self(α) >= other(α) - tol` at every breakpoint of either curve.
    pub fn dominates(&self, other: &TradeoffFunction, tol: f64) -> bool {
        self.min_gap(other) >= -tol
    }

    /// `min_α self(α) - other(α)` over the breakpoints of both curves.
    pub fn min_gap(&self, other: &TradeoffFunction) -> f64 {
        self.alphas()
            .chain(other.alphas())
            .map(|a| self.value_at(a) - other.value_at(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest absolute difference over the breakpoints of both curves and a
    /// uniform grid of `grid` points.
    pub fn sup_distance(&self, other: &TradeoffFunction, grid: usize) -> f64 {
        grid_with_breakpoints(&[self, other], grid)
            .into_iter()
            .map(|a| (self.value_at(a) - other.value_at(a)).abs())
            .fold(0.0, f64::max)
    }

    /// `alpha,beta` rows at the breakpoints, plus a uniform grid of `grid`
    /// points when given. Values carry 12 significant digits.
    pub fn to_csv(&self, grid: Option<usize>) -> String {
        let alphas = match grid {
            Some(n) => grid_with_breakpoints(&[self], n),
            None => self.alphas().collect(),
        };
        let mut out = String::from("alpha,beta\n");
        for a in alphas {
            out.push_str(&format_sig(a));
            out.push(',');
            out.push_str(&format_sig(self.value_at(a)));
            out.push('\n');
        }
        out
    }
}

/// Sorted, de-duplicated union of `n` uniform grid points on `[0, 1]` and the
/// breakpoints of every curve.
pub fn grid_with_breakpoints(curves: &[&TradeoffFunction], n: usize) -> Vec<f64> {
    let mut alphas: Vec<f64> = if n >= 2 {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    } else {
        Vec::new()
    };
    for c in curves {
        alphas.extend(c.alphas());
    }
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    alphas
}

/// Formats with 12 significant digits, trailing zeros trimmed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn identity_eval() {
        let f = TradeoffFunction::identity();
        assert!((f.eval(0.3).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(f.eval(1.0).unwrap(), 0.0);
    }

    #[test]
    fn eval_out_of_range() {
        let f = TradeoffFunction::identity();
        assert_eq!(f.eval(1.5).unwrap_err(), Error::OutOfRange(1.5));
        assert!(f.eval(-0.1).is_err());
        assert!(f.eval(f64::NAN).is_err());
    }

    #[test]
    fn eps_delta_shapes() {
        let f = TradeoffFunction::eps_delta(0.0, 0.0).unwrap();
        assert_eq!(f.breakpoints(), &[(0.0, 1.0), (1.0, 0.0)]);

        let f = TradeoffFunction::eps_delta(LN2, 0.0).unwrap();
        assert_eq!(f.breakpoints().len(), 3);
        assert!((f.eval(1.0 / 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        let f = TradeoffFunction::eps_delta(0.0, 0.5).unwrap();
        assert!((f.eval(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(f.eval(0.5).unwrap().abs() < 1e-15);

        let f = TradeoffFunction::eps_delta(1.0, 0.1).unwrap();
        assert_eq!(f.breakpoints().len(), 4);
        for a in [0.0, 0.1, 0.3, 0.7, 0.95] {
            let direct = (1.0 - 0.1 - 1f64.exp() * a).max((-1f64).exp() * (1.0 - 0.1 - a)).max(0.0);
            assert!((f.eval(a).unwrap() - direct).abs() < 1e-12);
        }
        assert!(TradeoffFunction::eps_delta(-1.0, 0.0).is_err());
        assert!(TradeoffFunction::eps_delta(1.0, 1.5).is_err());
    }

    #[test]
    fn rejects_invalid_curves() {
        // not convex
        assert!(TradeoffFunction::from_breakpoints(vec![(0.0, 1.0), (0.5, 0.5), (0.6, 0.1), (1.0, 0.0)])
            .is_err());
        // above 1 - alpha
        assert!(TradeoffFunction::from_breakpoints(vec![(0.0, 1.0), (0.5, 0.6), (1.0, 0.0)]).is_err());
        // does not end at zero
        assert!(TradeoffFunction::from_breakpoints(vec![(0.0, 1.0), (1.0, 0.1)]).is_err());
        // missing alpha = 0
        assert!(TradeoffFunction::from_breakpoints(vec![(0.2, 0.5), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn collinear_points_merge() {
        let f = TradeoffFunction::from_breakpoints(vec![(0.0, 1.0), (0.25, 0.75), (0.5, 0.5), (1.0, 0.0)]).unwrap();
        assert_eq!(f.breakpoints(), &[(0.0, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn poset_orientation() {
        let f2 = TradeoffFunction::eps_delta(LN2, 0.0).unwrap();
        let f3 = TradeoffFunction::eps_delta(3f64.ln(), 0.0).unwrap();
        assert!(f2.dominates(&f3, tol::EQ));
        assert!(!f3.dominates(&f2, tol::EQ));
    }

    #[test]
    fn json_and_csv() {
        let f = TradeoffFunction::eps_delta(LN2, 0.0).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with(r#"{"breakpoints":[[0.0,1.0],"#));
        let back: TradeoffFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(f.to_csv(None), "alpha,beta\n0,1\n0.333333333333,0.333333333333\n1,0\n");
        assert_eq!(f.to_csv(Some(3)).lines().count(), 5);
    }

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_sig(1e-5 / 3.0), "0.00000333333333333");
        assert_eq!(format_sig(1.0), "1");
    }
}
