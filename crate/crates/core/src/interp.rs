//! Piecewise-linear lookup tables.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Piecewise-linear curve through `(x, y)` knots with strictly increasing `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(T, T)>", into = "Vec<(T, T)>")]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct Curve<T: Scalar> {
    knots: Vec<(T, T)>,
}

impl<T: Scalar> Curve<T> {
    pub fn new(knots: Vec<(T, T)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Config("curve needs at least one knot".into()));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Config("curve knots must have strictly increasing x".into()));
        }
        Ok(Self { knots })
    }

    /// Single-knot curve, i.e. a constant.
    pub fn constant(y: T) -> Self {
        Self {
            knots: vec![(T::zero(), y)],
        }
    }

    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    pub fn domain(&self) -> (T, T) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    /// Interpolates inside the knot range and holds the end values outside it.
    pub fn eval_clamped(&self, x: T) -> T {
        let (lo, hi) = self.domain();
        if x <= lo {
            return self.knots[0].1;
        }
        if x >= hi {
            return self.knots[self.knots.len() - 1].1;
        }
        self.interior(x)
    }

    /// Interpolates, refusing to extrapolate.
    pub fn eval_strict(&self, x: T) -> Result<T> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(Error::OutOfRange {
                value: x.to_f64_lossy(),
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        Ok(self.eval_clamped(x))
    }

    fn interior(&self, x: T) -> T {
        let i = self.knots.partition_point(|k| k.0 <= x);
        let (x0, y0) = self.knots[i - 1];
        let (x1, y1) = self.knots[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

impl<T: Scalar> TryFrom<Vec<(T, T)>> for Curve<T> {
    type Error = Error;

    fn try_from(knots: Vec<(T, T)>) -> Result<Self> {
        Curve::new(knots)
    }
}

impl<T: Scalar> From<Curve<T>> for Vec<(T, T)> {
    fn from(c: Curve<T>) -> Self {
        c.knots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn midpoint_interpolation() {
        let c = Curve::new(vec![(0.8f64, 1.0e-9), (1.2, 2.0e-9)]).unwrap();
        assert!((c.eval_strict(1.0).unwrap() - 1.5e-9).abs() < 1e-24);
    }

    #[test]
    fn strict_rejects_extrapolation() {
        let c = Curve::new(vec![(0.8, 1.0), (1.2, 2.0)]).unwrap();
        assert!(matches!(c.eval_strict(0.6), Err(Error::OutOfRange { .. })));
        assert_eq!(c.eval_clamped(0.6), 1.0);
        assert_eq!(c.eval_clamped(2.0), 2.0);
    }

    #[test]
    fn knots_are_hit_exactly() {
        let c = Curve::new(vec![(0.0, 3.0), (1.0, 5.0), (2.0, 4.0)]).unwrap();
        assert_eq!(c.eval_clamped(1.0), 5.0);
        assert_eq!(c.eval_clamped(1.5), 4.5);
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(Curve::new(vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(Curve::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn rational_curve_is_exact() {
        let r = |n, d| Rational::new(n, d);
        let c = Curve::new(vec![(r(4, 5), r(1, 1)), (r(6, 5), r(2, 1))]).unwrap();
        assert_eq!(c.eval_strict(r(1, 1)).unwrap(), r(3, 2));
    }

    #[test]
    fn serde_roundtrip_validates() {
        let c: Curve<f64> = serde_json::from_str("[[0.7, 3.0], [1.2, 0.15]]").unwrap();
        assert_eq!(c.knots().len(), 2);
        assert!(serde_json::from_str::<Curve<f64>>("[[1.2, 3.0], [0.7, 0.15]]").is_err());
    }
}
