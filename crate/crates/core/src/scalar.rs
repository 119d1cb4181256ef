use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Field-like scalar for closed-form models.
///
/// Implemented for `f32`, `f64` and [`crate::Rational`]. Constants are
/// built from integer ratios so that decimal values such as `0.01` stay
/// exact in rational arithmetic.
pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug {
    /// `num / den`, converted through `i64`.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("numerator representable") / Self::from_i64(den).expect("denominator representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for crate::Rational {}
