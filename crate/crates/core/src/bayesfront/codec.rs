use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// 8-bit log-domain probability codec, `p ~= B^(n/m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogCodec<T> {
    #[serde(rename = "B")]
    pub base: T,
    #[serde(rename = "m")]
    pub scale: u32,
}

impl<T: Float> Default for LogCodec<T> {
    fn default() -> Self {
        Self {
            base: T::from(0.15).expect("float"),
            scale: 16,
        }
    }
}

impl<T: Float> LogCodec<T> {
    pub fn new(base: T, scale: u32) -> Result<Self> {
        let c = Self { base, scale };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base > T::zero() && self.base < T::one()) || self.scale == 0 {
            return Err(Error::Config(format!(
                "log codec needs 0 < B < 1 and m >= 1, got B={:?} m={}",
                self.base.to_f64(),
                self.scale
            )));
        }
        Ok(())
    }

    fn m(&self) -> T {
        T::from(self.scale).expect("scale fits")
    }

    /// `round(m * ln p / ln B)`, clamped to `[0, 255]`.
    pub fn encode(&self, p: T) -> Result<u8> {
        if !(p > T::zero()) {
            return Err(Error::InvalidInput(format!(
                "log codec needs p > 0, got {:?}",
                p.to_f64()
            )));
        }
        let n = (self.m() * p.ln() / self.base.ln()).round();
        let n = n.max(T::zero()).min(T::from(255).expect("float"));
        Ok(n.to_u8().expect("clamped"))
    }

    pub fn decode(&self, code: u8) -> T {
        self.base.powf(T::from(code).expect("float") / self.m())
    }

    /// Codes that `encode` can produce for probabilities in `(threshold, 1]`.
    ///
    /// `encode` is monotone, so this is the contiguous range from code 0 to
    /// the code of the smallest representable probability above `threshold`.
    pub fn codes_above(&self, threshold: T) -> Vec<u8> {
        let mut p = threshold;
        // next representable value above the threshold
        let eps = T::epsilon() * threshold.abs().max(T::min_positive_value());
        while p <= threshold {
            p = p + eps;
        }
        match self.encode(p) {
            Ok(hi) => (0..=hi).collect(),
            Err(_) => Vec::new(),
        }
    }

    /// Natural log of the decoded probability, `(n / m) ln B`.
    pub fn decode_ln(&self, code: u16) -> T {
        T::from(code).expect("float") / self.m() * self.base.ln()
    }

    /// Smallest accumulated score whose decoded probability falls below
    /// `2^-frac_bits`; 94 at the default codec with 16 fractional bits.
    pub fn underflow_threshold(&self, frac_bits: u32) -> u16 {
        let limit = -T::from(frac_bits).expect("float") * T::from(2.0).expect("float").ln();
        (0..=u16::MAX)
            .find(|&n| self.decode_ln(n) < limit)
            .unwrap_or(u16::MAX)
    }
}
