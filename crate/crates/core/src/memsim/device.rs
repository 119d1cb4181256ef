use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::interp::Curve;
use crate::{seeded_rng, standard_normal, Error, Result};

pub const BITS_PER_WORD: usize = 8;

/// Inference supply and the earlier programming (SET compliance) voltage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub vdd: f64,
    pub vddr: f64,
    pub label: String,
}

impl OperatingPoint {
    pub fn new(vdd: f64, vddr: f64, label: impl Into<String>) -> Result<Self> {
        let op = Self {
            vdd,
            vddr,
            label: label.into(),
        };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.5..=1.4).contains(&self.vdd) {
            return Err(Error::Config(format!("vdd {} outside [0.5, 1.4] V", self.vdd)));
        }
        if !(1.0..=3.0).contains(&self.vddr) {
            return Err(Error::Config(format!("vddr {} outside [1.0, 3.0] V", self.vddr)));
        }
        Ok(())
    }
}

/// Lognormal device resistances, in log10-ohms. LRS statistics depend on
/// the programming voltage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceDistributions {
    pub lrs_log10_mean: Curve<f64>,
    pub lrs_log10_sigma: Curve<f64>,
    pub hrs_log10_mean: f64,
    pub hrs_log10_sigma: f64,
}

impl DeviceDistributions {
    pub fn validate(&self) -> Result<()> {
        if self.lrs_log10_mean.knots().iter().any(|&(_, m)| !(m < self.hrs_log10_mean)) {
            return Err(Error::Config("LRS mean must stay below the HRS mean".into()));
        }
        if self.hrs_log10_sigma < 0.0 || self.lrs_log10_sigma.knots().iter().any(|&(_, s)| s < 0.0) {
            return Err(Error::Config("device sigmas must be non-negative".into()));
        }
        Ok(())
    }

    pub fn lrs_at(&self, vddr: f64) -> (f64, f64) {
        (self.lrs_log10_mean.eval_clamped(vddr), self.lrs_log10_sigma.eval_clamped(vddr))
    }
}

/// Programmed arrays: the stored words and both resistances of every bit
/// pair. Bit `b` of word `w` lives at device index `w * 8 + b`, with
/// `b = 0` the most significant bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayState {
    pub vddr: f64,
    pub seed: u64,
    pub stored: Vec<u8>,
    pub r_bl: Vec<f64>,
    pub r_blb: Vec<f64>,
}

impl ArrayState {
    pub fn n_bits(&self) -> usize {
        self.stored.len() * BITS_PER_WORD
    }

    pub fn stored_bit(&self, bit_index: usize) -> u8 {
        let word = self.stored[bit_index / BITS_PER_WORD];
        (word >> (BITS_PER_WORD - 1 - bit_index % BITS_PER_WORD)) & 1
    }

    /// `|log10 r_blb - log10 r_bl|` of one bit pair.
    pub fn margin(&self, bit_index: usize) -> f64 {
        (self.r_blb[bit_index].log10() - self.r_bl[bit_index].log10()).abs()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_bits();
        if self.r_bl.len() != n || self.r_blb.len() != n {
            return Err(Error::InvalidInput(format!("array state needs {n} resistances per side")));
        }
        if self.r_bl.iter().chain(&self.r_blb).any(|r| !(*r > 0.0)) {
            return Err(Error::InvalidInput("resistances must be positive".into()));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let s: Self = serde_json::from_str(&text)?;
        s.validate()?;
        Ok(s)
    }
}

/// Programs every bit as a complementary pair. Per bit, the LRS draw comes
/// before the HRS draw; the result depends only on `(codes, dists, vddr, seed)`.
pub fn program_arrays(codes: &[u8], dists: &DeviceDistributions, vddr: f64, seed: u64) -> Result<ArrayState> {
    dists.validate()?;
    let (lrs_mean, lrs_sigma) = dists.lrs_at(vddr);
    let mut rng = seeded_rng(seed);
    let n = codes.len() * BITS_PER_WORD;
    let mut r_bl = Vec::with_capacity(n);
    let mut r_blb = Vec::with_capacity(n);
    for &word in codes {
        for b in 0..BITS_PER_WORD {
            let lrs = 10f64.powf(lrs_mean + lrs_sigma * standard_normal(&mut rng));
            let hrs = 10f64.powf(dists.hrs_log10_mean + dists.hrs_log10_sigma * standard_normal(&mut rng));
            if (word >> (BITS_PER_WORD - 1 - b)) & 1 == 1 {
                r_bl.push(lrs);
                r_blb.push(hrs);
            } else {
                r_bl.push(hrs);
                r_blb.push(lrs);
            }
        }
    }
    Ok(ArrayState {
        vddr,
        seed,
        stored: codes.to_vec(),
        r_bl,
        r_blb,
    })
}
