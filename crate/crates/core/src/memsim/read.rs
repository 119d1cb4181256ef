use rand::Rng;
use serde::{Deserialize, Serialize};

use super::device::{ArrayState, OperatingPoint, BITS_PER_WORD};
use crate::bayesfront::{ReadFault, WordAddress, WordReader};
use crate::interp::Curve;
use crate::keyed_rng;
use crate::rng::uniform01;

/// Key domain for word reads.
const READ_DOMAIN: u64 = 0x5245_4144; // "READ"

/// Sense-amplifier error model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadErrorModel {
    /// `(vdd, sigma_n)` knots in log10-resistance units, held flat outside.
    pub sigma_n: Curve<f64>,
}

impl ReadErrorModel {
    pub fn sigma_at(&self, vdd: f64) -> f64 {
        self.sigma_n.eval_clamped(vdd)
    }

    /// Per-bit flip probability for a pair with the given margin.
    pub fn bit_error(&self, margin: f64, vdd: f64) -> f64 {
        let sigma = self.sigma_at(vdd);
        if !(sigma > 0.0) {
            return 0.0;
        }
        0.5 * libm::erfc(margin / (std::f64::consts::SQRT_2 * sigma))
    }

    /// Flip probabilities of every bit of a programmed state at `vdd`.
    pub fn bit_errors(&self, state: &ArrayState, vdd: f64) -> Vec<f64> {
        (0..state.n_bits()).map(|i| self.bit_error(state.margin(i), vdd)).collect()
    }
}

/// Flips each bit (MSB first) independently with its probability.
pub fn flip_word<R: Rng>(code: u8, eps: &[f64], rng: &mut R) -> u8 {
    let mut out = code;
    for (b, &e) in eps.iter().enumerate().take(BITS_PER_WORD) {
        if uniform01(rng) < e {
            out ^= 1 << (BITS_PER_WORD - 1 - b);
        }
    }
    out
}

/// One noisy read. The random stream is keyed by `(seed, address,
/// read_index)`, so reads do not depend on evaluation order.
pub fn read_word(
    state: &ArrayState,
    addr: WordAddress,
    op: &OperatingPoint,
    model: &ReadErrorModel,
    seed: u64,
    read_index: u64,
) -> u8 {
    let w = addr.flat();
    let eps: Vec<f64> = (0..BITS_PER_WORD)
        .map(|b| model.bit_error(state.margin(w * BITS_PER_WORD + b), op.vdd))
        .collect();
    let mut rng = keyed_rng(seed, READ_DOMAIN, w as u64, read_index);
    flip_word(state.stored[w], &eps, &mut rng)
}

/// Word reader backed by a programmed array at one inference supply.
///
/// Flip probabilities are computed once; `begin_input` advances the read
/// index that keys the per-read random streams.
#[derive(Debug, Clone)]
pub struct MemristorReader<'a> {
    state: &'a ArrayState,
    eps: Vec<f64>,
    seed: u64,
    read_index: u64,
}

impl<'a> MemristorReader<'a> {
    pub fn new(state: &'a ArrayState, op: &OperatingPoint, model: &ReadErrorModel, seed: u64) -> Self {
        Self {
            state,
            eps: model.bit_errors(state, op.vdd),
            seed,
            read_index: 0,
        }
    }

    pub fn bit_errors(&self) -> &[f64] {
        &self.eps
    }

    pub fn mean_bit_error(&self) -> f64 {
        self.eps.iter().sum::<f64>() / self.eps.len() as f64
    }
}

impl WordReader for MemristorReader<'_> {
    fn read_word(&mut self, addr: WordAddress) -> Result<u8, ReadFault> {
        let w = addr.flat();
        if w >= self.state.stored.len() {
            return Err(ReadFault {
                address: addr,
                reason: "address outside the programmed array".into(),
            });
        }
        let mut rng = keyed_rng(self.seed, READ_DOMAIN, w as u64, self.read_index);
        let eps = &self.eps[w * BITS_PER_WORD..(w + 1) * BITS_PER_WORD];
        Ok(flip_word(self.state.stored[w], eps, &mut rng))
    }

    fn begin_input(&mut self, input_index: u64) {
        self.read_index = input_index;
    }
}
