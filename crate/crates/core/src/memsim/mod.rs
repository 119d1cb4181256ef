//! Complementary 2T2R storage of the front-end words and its read faults.
//!
//! Every stored bit is a pair of memristors programmed to opposite states:
//! bit 1 puts the bit-line device in LRS and the complementary device in
//! HRS, bit 0 the reverse. The programming condition `vddr` sets the LRS
//! distribution (and so the memory window); the inference supply `vdd`
//! sets the sense-noise scale. A bit flips with probability
//! `0.5 * erfc(margin / (sqrt(2) * sigma_n(vdd)))`, where `margin` is the
//! log10 resistance gap of its pair.
//!
//! The shipped presets are non-physical calibration constants chosen to
//! reproduce the qualitative regime behavior, not measured device data.

mod config;
mod device;
mod presets;
mod read;

pub use config::OperatingConfig;
pub use device::{program_arrays, ArrayState, DeviceDistributions, OperatingPoint, BITS_PER_WORD};
pub use presets::{regime_preset, Regime};
pub use read::{flip_word, read_word, MemristorReader, ReadErrorModel};
