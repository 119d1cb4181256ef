use serde::{Deserialize, Serialize};

use super::beat::{BeatClass, BeatRecord, SEGMENT_LEN};
use super::dataset::Dataset;
use crate::rng::uniform01;
use crate::{seeded_rng, standard_normal};

/// Seeded synthetic beat source.
///
/// Class `c` carries tones at bins `8 + 4c` (amplitude 1.0) and `30 + 4c`
/// (amplitude 0.6) on both channels, channel 1 phase-shifted by pi/3, plus
/// white noise of standard deviation `noise_sigma`. Splits interleave the
/// classes (beat `i` has class `i % 4`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub seed: u64,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub noise_sigma: f64,
}

impl SynthParams {
    pub fn new(seed: u64, beats_per_class: usize, noise_sigma: f64) -> Self {
        Self {
            seed,
            train_per_class: beats_per_class,
            test_per_class: beats_per_class,
            noise_sigma,
        }
    }

    pub fn planted_bins(class: BeatClass) -> [usize; 2] {
        let c = class.index();
        [8 + 4 * c, 30 + 4 * c]
    }
}

const TONE_AMPS: [f64; 2] = [1.0, 0.6];
const CHANNEL1_SHIFT: f64 = std::f64::consts::FRAC_PI_3;

pub fn synth_dataset(params: &SynthParams) -> Dataset {
    let mut rng = seeded_rng(params.seed);
    let mut split = |name: &str, per_class: usize| -> Vec<BeatRecord> {
        (0..per_class * BeatClass::COUNT)
            .map(|i| {
                let label = BeatClass::ALL[i % BeatClass::COUNT];
                let bins = SynthParams::planted_bins(label);
                let phases = [
                    std::f64::consts::TAU * uniform01(&mut rng),
                    std::f64::consts::TAU * uniform01(&mut rng),
                ];
                let mut samples = [vec![0.0; SEGMENT_LEN], vec![0.0; SEGMENT_LEN]];
                for (ch, out) in samples.iter_mut().enumerate() {
                    let shift = ch as f64 * CHANNEL1_SHIFT;
                    for (t, x) in out.iter_mut().enumerate() {
                        let mut v = 0.0;
                        for k in 0..2 {
                            let w = std::f64::consts::TAU * bins[k] as f64 * t as f64 / SEGMENT_LEN as f64;
                            v += TONE_AMPS[k] * libm::cos(w + phases[k] + shift);
                        }
                        *x = v;
                    }
                    if params.noise_sigma > 0.0 {
                        for x in out.iter_mut() {
                            *x += params.noise_sigma * standard_normal(&mut rng);
                        }
                    }
                }
                BeatRecord {
                    samples,
                    label,
                    source_id: format!("synth-{name}"),
                    beat_index: i as u64,
                }
            })
            .collect()
    };
    let train = split("train", params.train_per_class);
    let test = split("test", params.test_per_class);
    Dataset::new(train, test, Some(params.seed))
}
