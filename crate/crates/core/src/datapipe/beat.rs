use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SAMPLE_RATE_HZ: u32 = 360;
/// 0.7 s at 360 Hz, truncated.
pub const SEGMENT_LEN: usize = 252;
pub const HALF_WINDOW: usize = SEGMENT_LEN / 2;

/// Beat class. `N` is the only normal class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BeatClass {
    N = 0,
    L = 1,
    R = 2,
    P = 3,
}

impl BeatClass {
    pub const ALL: [BeatClass; 4] = [BeatClass::N, BeatClass::L, BeatClass::R, BeatClass::P];
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("class id {i} not in 0..=3")))
    }

    pub fn is_abnormal(self) -> bool {
        self != BeatClass::N
    }

    pub fn name(self) -> &'static str {
        match self {
            BeatClass::N => "N",
            BeatClass::L => "L",
            BeatClass::R => "R",
            BeatClass::P => "P",
        }
    }
}

/// One labeled two-channel beat window.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatRecord {
    pub samples: [Vec<f64>; 2],
    pub label: BeatClass,
    pub source_id: String,
    pub beat_index: u64,
}

impl BeatRecord {
    pub fn new(samples: [Vec<f64>; 2], label: BeatClass, source_id: impl Into<String>, beat_index: u64) -> Result<Self> {
        if samples.iter().any(|ch| ch.len() != SEGMENT_LEN) {
            return Err(Error::InvalidInput(format!(
                "beat needs {SEGMENT_LEN} samples per channel, got {} and {}",
                samples[0].len(),
                samples[1].len()
            )));
        }
        Ok(Self {
            samples,
            label,
            source_id: source_id.into(),
            beat_index,
        })
    }
}

/// Cuts the window `[qrs - 126, qrs + 126)` from both channels.
///
/// Returns `None` when the window leaves the record; callers count skips.
pub fn segment_beat(signal: &[Vec<f64>], qrs_time: usize, label: BeatClass, source_id: &str, beat_index: u64) -> Option<BeatRecord> {
    if signal.len() < 2 {
        return None;
    }
    let start = qrs_time.checked_sub(HALF_WINDOW)?;
    let end = start + SEGMENT_LEN;
    if signal[0].len() < end || signal[1].len() < end {
        return None;
    }
    let samples = [signal[0][start..end].to_vec(), signal[1][start..end].to_vec()];
    Some(BeatRecord {
        samples,
        label,
        source_id: source_id.to_string(),
        beat_index,
    })
}
