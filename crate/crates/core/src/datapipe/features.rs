use std::path::Path;
use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::beat::{BeatRecord, SEGMENT_LEN};
use crate::{Error, Result};

/// Non-negative frequency bins kept per channel (0..=126).
pub const BINS_PER_CHANNEL: usize = SEGMENT_LEN / 2 + 1;
pub const FEATURE_LEN: usize = 2 * BINS_PER_CHANNEL;

/// Spectral magnitudes: channel-0 bins 0..126, then channel-1 bins 0..126.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub mags: Vec<f64>,
}

impl FeatureVector {
    pub fn get(&self, bin: usize) -> f64 {
        self.mags[bin]
    }
}

fn plan() -> &'static Arc<dyn Fft<f64>> {
    static PLAN: OnceLock<Arc<dyn Fft<f64>>> = OnceLock::new();
    PLAN.get_or_init(|| FftPlanner::new().plan_fft_forward(SEGMENT_LEN))
}

/// Relative round-off floor of the transform. Every normalized magnitude
/// is at most `mean |x|`; values below this multiple of it are FFT noise.
const ROUNDOFF_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Length-252 DFT magnitudes, no window and no zero padding, divided by 252.
/// Magnitudes under the round-off floor are flushed to zero, so empty bins of
/// clean signals carry no spurious class information.
pub fn fft_features(beat: &BeatRecord) -> FeatureVector {
    let fft = plan();
    let mut mags = Vec::with_capacity(FEATURE_LEN);
    let mut buf = vec![Complex::new(0.0, 0.0); SEGMENT_LEN];
    for ch in &beat.samples {
        for (slot, &x) in buf.iter_mut().zip(ch) {
            *slot = Complex::new(x, 0.0);
        }
        let floor = ROUNDOFF_FLOOR * ch.iter().map(|x| x.abs()).sum::<f64>() / SEGMENT_LEN as f64;
        fft.process(&mut buf);
        mags.extend(buf[..BINS_PER_CHANNEL].iter().map(|z| {
            let m = z.norm() / SEGMENT_LEN as f64;
            if m < floor { 0.0 } else { m }
        }));
    }
    FeatureVector { mags }
}

/// Feature cache: header `f0..f253`, one row per beat, in beat order.
pub fn write_feature_cache(path: &Path, features: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record((0..FEATURE_LEN).map(|i| format!("f{i}")))?;
    for f in features {
        w.write_record(f.mags.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_feature_cache(path: &Path) -> Result<Vec<FeatureVector>> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.len() != FEATURE_LEN {
        return Err(Error::Parse {
            offset: 0,
            message: format!("feature cache needs {FEATURE_LEN} columns"),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mags = rec
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse {
                offset: i + 1,
                message: format!("feature row: {e}"),
            })?;
        out.push(FeatureVector { mags });
    }
    Ok(out)
}
