use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::backend::BackendClassifier;
use super::policy::{decide_wake, WakePolicy, WakeReason};
use crate::bayesfront::{bayes_infer, BayesModel, WordReader};
use crate::datapipe::{BeatClass, BeatRecord, FeatureVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeatTrace {
    pub beat: usize,
    pub true_label: BeatClass,
    pub front_pred: BeatClass,
    pub scores: [u16; 4],
    pub wake: bool,
    pub reason: WakeReason,
    /// `None` when the back end failed on a waked beat.
    pub system_pred: Option<BeatClass>,
}

/// Beat and wake counts for one true class, split by reason.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassWakeCounts {
    pub beats: usize,
    pub by_reason: [usize; 4],
}

impl ClassWakeCounts {
    pub fn wakes(&self) -> usize {
        self.beats - self.by_reason[WakeReason::None.index()]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamResult {
    pub traces: Vec<BeatTrace>,
    pub counts: [ClassWakeCounts; 4],
    pub backend_errors: usize,
}

impl StreamResult {
    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["beat", "true", "front_pred", "wake", "reason", "system_pred"])?;
        for t in &self.traces {
            w.write_record([
                t.beat.to_string().as_str(),
                t.true_label.name(),
                t.front_pred.name(),
                if t.wake { "1" } else { "0" },
                t.reason.name(),
                t.system_pred.map_or("error", BeatClass::name),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn save_trace_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_trace_csv(std::io::BufWriter::new(file))
    }
}

/// Streams beats through front end, wake policy and back end in order.
/// Input `i` uses read index `i`, so a run is reproducible from the reader
/// seed alone.
pub fn run_stream<R, B>(
    beats: &[BeatRecord],
    features: &[FeatureVector],
    front: &BayesModel,
    reader: &mut R,
    backend: &mut B,
    policy: &WakePolicy,
) -> Result<StreamResult>
where
    R: WordReader + ?Sized,
    B: BackendClassifier + ?Sized,
{
    if beats.len() != features.len() {
        return Err(Error::InvalidInput(format!(
            "{} beats but {} feature vectors",
            beats.len(),
            features.len()
        )));
    }
    let mut result = StreamResult::default();
    for (i, (beat, fv)) in beats.iter().zip(features).enumerate() {
        reader.begin_input(i as u64);
        let scores = bayes_infer(&front.levels(fv), front, reader);
        let decision = decide_wake(&scores, policy);
        let system_pred = if decision.wake {
            backend.classify(beat, fv).ok()
        } else {
            Some(BeatClass::N)
        };
        if system_pred.is_none() {
            result.backend_errors += 1;
        }
        let c = &mut result.counts[beat.label.index()];
        c.beats += 1;
        c.by_reason[decision.reason.index()] += 1;
        result.traces.push(BeatTrace {
            beat: i,
            true_label: beat.label,
            front_pred: decision.front_pred,
            scores: scores.scores,
            wake: decision.wake,
            reason: decision.reason,
            system_pred,
        });
    }
    Ok(result)
}

/// Fractions of one population by wake reason; `None` for an empty
/// population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReasonFractions {
    pub abnormal: Option<f64>,
    pub ambiguous: Option<f64>,
    pub invalid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WakeStats {
    pub p_wake_given_abnormal: Option<f64>,
    pub p_wake_given_normal: Option<f64>,
    pub abnormal_by_reason: ReasonFractions,
    pub normal_by_reason: ReasonFractions,
    pub per_class: [ClassWakeCounts; 4],
}

fn fractions(c: &ClassWakeCounts) -> ReasonFractions {
    let frac = |r: WakeReason| (c.beats > 0).then(|| c.by_reason[r.index()] as f64 / c.beats as f64);
    ReasonFractions {
        abnormal: frac(WakeReason::Abnormal),
        ambiguous: frac(WakeReason::Ambiguous),
        invalid: frac(WakeReason::Invalid),
    }
}

impl WakeStats {
    pub fn from_counts(counts: &[ClassWakeCounts; 4]) -> Self {
        let mut abnormal = ClassWakeCounts::default();
        for c in &counts[1..] {
            abnormal.beats += c.beats;
            for (a, b) in abnormal.by_reason.iter_mut().zip(&c.by_reason) {
                *a += b;
            }
        }
        let normal = counts[BeatClass::N.index()];
        let rate = |c: &ClassWakeCounts| (c.beats > 0).then(|| c.wakes() as f64 / c.beats as f64);
        Self {
            p_wake_given_abnormal: rate(&abnormal),
            p_wake_given_normal: rate(&normal),
            abnormal_by_reason: fractions(&abnormal),
            normal_by_reason: fractions(&normal),
            per_class: *counts,
        }
    }
}

pub fn wake_stats(result: &StreamResult) -> WakeStats {
    WakeStats::from_counts(&result.counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(beats: usize, by_reason: [usize; 4]) -> ClassWakeCounts {
        ClassWakeCounts { beats, by_reason }
    }

    /// 998 of 1000 abnormal beats wake (983 explicit, 15 uncertain); 188 of
    /// 10000 normal beats wake.
    #[test]
    fn regime_a_statistics_fixture() {
        let c = [
            counts(10_000, [9_812, 0, 150, 38]),
            counts(400, [1, 393, 4, 2]),
            counts(300, [0, 295, 3, 2]),
            counts(300, [1, 295, 2, 2]),
        ];
        let s = WakeStats::from_counts(&c);
        assert_eq!(s.p_wake_given_abnormal, Some(0.998));
        assert_eq!(s.p_wake_given_normal, Some(0.0188));
        assert_eq!(s.abnormal_by_reason.abnormal, Some(0.983));
        let uncertain = s.abnormal_by_reason.ambiguous.unwrap() + s.abnormal_by_reason.invalid.unwrap();
        assert!((uncertain - 0.015).abs() < 1e-15);
    }

    #[test]
    fn empty_population_is_undefined() {
        let c = [counts(0, [0; 4]), counts(5, [0, 5, 0, 0]), counts(0, [0; 4]), counts(0, [0; 4])];
        let s = WakeStats::from_counts(&c);
        assert_eq!(s.p_wake_given_abnormal, Some(1.0));
        assert_eq!(s.p_wake_given_normal, None);
        assert_eq!(s.normal_by_reason.invalid, None);
    }
}
