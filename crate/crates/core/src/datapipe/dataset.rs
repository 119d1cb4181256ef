use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::beat::{BeatClass, BeatRecord, SEGMENT_LEN};
use crate::{seeded_rng, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<BeatRecord>,
    pub test: Vec<BeatRecord>,
    pub train_counts: [usize; 4],
    pub test_counts: [usize; 4],
    pub seed: Option<u64>,
}

fn class_counts(beats: &[BeatRecord]) -> [usize; 4] {
    let mut c = [0; 4];
    for b in beats {
        c[b.label.index()] += 1;
    }
    c
}

impl Dataset {
    pub fn new(train: Vec<BeatRecord>, test: Vec<BeatRecord>, seed: Option<u64>) -> Self {
        Self {
            train_counts: class_counts(&train),
            test_counts: class_counts(&test),
            train,
            test,
            seed,
        }
    }

    pub fn manifest(&self) -> Manifest {
        let ids = |v: &[BeatRecord]| v.iter().map(|b| (b.source_id.clone(), b.beat_index)).collect();
        Manifest {
            seed: self.seed,
            train: ids(&self.train),
            test: ids(&self.test),
        }
    }
}

/// Split membership by `(source_id, beat_index)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: Option<u64>,
    pub train: Vec<(String, u64)>,
    pub test: Vec<(String, u64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestionReport {
    pub records: usize,
    pub beats_per_class: [usize; 4],
    /// Beats whose window left the record.
    pub skipped: usize,
}

/// Seeded beat-level sampling without replacement, per class.
pub fn balanced_split(pool: Vec<BeatRecord>, train_per_class: usize, test_per_class: usize, seed: u64) -> Result<Dataset> {
    let mut by_class: [Vec<BeatRecord>; 4] = Default::default();
    for b in pool {
        by_class[b.label.index()].push(b);
    }
    let mut rng = seeded_rng(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, beats) in by_class.iter_mut().enumerate() {
        let need = train_per_class + test_per_class;
        if beats.len() < need {
            return Err(Error::InvalidInput(format!(
                "class {} has {} beats, split needs {need}",
                BeatClass::ALL[c].name(),
                beats.len()
            )));
        }
        beats.shuffle(&mut rng);
        let mut it = beats.drain(..need);
        train.extend(it.by_ref().take(train_per_class));
        test.extend(it);
    }
    Ok(Dataset::new(train, test, Some(seed)))
}

/// Writes the canonical beat CSV:
/// `label,source_id,beat_index,ch0_0..ch0_251,ch1_0..ch1_251`.
pub fn write_beats_csv(path: &Path, beats: &[BeatRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Csv(e))?;
    let mut header = vec!["label".to_string(), "source_id".into(), "beat_index".into()];
    for ch in 0..2 {
        header.extend((0..SEGMENT_LEN).map(|i| format!("ch{ch}_{i}")));
    }
    w.write_record(&header)?;
    for b in beats {
        let mut row = vec![b.label.index().to_string(), b.source_id.clone(), b.beat_index.to_string()];
        for ch in &b.samples {
            row.extend(ch.iter().map(|x| x.to_string()));
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_beats_csv(path: &Path) -> Result<Vec<BeatRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let expected = 3 + 2 * SEGMENT_LEN;
    let headers = r.headers()?.clone();
    if headers.len() != expected || &headers[0] != "label" {
        return Err(Error::Parse {
            offset: 0,
            message: format!("beat CSV needs {expected} columns starting with `label`"),
        });
    }
    let mut out = Vec::new();
    for (row_i, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Parse {
            offset: row_i + 1,
            message: format!("row {}: bad {what}", row_i + 1),
        };
        let label: usize = rec[0].parse().map_err(|_| bad("label"))?;
        let label = BeatClass::from_index(label).map_err(|_| bad("label"))?;
        let beat_index: u64 = rec[2].parse().map_err(|_| bad("beat_index"))?;
        let mut samples = [Vec::with_capacity(SEGMENT_LEN), Vec::with_capacity(SEGMENT_LEN)];
        for (ch, out) in samples.iter_mut().enumerate() {
            for i in 0..SEGMENT_LEN {
                out.push(rec[3 + ch * SEGMENT_LEN + i].parse::<f64>().map_err(|_| bad("sample"))?);
            }
        }
        out.push(BeatRecord::new(samples, label, &rec[1], beat_index)?);
    }
    Ok(out)
}
