//! Beat ingestion and feature extraction.
//!
//! Records come from WFDB files (format-212 signals plus MIT annotations),
//! the canonical beat CSV, or the seeded synthetic generator. Each beat is a
//! 700 ms two-channel window at 360 Hz; features are length-normalized FFT
//! magnitudes ranked by a chi-square statistic.

mod annotations;
mod beat;
mod chi2;
mod dataset;
mod features;
mod quantizer;
mod synth;
mod wfdb;

pub use annotations::{read_annotations, Annotation};
pub use beat::{segment_beat, BeatClass, BeatRecord, HALF_WINDOW, SAMPLE_RATE_HZ, SEGMENT_LEN};
pub use chi2::{chi2_rank, chi2_statistic, RankedBin, CHI2_CELLS};
pub use dataset::{
    balanced_split, read_beats_csv, write_beats_csv, Dataset, IngestionReport, Manifest,
};
pub use features::{fft_features, read_feature_cache, write_feature_cache, FeatureVector, BINS_PER_CHANNEL, FEATURE_LEN};
pub use quantizer::{fit_quantizer, percentile, quantize, QuantizerSpec};
pub use synth::{synth_dataset, SynthParams};
pub use wfdb::{decode_wfdb212, ingest_wfdb_dir, load_record, parse_header, SignalSpec, WfdbHeader, WfdbRecord};
