//! Uncertainty-triggered wake-up and the beat-stream runner.
//!
//! The front end finalizes a beat as normal only when N is the unique
//! minimum and the scores are valid. Everything else escalates to the
//! back end, whose label is final.

mod backend;
mod policy;
mod stream;

pub use backend::{BackendClassifier, OracleBackend};
pub use policy::{decide_wake, WakeDecision, WakePolicy, WakeReason};
pub use stream::{run_stream, wake_stats, BeatTrace, ClassWakeCounts, ReasonFractions, StreamResult, WakeStats};
