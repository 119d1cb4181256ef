use serde::{Deserialize, Serialize};

use crate::bayesfront::ClassScores;
use crate::datapipe::BeatClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WakeReason {
    None,
    Abnormal,
    Ambiguous,
    Invalid,
}

impl WakeReason {
    pub const ALL: [WakeReason; 4] = [WakeReason::None, WakeReason::Abnormal, WakeReason::Ambiguous, WakeReason::Invalid];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            WakeReason::None => "none",
            WakeReason::Abnormal => "abnormal",
            WakeReason::Ambiguous => "ambiguous",
            WakeReason::Invalid => "invalid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WakeDecision {
    pub wake: bool,
    pub reason: WakeReason,
    pub front_pred: BeatClass,
}

/// Which uncertainty signals escalate. An explicit abnormal prediction
/// always wakes the back end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WakePolicy {
    pub wake_on_tie: bool,
    pub wake_on_invalid: bool,
}

impl Default for WakePolicy {
    fn default() -> Self {
        Self {
            wake_on_tie: true,
            wake_on_invalid: true,
        }
    }
}

/// Wake if the front end is invalid, predicts an abnormal class, or ties N
/// with an abnormal class, reported in that priority order. A sleeping
/// beat is finalized locally as N.
pub fn decide_wake(scores: &ClassScores, policy: &WakePolicy) -> WakeDecision {
    let reason = if scores.invalid && policy.wake_on_invalid {
        WakeReason::Invalid
    } else if scores.predicted.is_abnormal() {
        WakeReason::Abnormal
    } else if scores.tie_with_normal && policy.wake_on_tie {
        WakeReason::Ambiguous
    } else {
        WakeReason::None
    };
    WakeDecision {
        wake: reason != WakeReason::None,
        reason,
        front_pred: scores.predicted,
    }
}
