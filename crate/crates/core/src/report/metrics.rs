use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::datapipe::BeatClass;

const K: usize = BeatClass::COUNT;

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; K]; K],
}

impl ConfusionMatrix {
    pub fn from_pairs<I: IntoIterator<Item = (BeatClass, BeatClass)>>(pairs: I) -> Self {
        let mut cm = Self::default();
        for (t, p) in pairs {
            cm.add(t, p);
        }
        cm
    }

    pub fn add(&mut self, truth: BeatClass, predicted: BeatClass) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, c: usize) -> u64 {
        self.counts[c].iter().sum()
    }

    pub fn col_sum(&self, c: usize) -> u64 {
        self.counts.iter().map(|r| r[c]).sum()
    }

    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| (0..K).map(|c| self.counts[c][c]).sum::<u64>() as f64 / total as f64)
    }

    /// Row-stochastic view; empty rows stay `None`.
    pub fn normalized(&self) -> [Option<[f64; K]>; K] {
        std::array::from_fn(|r| {
            let n = self.row_sum(r);
            (n > 0).then(|| std::array::from_fn(|c| self.counts[r][c] as f64 / n as f64))
        })
    }
}

/// F1 of one class. `None` when the class appears in neither the truth nor
/// the predictions; 0 when precision and recall are both zero.
pub fn f1_per_class<T: Float>(cm: &ConfusionMatrix, c: usize) -> Option<T> {
    let tp = cm.counts[c][c];
    let fp = cm.col_sum(c) - tp;
    let fn_ = cm.row_sum(c) - tp;
    if tp + fp + fn_ == 0 {
        return None;
    }
    if tp == 0 {
        return Some(T::zero());
    }
    let precision = T::from(tp)? / T::from(tp + fp)?;
    let recall = T::from(tp)? / T::from(tp + fn_)?;
    let two = T::one() + T::one();
    Some(two * precision * recall / (precision + recall))
}

/// Unweighted mean F1 over L, R and P; undefined if any of them is.
pub fn macro_f1_abnormal<T: Float>(cm: &ConfusionMatrix) -> Option<T> {
    let mut sum = T::zero();
    for c in 1..K {
        sum = sum + f1_per_class::<T>(cm, c)?;
    }
    Some(sum / T::from(K - 1)?)
}
