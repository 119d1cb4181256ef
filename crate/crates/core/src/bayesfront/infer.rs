use super::model::{BayesModel, N_FEATURES, N_LEVELS};
use crate::datapipe::BeatClass;

/// Location of one stored word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WordAddress {
    pub class: usize,
    pub feature: usize,
    pub level: usize,
}

impl WordAddress {
    pub fn flat(&self) -> usize {
        (self.class * N_FEATURES + self.feature) * N_LEVELS + self.level
    }

    pub fn from_flat(i: usize) -> Self {
        Self {
            class: i / (N_FEATURES * N_LEVELS),
            feature: (i / N_LEVELS) % N_FEATURES,
            level: i % N_LEVELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("word read failed at {address:?}: {reason}")]
pub struct ReadFault {
    pub address: WordAddress,
    pub reason: String,
}

/// Source of stored likelihood words.
pub trait WordReader {
    fn read_word(&mut self, addr: WordAddress) -> Result<u8, ReadFault>;

    /// Called once before the reads of each streamed input.
    fn begin_input(&mut self, _input_index: u64) {}
}

/// Returns the model's codes unchanged.
#[derive(Debug, Clone, Copy)]
pub struct IdealReader<'a> {
    pub model: &'a BayesModel,
}

impl<'a> IdealReader<'a> {
    pub fn new(model: &'a BayesModel) -> Self {
        Self { model }
    }
}

impl WordReader for IdealReader<'_> {
    fn read_word(&mut self, addr: WordAddress) -> Result<u8, ReadFault> {
        Ok(self.model.code(addr))
    }
}

/// Accumulated class scores and the flags the wake policy needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassScores {
    pub scores: [u16; BeatClass::COUNT],
    /// Lowest-index class attaining the minimum score.
    pub predicted: BeatClass,
    /// N attains the minimum together with at least one abnormal class.
    pub tie_with_normal: bool,
    pub invalid: bool,
}

impl ClassScores {
    pub fn from_scores(scores: [u16; BeatClass::COUNT], invalid_threshold: u16) -> Self {
        let min = *scores.iter().min().expect("four classes");
        let predicted = BeatClass::ALL[scores.iter().position(|&s| s == min).expect("min exists")];
        let tie_with_normal = scores[0] == min && scores[1..].iter().any(|&s| s == min);
        Self {
            scores,
            predicted,
            tie_with_normal,
            invalid: min >= invalid_threshold,
        }
    }

    pub fn min_score(&self) -> u16 {
        *self.scores.iter().min().expect("four classes")
    }
}

/// Sums one word per feature for every class and picks the argmin.
///
/// A failed read counts as the all-ones word and forces `invalid`.
pub fn bayes_infer<R: WordReader + ?Sized>(levels: &[usize; N_FEATURES], model: &BayesModel, reader: &mut R) -> ClassScores {
    let mut scores = [0u16; BeatClass::COUNT];
    let mut fault = false;
    for (class, score) in scores.iter_mut().enumerate() {
        for (feature, &level) in levels.iter().enumerate() {
            let addr = WordAddress { class, feature, level };
            *score += match reader.read_word(addr) {
                Ok(w) => w as u16,
                Err(_) => {
                    fault = true;
                    u8::MAX as u16
                }
            };
        }
    }
    let mut out = ClassScores::from_scores(scores, model.invalid_threshold());
    out.invalid |= fault;
    out
}
