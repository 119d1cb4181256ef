use crate::datapipe::{BeatClass, BeatRecord, FeatureVector};
use crate::mlpback::{mlp_infer, MlpBackendModel};

/// Classifier invoked on a waked beat.
pub trait BackendClassifier {
    fn classify(&mut self, beat: &BeatRecord, features: &FeatureVector) -> Result<BeatClass, String>;
}

impl BackendClassifier for MlpBackendModel {
    fn classify(&mut self, _beat: &BeatRecord, features: &FeatureVector) -> Result<BeatClass, String> {
        let input = self.input.quantize(features);
        let out = mlp_infer(&input, &self.model);
        BeatClass::from_index(out.class).map_err(|e| e.to_string())
    }
}

/// Returns the true label; the upper bound on back-end recovery.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleBackend;

impl BackendClassifier for OracleBackend {
    fn classify(&mut self, beat: &BeatRecord, _features: &FeatureVector) -> Result<BeatClass, String> {
        Ok(beat.label)
    }
}

impl<F> BackendClassifier for F
where
    F: FnMut(&BeatRecord, &FeatureVector) -> Result<BeatClass, String>,
{
    fn classify(&mut self, beat: &BeatRecord, features: &FeatureVector) -> Result<BeatClass, String> {
        self(beat, features)
    }
}
