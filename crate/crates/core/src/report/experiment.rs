use std::path::Path;

use super::config::{Config, DataSource};
use crate::bayesfront::{fit_bayes_model, BayesModel, IdealReader};
use crate::datapipe::{
    balanced_split, chi2_rank, fft_features, ingest_wfdb_dir, read_beats_csv, synth_dataset, BeatRecord, Dataset,
    FeatureVector, RankedBin, SynthParams,
};
use crate::memsim::{program_arrays, ArrayState, MemristorReader, Regime};
use crate::mlpback::{quantize_mlp, train_mlp, InputQuantizer, MlpBackendModel, TrainingCurve, MLP_DIMS};
use crate::wakectl::{run_stream, BackendClassifier, StreamResult};
use crate::{Error, Result};

/// Builds the train/test split named by the dataset section.
pub fn load_dataset(config: &Config) -> Result<Dataset> {
    let d = &config.dataset;
    let seed = config.seeds.data;
    match d.source {
        DataSource::Synthetic => Ok(synth_dataset(&SynthParams {
            seed,
            train_per_class: d.train_per_class,
            test_per_class: d.test_per_class,
            noise_sigma: d.noise_sigma,
        })),
        DataSource::Csv => {
            let path = d.path.as_deref().ok_or_else(|| Error::Config("dataset.path missing".into()))?;
            balanced_split(read_beats_csv(path)?, d.train_per_class, d.test_per_class, seed)
        }
        DataSource::Wfdb => {
            let path = d.path.as_deref().ok_or_else(|| Error::Config("dataset.path missing".into()))?;
            let (pool, _) = ingest_wfdb_dir(path)?;
            balanced_split(pool, d.train_per_class, d.test_per_class, seed)
        }
    }
}

pub fn features_of(beats: &[BeatRecord]) -> Vec<FeatureVector> {
    beats.iter().map(fft_features).collect()
}

pub fn labels_of(beats: &[BeatRecord]) -> Vec<usize> {
    beats.iter().map(|b| b.label.index()).collect()
}

/// Both classifiers fitted on one training set.
#[derive(Debug, Clone)]
pub struct TrainedModels {
    pub ranked: Vec<RankedBin>,
    pub bayes: BayesModel,
    pub backend: MlpBackendModel,
    pub curve: TrainingCurve,
}

pub fn train_models(features: &[FeatureVector], labels: &[usize], config: &Config) -> Result<TrainedModels> {
    let ranked = chi2_rank(features, labels)?;
    let bayes = fit_bayes_model(features, labels, &ranked, config.codec.codec()?, config.codec.kernel_sigma)?;
    let input = InputQuantizer::fit(features, &ranked)?;
    let xs: Vec<Vec<f64>> = features.iter().map(|f| InputQuantizer::to_float(&input.quantize(f))).collect();
    let (float, curve) = train_mlp(&xs, labels, &MLP_DIMS, &config.mlp.train_config(config.seeds.mlp))?;
    let model = quantize_mlp(&float, &xs)?;
    Ok(TrainedModels {
        ranked,
        bayes,
        backend: MlpBackendModel { input, model },
        curve,
    })
}

pub fn program(bayes: &BayesModel, regime: &Regime, seed: u64) -> Result<ArrayState> {
    program_arrays(&bayes.codes, &regime.devices, regime.op.vddr, seed)
}

/// Streams the test beats through the ideal words or the programmed
/// arrays at the regime's inference supply.
pub fn run_test_stream<B: BackendClassifier + ?Sized>(
    beats: &[BeatRecord],
    features: &[FeatureVector],
    bayes: &BayesModel,
    arrays: Option<(&ArrayState, &Regime)>,
    backend: &mut B,
    config: &Config,
) -> Result<StreamResult> {
    match arrays {
        None => run_stream(beats, features, bayes, &mut IdealReader::new(bayes), backend, &config.policy),
        Some((state, regime)) => {
            if state.stored != bayes.codes {
                return Err(Error::InvalidInput("array state was programmed from a different model".into()));
            }
            let mut reader = MemristorReader::new(state, &regime.op, &regime.read_model, config.seeds.read);
            run_stream(beats, features, bayes, &mut reader, backend, &config.policy)
        }
    }
}

/// Everything one end-to-end run produces.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub dataset: Dataset,
    pub models: TrainedModels,
    pub regime: Regime,
    pub arrays: Option<ArrayState>,
    pub stream: StreamResult,
    pub report: super::RunReport,
}

/// Data, training, programming and the test stream, all from `config`.
pub fn run_experiment(config: &Config) -> Result<ExperimentOutput> {
    config.validate()?;
    let dataset = load_dataset(config)?;
    let train_features = features_of(&dataset.train);
    let models = train_models(&train_features, &labels_of(&dataset.train), config)?;
    run_with_models(config, dataset, models)
}

/// As `run_experiment`, reusing already trained models.
pub fn run_with_models(config: &Config, dataset: Dataset, models: TrainedModels) -> Result<ExperimentOutput> {
    let regime = config.operating_point.resolve()?;
    let arrays = if config.ideal {
        None
    } else {
        Some(program(&models.bayes, &regime, config.seeds.program)?)
    };
    let test_features = features_of(&dataset.test);
    let mut backend = models.backend.clone();
    let stream = run_test_stream(
        &dataset.test,
        &test_features,
        &models.bayes,
        arrays.as_ref().map(|a| (a, &regime)),
        &mut backend,
        config,
    )?;
    let report = super::build_report(Some(&stream), &regime, config)?;
    Ok(ExperimentOutput {
        dataset,
        models,
        regime,
        arrays,
        stream,
        report,
    })
}

pub fn save_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
