//! Metrics, run reports, configuration and the experiment driver.

mod config;
mod experiment;
mod metrics;
mod run;

pub use config::{CodecConfig, Config, DataSource, DatasetConfig, MlpConfig, Seeds};
pub use experiment::{
    features_of, labels_of, load_dataset, program, run_experiment, run_test_stream, run_with_models, save_json,
    train_models, ExperimentOutput, TrainedModels,
};
pub use metrics::{f1_per_class, macro_f1_abnormal, ConfusionMatrix};
pub use run::{build_report, energy_summary, stream_confusions, ClassifierSummary, EnergySummary, RunReport};
