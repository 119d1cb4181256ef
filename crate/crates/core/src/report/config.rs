use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bayesfront::{LogCodec, DEFAULT_KERNEL_SIGMA};
use crate::memsim::OperatingConfig;
use crate::mlpback::TrainConfig;
use crate::wakectl::WakePolicy;
use crate::{EnergyParams, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Synthetic,
    Csv,
    Wfdb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub source: DataSource,
    /// Beat CSV file or WFDB directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Synthetic source only.
    pub noise_sigma: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            source: DataSource::Synthetic,
            path: None,
            train_per_class: 800,
            test_per_class: 800,
            noise_sigma: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodecConfig {
    #[serde(rename = "B")]
    pub base: f64,
    pub m: u32,
    pub kernel_sigma: f64,
}

impl Default for CodecConfig {
    fn default() -> Self {
        let c = LogCodec::<f64>::default();
        Self {
            base: c.base,
            m: c.scale,
            kernel_sigma: DEFAULT_KERNEL_SIGMA,
        }
    }
}

impl CodecConfig {
    pub fn codec(&self) -> Result<LogCodec<f64>> {
        LogCodec::new(self.base, self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub data: u64,
    pub program: u64,
    pub read: u64,
    pub mlp: u64,
}

impl Seeds {
    /// Distinct per-stage seeds derived from one run seed.
    pub fn from_base(seed: u64) -> Self {
        Self {
            data: seed,
            program: seed.wrapping_add(1),
            read: seed.wrapping_add(2),
            mlp: seed.wrapping_add(3),
        }
    }
}

impl Default for Seeds {
    fn default() -> Self {
        Self::from_base(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            lr: t.lr,
            epochs: t.epochs,
            batch: t.batch,
        }
    }
}

impl MlpConfig {
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            lr: self.lr,
            epochs: self.epochs,
            batch: self.batch,
            seed,
        }
    }
}

/// Whole-experiment configuration, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Read the front end from its ideal words instead of the arrays.
    pub ideal: bool,
    pub dataset: DatasetConfig,
    pub codec: CodecConfig,
    pub operating_point: OperatingConfig,
    pub policy: WakePolicy,
    pub energy: EnergyParams,
    pub seeds: Seeds,
    pub mlp: MlpConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            ideal: false,
            dataset: DatasetConfig::default(),
            codec: CodecConfig::default(),
            operating_point: OperatingConfig::preset("A"),
            policy: WakePolicy::default(),
            energy: EnergyParams::default(),
            seeds: Seeds::default(),
            mlp: MlpConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().replace('\n', " ")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.codec.codec().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.codec.kernel_sigma >= 0.0) {
            return Err(Error::Config("kernel_sigma must be non-negative".into()));
        }
        self.operating_point.resolve()?;
        self.energy.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.mlp.batch == 0 || !(self.mlp.lr > 0.0) {
            return Err(Error::Config("mlp batch must be positive and lr > 0".into()));
        }
        if self.dataset.source != DataSource::Synthetic && self.dataset.path.is_none() {
            return Err(Error::Config("dataset.path is required for csv and wfdb sources".into()));
        }
        Ok(())
    }

    /// Canonical JSON with sorted keys.
    pub fn canonical_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string(&value)?)
    }

    /// Hex sha256 of the canonical JSON.
    pub fn digest(&self) -> Result<String> {
        let hash = Sha256::digest(self.canonical_json()?.as_bytes());
        Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
    }
}
