use serde::{Deserialize, Serialize};

use super::device::{DeviceDistributions, OperatingPoint};
use super::read::ReadErrorModel;
use crate::interp::Curve;
use crate::{Error, Result};

/// A complete read/program condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub op: OperatingPoint,
    pub devices: DeviceDistributions,
    pub read_model: ReadErrorModel,
}

impl Regime {
    pub fn validate(&self) -> Result<()> {
        self.op.validate()?;
        self.devices.validate()
    }
}

// Non-physical calibration constants. They reproduce the regime behavior
// (nominal, narrowed window, low-supply sensing) on the synthetic benchmark.
const HRS_LOG10_MEAN: f64 = 5.0;
const HRS_LOG10_SIGMA: f64 = 0.05;
const LRS_LOG10_MEAN: [(f64, f64); 5] = [(1.0, 4.99), (1.5, 4.96), (2.0, 4.1), (2.4, 3.7), (3.0, 3.5)];
const LRS_LOG10_SIGMA: [(f64, f64); 3] = [(1.0, 0.05), (2.4, 0.05), (3.0, 0.05)];
const SIGMA_N: [(f64, f64); 8] = [
    (0.5, 8.0),
    (0.7, 6.0),
    (0.8, 4.3),
    (0.9, 0.6),
    (1.0, 0.35),
    (1.1, 0.2),
    (1.2, 0.15),
    (1.4, 0.12),
];

pub(crate) fn default_devices() -> DeviceDistributions {
    DeviceDistributions {
        lrs_log10_mean: Curve::new(LRS_LOG10_MEAN.to_vec()).expect("sorted knots"),
        lrs_log10_sigma: Curve::new(LRS_LOG10_SIGMA.to_vec()).expect("sorted knots"),
        hrs_log10_mean: HRS_LOG10_MEAN,
        hrs_log10_sigma: HRS_LOG10_SIGMA,
    }
}

pub(crate) fn default_read_model() -> ReadErrorModel {
    ReadErrorModel {
        sigma_n: Curve::new(SIGMA_N.to_vec()).expect("sorted knots"),
    }
}

/// Shipped regimes: `A` nominal (1.2 V, 2.4 V), `B` narrowed window
/// (1.2 V, 1.5 V), `C` low inference supply (0.8 V, 2.4 V).
pub fn regime_preset(name: &str) -> Result<Regime> {
    let (vdd, vddr) = match name {
        "A" => (1.2, 2.4),
        "B" => (1.2, 1.5),
        "C" => (0.8, 2.4),
        other => return Err(Error::Config(format!("unknown regime preset '{other}' (expected A, B or C)"))),
    };
    Ok(Regime {
        op: OperatingPoint::new(vdd, vddr, name)?,
        devices: default_devices(),
        read_model: default_read_model(),
    })
}
