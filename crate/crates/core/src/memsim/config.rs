use serde::{Deserialize, Serialize};

use super::device::{DeviceDistributions, OperatingPoint};
use super::presets::{default_devices, default_read_model, regime_preset, Regime};
use super::read::ReadErrorModel;
use crate::interp::Curve;
use crate::Result;

/// Operating-point section of a config file. A preset supplies defaults;
/// any explicit field overrides it. Without a preset, the shipped device
/// and noise calibration is used for fields left out.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vdd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vddr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub devices: Option<DeviceDistributions>,
    /// `(vdd, sigma_n)` pairs, linearly interpolated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_n: Option<Curve<f64>>,
}

impl OperatingConfig {
    pub fn preset(name: &str) -> Self {
        Self {
            preset: Some(name.to_string()),
            ..Self::default()
        }
    }

    pub fn resolve(&self) -> Result<Regime> {
        let mut regime = match &self.preset {
            Some(name) => regime_preset(name)?,
            None => Regime {
                op: OperatingPoint::new(1.2, 2.4, "custom")?,
                devices: default_devices(),
                read_model: default_read_model(),
            },
        };
        if let Some(v) = self.vdd {
            regime.op.vdd = v;
        }
        if let Some(v) = self.vddr {
            regime.op.vddr = v;
        }
        if self.preset.is_some() && (self.vdd.is_some() || self.vddr.is_some()) {
            regime.op.label = format!("{}*", regime.op.label);
        }
        if let Some(d) = &self.devices {
            regime.devices = d.clone();
        }
        if let Some(s) = &self.sigma_n {
            regime.read_model = ReadErrorModel { sigma_n: s.clone() };
        }
        regime.validate()?;
        Ok(regime)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_with_override() {
        let c = OperatingConfig {
            vdd: Some(0.9),
            ..OperatingConfig::preset("A")
        };
        let r = c.resolve().unwrap();
        assert_eq!(r.op.vdd, 0.9);
        assert_eq!(r.op.vddr, 2.4);
        assert_eq!(r.op.label, "A*");
    }

    #[test]
    fn explicit_tables_parse() {
        let text = r#"
            vdd = 1.0
            vddr = 2.0
            sigma_n = [[0.7, 1.0], [1.2, 0.1]]
        "#;
        let c: OperatingConfig = toml::from_str(text).unwrap();
        let r = c.resolve().unwrap();
        assert!((r.read_model.sigma_at(0.95) - 0.55).abs() < 1e-12);
        assert!(toml::from_str::<OperatingConfig>("vdd = 1.0\nbogus = 1").is_err());
        let bad = OperatingConfig { vdd: Some(2.0), ..Default::default() };
        assert!(bad.resolve().is_err());
    }
}
