use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Config;
use super::metrics::{f1_per_class, macro_f1_abnormal, ConfusionMatrix};
use crate::datapipe::BeatClass;
use crate::energymodel::WakeRates;
use crate::memsim::{OperatingPoint, Regime};
use crate::wakectl::{wake_stats, StreamResult, WakeStats};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSummary {
    pub confusion: ConfusionMatrix,
    pub accuracy: Option<f64>,
    pub f1: [Option<f64>; 4],
    pub macro_f1: Option<f64>,
}

impl ClassifierSummary {
    pub fn from_matrix(confusion: ConfusionMatrix) -> Self {
        Self {
            accuracy: confusion.accuracy(),
            f1: std::array::from_fn(|c| f1_per_class(&confusion, c)),
            macro_f1: macro_f1_abnormal(&confusion),
            confusion,
        }
    }
}

/// Average energy per input at the run's operating point, using the wake
/// rates measured on the stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub vdd: f64,
    pub t_s: f64,
    pub p_wake_abn: f64,
    pub p_wake_n: f64,
    pub p_wake: f64,
    pub e_fe: f64,
    pub e_mon: f64,
    pub e_service_term: f64,
    pub e_avg: f64,
    pub e_baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: Config,
    pub config_digest: String,
    pub operating_point: OperatingPoint,
    pub beats: usize,
    pub backend_errors: usize,
    pub front_end: Option<ClassifierSummary>,
    pub system: Option<ClassifierSummary>,
    pub wake: Option<WakeStats>,
    pub energy: Option<EnergySummary>,
    pub partial: bool,
    pub missing: Vec<String>,
}

/// Front-end and system confusion matrices of a stream. A waked beat whose
/// back end failed keeps its local N label.
pub fn stream_confusions(stream: &StreamResult) -> (ConfusionMatrix, ConfusionMatrix) {
    let front = ConfusionMatrix::from_pairs(stream.traces.iter().map(|t| (t.true_label, t.front_pred)));
    let system = ConfusionMatrix::from_pairs(
        stream
            .traces
            .iter()
            .map(|t| (t.true_label, t.system_pred.unwrap_or(BeatClass::N))),
    );
    (front, system)
}

pub fn energy_summary(config: &Config, vdd: f64, wake: &WakeStats) -> Result<Option<EnergySummary>> {
    let (Some(abn), Some(n)) = (wake.p_wake_given_abnormal, wake.p_wake_given_normal) else {
        return Ok(None);
    };
    let params = &config.energy;
    let b = params.e_avg(vdd, &WakeRates::new(abn, n)?)?;
    Ok(Some(EnergySummary {
        vdd,
        t_s: params.t_s,
        p_wake_abn: abn,
        p_wake_n: n,
        p_wake: b.p_wake,
        e_fe: b.front_end,
        e_mon: b.monitoring,
        e_service_term: b.service,
        e_avg: b.total,
        e_baseline: params.e_baseline(vdd),
    }))
}

impl RunReport {
    /// Assembles a report from its parts; absent parts are listed in
    /// `missing` and mark the report partial.
    pub fn assemble(
        config: &Config,
        operating_point: OperatingPoint,
        front: Option<ConfusionMatrix>,
        system: Option<ConfusionMatrix>,
        wake: Option<WakeStats>,
        energy: Option<EnergySummary>,
        backend_errors: usize,
    ) -> Result<Self> {
        let beats = front.map_or(0, |cm| cm.total() as usize);
        let front_end = front.filter(|cm| cm.total() > 0).map(ClassifierSummary::from_matrix);
        let system = system.filter(|cm| cm.total() > 0).map(ClassifierSummary::from_matrix);
        let mut missing = Vec::new();
        if front_end.is_none() {
            missing.push("front_end".to_string());
        }
        if system.is_none() {
            missing.push("system".to_string());
        }
        if wake.is_none() {
            missing.push("wake".to_string());
        }
        if energy.is_none() {
            missing.push("energy".to_string());
        }
        Ok(Self {
            config: config.clone(),
            config_digest: config.digest()?,
            operating_point,
            beats,
            backend_errors,
            front_end,
            system,
            wake,
            energy,
            partial: !missing.is_empty(),
            missing,
        })
    }

    /// Pretty JSON with keys in alphabetical order.
    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let op = &self.operating_point;
        let _ = writeln!(s, "run {}  (config {})", op.label, &self.config_digest[..12.min(self.config_digest.len())]);
        let _ = writeln!(s, "vdd {:.3} V  vddr {:.3} V  ideal {}", op.vdd, op.vddr, self.config.ideal);
        let _ = writeln!(s, "beats {}  back-end errors {}", self.beats, self.backend_errors);
        if self.partial {
            let _ = writeln!(s, "PARTIAL: missing {}", self.missing.join(", "));
        }
        for (name, section) in [("front end", &self.front_end), ("system", &self.system)] {
            let Some(sec) = section else { continue };
            let _ = writeln!(s, "\n{name}: macro-F1 {}  accuracy {}", opt(sec.macro_f1, 4), opt(sec.accuracy, 4));
            let _ = writeln!(s, "  true\\pred        N        L        R        P       F1");
            for (r, row) in sec.confusion.counts.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "  {:<9} {:>8} {:>8} {:>8} {:>8} {:>8}",
                    BeatClass::ALL[r].name(),
                    row[0],
                    row[1],
                    row[2],
                    row[3],
                    opt(sec.f1[r], 4)
                );
            }
        }
        if let Some(w) = &self.wake {
            let _ = writeln!(s, "\nwake: P(wake|abnormal) {}  P(wake|normal) {}", opt(w.p_wake_given_abnormal, 4), opt(w.p_wake_given_normal, 4));
            for (name, f) in [("abnormal", &w.abnormal_by_reason), ("normal", &w.normal_by_reason)] {
                let _ = writeln!(
                    s,
                    "  {name:<8} by reason: abnormal {}  ambiguous {}  invalid {}",
                    opt(f.abnormal, 4),
                    opt(f.ambiguous, 4),
                    opt(f.invalid, 4)
                );
            }
        }
        if let Some(e) = &self.energy {
            let _ = writeln!(
                s,
                "\nenergy at {:.2} V, T_s {} s: e_avg {:.4e} J  baseline {:.4e} J  (x{:.1})",
                e.vdd,
                e.t_s,
                e.e_avg,
                e.e_baseline,
                e.e_baseline / e.e_avg
            );
            let _ = writeln!(s, "  p_wake {:.5}  e_fe {:.4e}  e_mon {:.4e}  service {:.4e}", e.p_wake, e.e_fe, e.e_mon, e.e_service_term);
        }
        s
    }
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.digits$}"))
}

/// Report for a completed stream at the given regime.
pub fn build_report(stream: Option<&StreamResult>, regime: &Regime, config: &Config) -> Result<RunReport> {
    let Some(stream) = stream.filter(|s| !s.is_empty()) else {
        return RunReport::assemble(config, regime.op.clone(), None, None, None, None, 0);
    };
    let (front, system) = stream_confusions(stream);
    let wake = wake_stats(stream);
    let energy = energy_summary(config, regime.op.vdd, &wake)?;
    RunReport::assemble(
        config,
        regime.op.clone(),
        Some(front),
        Some(system),
        Some(wake),
        energy,
        stream.backend_errors,
    )
}
