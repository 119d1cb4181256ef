//! WFDB record reading: `.hea` text headers and format-212 `.dat` signals.

use std::fs;
use std::path::Path;

use super::annotations::{read_annotations, Annotation};
use super::beat::{segment_beat, BeatClass, BeatRecord};
use super::dataset::IngestionReport;
use crate::{Error, Result};

/// Unpacks format-212 data: each 3-byte frame carries two 12-bit
/// two's-complement samples, interleaved across channels.
///
/// Returns one vector per channel.
pub fn decode_wfdb212(bytes: &[u8], n_channels: usize, n_samples: usize) -> Result<Vec<Vec<i16>>> {
    if n_channels == 0 {
        return Err(Error::Parse {
            offset: 0,
            message: "header declares zero channels".into(),
        });
    }
    let whole = bytes.len() / 3 * 3;
    if whole != bytes.len() {
        return Err(Error::Parse {
            offset: whole,
            message: format!("truncated frame: {} trailing byte(s)", bytes.len() - whole),
        });
    }
    let total = n_channels * n_samples;
    let decoded = bytes.len() / 3 * 2;
    if decoded != total {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("sample count mismatch: stream holds {decoded}, header expects {total}"),
        });
    }
    let mut out = vec![Vec::with_capacity(n_samples); n_channels];
    for (f, frame) in bytes.chunks_exact(3).enumerate() {
        let (b0, b1, b2) = (frame[0] as u16, frame[1] as u16, frame[2] as u16);
        let s1 = ((b1 & 0x0F) << 8) | b0;
        let s2 = ((b1 & 0xF0) << 4) | b2;
        out[(2 * f) % n_channels].push(sign_extend12(s1));
        out[(2 * f + 1) % n_channels].push(sign_extend12(s2));
    }
    Ok(out)
}

fn sign_extend12(v: u16) -> i16 {
    ((v << 4) as i16) >> 4
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub file_name: String,
    pub format: u32,
    /// ADC units per physical unit; 200 when the header leaves it at 0.
    pub gain: f64,
    pub baseline: i32,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WfdbHeader {
    pub record_name: String,
    pub n_channels: usize,
    pub sample_rate: f64,
    pub n_samples: usize,
    pub signals: Vec<SignalSpec>,
}

fn header_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset: line,
        message: format!("header line {line}: {}", message.into()),
    }
}

/// Parses a `.hea` file. Only single-segment records are supported.
pub fn parse_header(text: &str) -> Result<WfdbHeader> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, record_line) = lines.next().ok_or_else(|| header_err(0, "empty header"))?;
    let fields: Vec<&str> = record_line.split_whitespace().collect();
    if fields.len() < 2 {
        return Err(header_err(ln, "record line needs name and channel count"));
    }
    let record_name = fields[0].to_string();
    if record_name.contains('/') {
        return Err(header_err(ln, "multi-segment records are not supported"));
    }
    let n_channels: usize = fields[1].parse().map_err(|_| header_err(ln, "bad channel count"))?;
    let sample_rate: f64 = match fields.get(2) {
        Some(f) => f
            .split(['/', '('])
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|_| header_err(ln, "bad sampling frequency"))?,
        None => 250.0,
    };
    let n_samples: usize = match fields.get(3) {
        Some(f) => f.parse().map_err(|_| header_err(ln, "bad sample count"))?,
        None => 0,
    };

    let mut signals = Vec::with_capacity(n_channels);
    for _ in 0..n_channels {
        let (ln, line) = lines.next().ok_or_else(|| header_err(ln, "missing signal line"))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 2 {
            return Err(header_err(ln, "signal line needs file name and format"));
        }
        let format: u32 = f[1]
            .split(['x', ':', '+'])
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|_| header_err(ln, "bad format"))?;
        let (mut gain, explicit_baseline) = match f.get(2) {
            Some(spec) => parse_gain(spec).ok_or_else(|| header_err(ln, "bad gain"))?,
            None => (200.0, None),
        };
        if gain == 0.0 {
            gain = 200.0;
        }
        let adc_zero: i32 = match f.get(4) {
            Some(z) => z.parse().map_err(|_| header_err(ln, "bad ADC zero"))?,
            None => 0,
        };
        signals.push(SignalSpec {
            file_name: f[0].to_string(),
            format,
            gain,
            baseline: explicit_baseline.unwrap_or(adc_zero),
            description: f.get(8..).map(|d| d.join(" ")).unwrap_or_default(),
        });
    }
    Ok(WfdbHeader {
        record_name,
        n_channels,
        sample_rate,
        n_samples,
        signals,
    })
}

/// `200`, `200(0)`, `200/mV` or `200(0)/mV`.
fn parse_gain(spec: &str) -> Option<(f64, Option<i32>)> {
    let spec = spec.split('/').next()?;
    match spec.split_once('(') {
        Some((g, rest)) => {
            let b = rest.strip_suffix(')')?;
            Some((g.parse().ok()?, Some(b.parse().ok()?)))
        }
        None => Some((spec.parse().ok()?, None)),
    }
}

/// A loaded record in physical units plus its retained beat annotations.
#[derive(Debug, Clone)]
pub struct WfdbRecord {
    pub header: WfdbHeader,
    pub signals: Vec<Vec<f64>>,
    pub annotations: Vec<Annotation>,
}

impl WfdbRecord {
    /// Segments every retained annotation; returns beats and the skip count.
    pub fn beats(&self) -> (Vec<BeatRecord>, usize) {
        let mut beats = Vec::new();
        let mut skipped = 0;
        for (i, ann) in self.annotations.iter().enumerate() {
            let class: BeatClass = ann.class;
            match segment_beat(&self.signals, ann.time as usize, class, &self.header.record_name, i as u64) {
                Some(b) => beats.push(b),
                None => skipped += 1,
            }
        }
        (beats, skipped)
    }
}

/// Loads `<dir>/<name>.hea`, its format-212 data file and `<name>.atr`.
pub fn load_record(dir: &Path, name: &str) -> Result<WfdbRecord> {
    let hea_path = dir.join(format!("{name}.hea"));
    let text = fs::read_to_string(&hea_path).map_err(|e| Error::io(&hea_path, e))?;
    let header = parse_header(&text)?;
    if header.n_channels < 2 {
        return Err(Error::InvalidInput(format!("record {name} has fewer than two channels")));
    }
    let first = &header.signals[0];
    if header.signals.iter().any(|s| s.format != 212 || s.file_name != first.file_name) {
        return Err(Error::InvalidInput(format!(
            "record {name}: only a single shared format-212 data file is supported"
        )));
    }
    let dat_path = dir.join(&first.file_name);
    let bytes = fs::read(&dat_path).map_err(|e| Error::io(&dat_path, e))?;
    let raw = decode_wfdb212(&bytes, header.n_channels, header.n_samples)?;
    let signals = raw
        .iter()
        .zip(&header.signals)
        .map(|(ch, spec)| ch.iter().map(|&d| (d as i32 - spec.baseline) as f64 / spec.gain).collect())
        .collect();
    let atr_path = dir.join(format!("{name}.atr"));
    let atr = fs::read(&atr_path).map_err(|e| Error::io(&atr_path, e))?;
    let annotations = read_annotations(&atr)?;
    Ok(WfdbRecord {
        header,
        signals,
        annotations,
    })
}

/// Loads every record in `dir` that has `.hea`, `.dat` and `.atr` files and
/// at least one retained beat annotation. Records are visited in name order.
pub fn ingest_wfdb_dir(dir: &Path) -> Result<(Vec<BeatRecord>, IngestionReport)> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension()? == "hea").then(|| p.file_stem()?.to_str().map(str::to_string))?
        })
        .filter(|n| dir.join(format!("{n}.atr")).exists())
        .collect();
    names.sort();
    let mut report = IngestionReport::default();
    let mut pool = Vec::new();
    for name in names {
        let record = load_record(dir, &name)?;
        if record.annotations.is_empty() {
            continue;
        }
        let (beats, skipped) = record.beats();
        report.records += 1;
        report.skipped += skipped;
        for b in &beats {
            report.beats_per_class[b.label.index()] += 1;
        }
        pool.extend(beats);
    }
    Ok((pool, report))
}
