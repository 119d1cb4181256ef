use serde::{Deserialize, Serialize};

use super::features::FeatureVector;
use crate::{Error, Result};

/// Equal-width cells per bin for the magnitude-by-class contingency table.
pub const CHI2_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedBin {
    pub bin: usize,
    pub score: f64,
}

/// Pearson chi-square of a contingency table (`table[row][class]`).
/// Empty rows and empty columns contribute nothing.
pub fn chi2_statistic(table: &[Vec<u64>]) -> f64 {
    let n_cols = table.first().map_or(0, Vec::len);
    let row_tot: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_tot: Vec<u64> = (0..n_cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let total: u64 = row_tot.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let mut chi2 = 0.0;
    for (row, &rt) in table.iter().zip(&row_tot) {
        if rt == 0 {
            continue;
        }
        for (&obs, &ct) in row.iter().zip(&col_tot) {
            if ct == 0 {
                continue;
            }
            let expected = rt as f64 * ct as f64 / total as f64;
            let d = obs as f64 - expected;
            chi2 += d * d / expected;
        }
    }
    chi2
}

/// Scores are compared at 1e-6 resolution so that tables which are equal up
/// to cell relabeling tie exactly.
pub(crate) fn score_key(score: f64) -> i64 {
    (score * 1e6).round() as i64
}

pub(crate) fn n_classes(labels: &[usize]) -> Result<usize> {
    let n = labels.iter().max().map_or(0, |&m| m + 1);
    let mut present = vec![false; n];
    for &l in labels {
        present[l] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::InvalidInput("chi-square ranking needs at least two classes".into()));
    }
    Ok(n)
}

/// Ranks every feature bin by chi-square, descending; ties go to the lower
/// bin index. A bin that is constant over all samples scores 0.
pub fn chi2_rank(features: &[FeatureVector], labels: &[usize]) -> Result<Vec<RankedBin>> {
    if features.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let n_cls = n_classes(labels)?;
    let n_bins = features[0].mags.len();
    let mut ranked: Vec<RankedBin> = (0..n_bins)
        .map(|bin| {
            let values: Vec<f64> = features.iter().map(|f| f.mags[bin]).collect();
            RankedBin {
                bin,
                score: bin_score(&values, labels, n_cls),
            }
        })
        .collect();
    ranked.sort_by(|a, b| score_key(b.score).cmp(&score_key(a.score)).then(a.bin.cmp(&b.bin)));
    Ok(ranked)
}

fn bin_score(values: &[f64], labels: &[usize], n_cls: usize) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(hi > lo) {
        return 0.0;
    }
    let mut table = vec![vec![0u64; n_cls]; CHI2_CELLS];
    let width = hi - lo;
    for (&v, &l) in values.iter().zip(labels) {
        let cell = (((v - lo) / width) * CHI2_CELLS as f64).floor() as usize;
        table[cell.min(CHI2_CELLS - 1)][l] += 1;
    }
    chi2_statistic(&table)
}
