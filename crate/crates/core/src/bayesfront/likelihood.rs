use crate::{Error, Result};

/// Kernel width in quantization levels.
pub const DEFAULT_KERNEL_SIGMA: f64 = 1.0;

/// `probs[class][feature][level]`, each `[feature]` row summing to one.
pub type Likelihoods = Vec<Vec<Vec<f64>>>;

/// Per-class, per-feature level histograms smoothed with a Gaussian kernel
/// `exp(-(l - j)^2 / (2 sigma^2))` and normalized.
pub fn fit_likelihoods(
    levels: &[Vec<usize>],
    labels: &[usize],
    n_classes: usize,
    n_levels: usize,
    sigma: f64,
) -> Result<Likelihoods> {
    if levels.len() != labels.len() {
        return Err(Error::InvalidInput("one label per level vector required".into()));
    }
    let n_features = levels.first().map_or(0, Vec::len);
    let mut counts = vec![vec![vec![0u64; n_levels]; n_features]; n_classes];
    for (lv, &c) in levels.iter().zip(labels) {
        if c >= n_classes || lv.len() != n_features {
            return Err(Error::InvalidInput(format!("bad sample: class {c}, {} features", lv.len())));
        }
        for (f, &l) in lv.iter().enumerate() {
            if l >= n_levels {
                return Err(Error::InvalidInput(format!("level {l} outside 0..{n_levels}")));
            }
            counts[c][f][l] += 1;
        }
    }
    let kernel: Vec<f64> = (0..n_levels)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    counts
        .iter()
        .enumerate()
        .map(|(c, per_feature)| {
            if n_features > 0 && per_feature[0].iter().sum::<u64>() == 0 {
                return Err(Error::EmptyClass(c));
            }
            Ok(per_feature
                .iter()
                .map(|hist| {
                    let smoothed: Vec<f64> = (0..n_levels)
                        .map(|l| {
                            hist.iter()
                                .enumerate()
                                .map(|(j, &n)| n as f64 * kernel[l.abs_diff(j)])
                                .sum()
                        })
                        .collect();
                    let z: f64 = smoothed.iter().sum();
                    smoothed.iter().map(|s| s / z).collect()
                })
                .collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level_mass_spreads_by_kernel() {
        let levels = vec![vec![3usize]; 10];
        let labels = vec![0usize; 10];
        let p = fit_likelihoods(&levels, &labels, 1, 8, 1.0).unwrap();
        let row = &p[0][0];
        let z: f64 = (0..8).map(|l: i32| (-((l - 3) * (l - 3)) as f64 / 2.0).exp()).sum();
        assert!((row[3] - 1.0 / z).abs() < 1e-15);
        assert!((row[0] - (-4.5f64).exp() / z).abs() < 1e-15);
        assert!(row.iter().all(|&x| x > 0.0));
        let argmax = (0..8).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        assert_eq!(argmax, 3);
    }

    #[test]
    fn tiny_sigma_recovers_histogram() {
        let levels: Vec<Vec<usize>> = [0, 0, 1, 5].iter().map(|&l| vec![l]).collect();
        let p = fit_likelihoods(&levels, &[0; 4], 1, 8, 1e-6).unwrap();
        let expect = [0.5, 0.25, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0];
        for (a, b) in p[0][0].iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_counts_give_uniform_probabilities() {
        let levels: Vec<Vec<usize>> = (0..8).map(|l| vec![l]).collect();
        let p = fit_likelihoods(&levels, &[0; 8], 1, 8, 1.0).unwrap();
        // Z differs per level at the edges, so only symmetry holds exactly.
        for l in 0..4 {
            assert!((p[0][0][l] - p[0][0][7 - l]).abs() < 1e-15);
        }
        let levels: Vec<Vec<usize>> = (0..8).map(|l| vec![l]).collect();
        let sharp = fit_likelihoods(&levels, &[0; 8], 1, 8, 1e-6).unwrap();
        assert!(sharp[0][0].iter().all(|&x| (x - 0.125).abs() < 1e-12));
    }

    #[test]
    fn empty_class_errors() {
        let levels = vec![vec![1usize, 2]];
        assert!(matches!(fit_likelihoods(&levels, &[0], 2, 8, 1.0), Err(Error::EmptyClass(1))));
    }
}
