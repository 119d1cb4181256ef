use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sequential generator for a whole run (dataset synthesis, shuffles, init).
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counter-style generator keyed by `(seed, domain, a, b)`.
///
/// Each key selects an independent ChaCha stream, so results do not depend on
/// the order in which keys are visited.
pub fn keyed_rng(seed: u64, domain: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    key[16..24].copy_from_slice(&a.to_le_bytes());
    key[24..32].copy_from_slice(&b.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform in `[0, 1)` with 53 random bits.
pub(crate) fn uniform01<R: Rng>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Box-Muller normal draw using `libm`, so samples are bit-identical on
/// every platform.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // 1 - u keeps the log argument in (0, 1].
    let u1 = 1.0 - uniform01(rng);
    let u2 = uniform01(rng);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(std::f64::consts::TAU * u2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn keyed_streams_are_order_independent() {
        let a1 = keyed_rng(7, 1, 2, 3).next_u64();
        let _ = keyed_rng(7, 1, 9, 9).next_u64();
        let a2 = keyed_rng(7, 1, 2, 3).next_u64();
        assert_eq!(a1, a2);
        assert_ne!(a1, keyed_rng(7, 1, 2, 4).next_u64());
    }

    #[test]
    fn normal_moments() {
        let mut rng = seeded_rng(11);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }
}
