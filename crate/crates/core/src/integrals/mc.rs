//! Batched Monte Carlo with per-batch streams, reduced in batch order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::IntegralResult;

pub const BATCH_SIZE: u64 = 1 << 14;

/// Mixes a run seed with a tag so that distinct sub-integrals draw from
/// unrelated streams.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean of `sample` over `samples` draws with its standard error. Batch `b`
/// uses stream `b` of the generator seeded with `seed`; the result does not
/// depend on how many threads run the batches.
pub fn estimate<F>(samples: u64, seed: u64, sample: F) -> Result<IntegralResult>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples < 2 {
        return Err(Error::invalid("samples", "need at least two samples"));
    }
    let batches = samples.div_ceil(BATCH_SIZE);
    let parts: Vec<(u64, f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH_SIZE.min(samples - b * BATCH_SIZE);
            // Welford within the batch
            let (mut mean, mut m2) = (0.0, 0.0);
            for k in 0..count {
                let x = sample(&mut rng);
                let delta = x - mean;
                mean += delta / (k + 1) as f64;
                m2 += delta * (x - mean);
            }
            (count, mean, m2)
        })
        .collect();
    let (mut n, mut mean, mut m2) = (0u64, 0.0, 0.0);
    for (count, m, s) in parts {
        let total = n + count;
        let delta = m - mean;
        mean += delta * count as f64 / total as f64;
        m2 += s + delta * delta * n as f64 * count as f64 / total as f64;
        n = total;
    }
    if !mean.is_finite() || !m2.is_finite() {
        return Err(Error::NonConvergent("sample mean is not finite".into()));
    }
    let variance = m2 / (n - 1) as f64;
    Ok(IntegralResult::monte_carlo(mean, (variance / n as f64).sqrt(), n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn uniform_mean_and_error() {
        let r = estimate(1 << 16, 5, |rng| rng.gen::<f64>()).unwrap();
        assert!((r.value - 0.5).abs() < 4.0 * r.error);
        let want = (1.0 / 12.0 / 65536.0f64).sqrt();
        assert!((r.error / want - 1.0).abs() < 0.02);
    }

    #[test]
    fn reproducible_across_pools() {
        let f = |rng: &mut ChaCha8Rng| rng.gen::<f64>().powi(3);
        let a = estimate(100_000, 42, f).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate(100_000, 42, f).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
        assert_ne!(estimate(100_000, 43, f).unwrap().value, a.value);
    }

    #[test]
    fn error_halves_when_samples_quadruple() {
        let f = |rng: &mut ChaCha8Rng| if rng.gen::<f64>() < 0.3 { 1.0 } else { 0.0 };
        let a = estimate(1 << 16, 1, f).unwrap();
        let b = estimate(1 << 18, 1, f).unwrap();
        let ratio = a.error / b.error;
        assert!((1.6..=2.6).contains(&ratio), "{ratio}");
    }
}
