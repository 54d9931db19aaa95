//! Seeded, chunk-deterministic Monte Carlo machinery.
//!
//! Every estimator in this crate draws from ChaCha streams keyed by
//! `(seed, chunk index)` and reduces chunk statistics in index order, so a
//! result depends only on the seed and the compiled-in chunk layout — never
//! on thread count or scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Samples per deterministic chunk.
pub const CHUNK_SIZE: u64 = 1 << 14;

/// Smallest sample count accepted by the Monte Carlo estimators.
pub const MIN_SAMPLES: u64 = 1_000;

/// Derives an independent sub-seed for a tagged purpose (e.g. the two halves
/// of a consistency check). SplitMix64 finalizer over seed and tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for one chunk of one seeded run.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk.wrapping_add(1));
    rng
}

/// A Monte Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Sample standard deviation divided by sqrt(n); 0 for exact values.
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl Estimate {
    /// Wraps an exactly computed value (enumeration or closed form).
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            stderr: 0.0,
            n_samples: 0,
            seed: 0,
        }
    }

    pub fn three_sigma(&self) -> f64 {
        3.0 * self.stderr
    }

    /// True when the two values agree within `n_sigmas` pooled standard
    /// errors. Exact-vs-exact comparisons fall back to a 1e-12 slack.
    pub fn agrees_with(&self, other: &Estimate, n_sigmas: f64) -> bool {
        let pooled = self.stderr.hypot(other.stderr);
        let slack = if pooled > 0.0 {
            n_sigmas * pooled
        } else {
            1e-12
        };
        (self.value - other.value).abs() <= slack
    }
}

/// Welford accumulator with deterministic pairwise merge.
#[derive(Debug, Clone, Copy, Default)]
pub struct OnlineStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl OnlineStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: OnlineStats) -> OnlineStats {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * (other.n as f64 / n as f64);
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        OnlineStats { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean (0 when fewer than two samples).
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64).sqrt() / (self.n as f64).sqrt()
    }

    pub fn into_estimate(self, n_samples: u64, seed: u64) -> Estimate {
        Estimate {
            value: self.mean(),
            stderr: self.stderr(),
            n_samples,
            seed,
        }
    }
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n_samples,
            min: MIN_SAMPLES,
        });
    }
    Ok(())
}

fn chunk_stats<F>(n_samples: u64, seed: u64, sample: F) -> Result<Vec<OnlineStats>>
where
    F: Fn(&mut ChaCha8Rng, &mut OnlineStats) -> Result<()> + Sync,
{
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let len = CHUNK_SIZE.min(n_samples - chunk * CHUNK_SIZE);
            let mut stats = OnlineStats::default();
            for _ in 0..len {
                sample(&mut rng, &mut stats)?;
            }
            Ok(stats)
        })
        .collect()
}

/// Mean of `f` over `n_samples` seeded draws.
pub fn sample_mean<F>(n_samples: u64, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    check_samples(n_samples)?;
    let stats = chunk_stats(n_samples, seed, |rng, acc| {
        acc.push(f(rng)?);
        Ok(())
    })?;
    let total = stats
        .into_iter()
        .fold(OnlineStats::default(), OnlineStats::merge);
    Ok(total.into_estimate(n_samples, seed))
}

/// Mean of `f` over the draws it accepts (`Some`), out of `n_samples`
/// proposals. The returned `n_samples` is the accepted count.
pub fn conditional_mean<F>(n_samples: u64, seed: u64, min_hits: u64, f: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Option<f64>> + Sync,
{
    check_samples(n_samples)?;
    let stats = chunk_stats(n_samples, seed, |rng, acc| {
        if let Some(x) = f(rng)? {
            acc.push(x);
        }
        Ok(())
    })?;
    let total = stats
        .into_iter()
        .fold(OnlineStats::default(), OnlineStats::merge);
    if total.count() < min_hits {
        return Err(Error::TooFewHits {
            hits: total.count(),
            drawn: n_samples,
        });
    }
    let hits = total.count();
    Ok(total.into_estimate(hits, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn sample_mean_is_deterministic() {
        let run = || sample_mean(10_000, 42, |rng| Ok(rng.random::<f64>())).unwrap();
        let a = run();
        let b = run();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    }

    #[test]
    fn sample_mean_of_uniform_is_half() {
        let est = sample_mean(200_000, 7, |rng| Ok(rng.random::<f64>())).unwrap();
        assert!((est.value - 0.5).abs() < 3.0 * est.stderr + 1e-3);
        // stderr of U(0,1) mean is ~ 1/sqrt(12 n)
        let expected = (1.0f64 / 12.0 / 200_000.0).sqrt();
        assert!((est.stderr - expected).abs() / expected < 0.05);
    }

    #[test]
    fn rejects_small_sample_counts() {
        let err = sample_mean(10, 0, |_| Ok(0.0)).unwrap_err();
        assert!(matches!(err, Error::TooFewSamples { .. }));
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let mut whole = OnlineStats::default();
        for &x in &xs {
            whole.push(x);
        }
        let mut left = OnlineStats::default();
        let mut right = OnlineStats::default();
        for &x in &xs[..313] {
            left.push(x);
        }
        for &x in &xs[313..] {
            right.push(x);
        }
        let merged = left.merge(right);
        assert!((whole.mean() - merged.mean()).abs() < 1e-12);
        assert!((whole.stderr() - merged.stderr()).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(9, 3), derive_seed(9, 3));
    }

    #[test]
    fn conditional_mean_counts_hits() {
        let est = conditional_mean(50_000, 3, 100, |rng| {
            let x = rng.random::<f64>();
            Ok(if x < 0.5 { Some(1.0) } else { None })
        })
        .unwrap();
        assert!(est.n_samples > 20_000 && est.n_samples < 30_000);
        assert_eq!(est.value, 1.0);
    }
}
