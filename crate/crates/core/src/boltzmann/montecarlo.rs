//! Seeded, worker-count independent Monte Carlo reduction.
//!
//! Samples are split into fixed-size blocks. Block `b` draws from a ChaCha8
//! stream selected by `b` under the run seed, and block sums are combined in
//! block order, so the estimate is bit-identical for any number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

const BLOCK: usize = 8192;

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MCEstimate {
    /// `|mean| ≤ k·stderr + floor`; `floor` absorbs rounding in exactly-zero cases.
    pub fn consistent_with_zero(&self, k: f64, floor: f64) -> bool {
        self.mean.abs() <= k * self.stderr + floor
    }

    /// `mean < −k·stderr`.
    pub fn significantly_negative(&self, k: f64) -> bool {
        self.mean < -k * self.stderr
    }

    /// `mean ≤ k·stderr`: not significantly positive.
    pub fn not_significantly_positive(&self, k: f64) -> bool {
        self.mean <= k * self.stderr
    }
}

/// Sample count, seed and optional worker cap for one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McRun {
    pub n: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl McRun {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(GeometryError::InvalidArgument(
                "sample count must be at least 1".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(GeometryError::InvalidArgument(
                "worker count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Generator for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Sums for a self-normalized weighted mean.
#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    w: f64,
    wh: f64,
    w2: f64,
    w2h: f64,
    w2h2: f64,
    n: usize,
}

impl Sums {
    fn push(&mut self, weight: f64, value: f64) {
        let w2 = weight * weight;
        self.w += weight;
        self.wh += weight * value;
        self.w2 += w2;
        self.w2h += w2 * value;
        self.w2h2 += w2 * value * value;
        self.n += 1;
    }

    fn merge(mut self, other: &Sums) -> Sums {
        self.w += other.w;
        self.wh += other.wh;
        self.w2 += other.w2;
        self.w2h += other.w2h;
        self.w2h2 += other.w2h2;
        self.n += other.n;
        self
    }

    /// Self-normalized mean; delta-method standard error.
    fn finish(&self) -> MCEstimate {
        let mean = self.wh / self.w;
        let spread = self.w2h2 - 2.0 * mean * self.w2h + mean * mean * self.w2;
        let stderr = (spread.max(0.0)).sqrt() / self.w;
        MCEstimate {
            mean,
            stderr,
            n: self.n,
        }
    }
}

/// Weighted Monte Carlo estimate of `Σ ω h / Σ ω` where each call of `sample`
/// returns one `(ω, h)` pair.
pub fn estimate<F>(run: &McRun, sample: F) -> Result<MCEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> (f64, f64) + Sync,
{
    run.validate()?;
    let blocks = run.n.div_ceil(BLOCK);
    let n = run.n;
    let seed = run.seed;
    let do_block = |b: usize| {
        let mut rng = block_rng(seed, b as u64);
        let count = BLOCK.min(n - b * BLOCK);
        let mut sums = Sums::default();
        for _ in 0..count {
            let (w, h) = sample(&mut rng);
            sums.push(w, h);
        }
        sums
    };
    let per_block: Vec<Sums> = match run.workers {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| GeometryError::InvalidArgument(e.to_string()))?;
            pool.install(|| (0..blocks).into_par_iter().map(do_block).collect())
        }
        None => (0..blocks).into_par_iter().map(do_block).collect(),
    };
    let total = per_block
        .iter()
        .fold(Sums::default(), |acc, s| acc.merge(s));
    let est = total.finish();
    if !est.mean.is_finite() || !est.stderr.is_finite() {
        return Err(GeometryError::NonFinite {
            what: "Monte Carlo estimate",
            index: 0,
        });
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn unweighted_mean_and_error() {
        let run = McRun::new(100_000, 7);
        let est = estimate(&run, |rng| (1.0, rng.gen::<f64>())).unwrap();
        assert_eq!(est.n, 100_000);
        assert!((est.mean - 0.5).abs() < 4.0 * est.stderr);
        let expected_se = (1.0f64 / 12.0).sqrt() / (100_000f64).sqrt();
        assert!((est.stderr / expected_se - 1.0).abs() < 0.02);
    }

    #[test]
    fn constant_sample_has_zero_error() {
        let est = estimate(&McRun::new(1, 0), |_| (1.0, 0.0)).unwrap();
        assert_eq!((est.mean, est.stderr, est.n), (0.0, 0.0, 1));
    }

    #[test]
    fn rejects_empty_runs() {
        assert!(estimate(&McRun::new(0, 0), |_| (1.0, 0.0)).is_err());
        assert!(estimate(&McRun::new(10, 0).with_workers(0), |_| (1.0, 0.0)).is_err());
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let sample = |rng: &mut ChaCha8Rng| {
            let x: f64 = rng.gen();
            (1.0 + x, x.sin())
        };
        let base = estimate(&McRun::new(50_000, 3).with_workers(1), sample).unwrap();
        for workers in [2, 5, 8] {
            let other = estimate(&McRun::new(50_000, 3).with_workers(workers), sample).unwrap();
            assert_eq!(base.mean.to_bits(), other.mean.to_bits());
            assert_eq!(base.stderr.to_bits(), other.stderr.to_bits());
        }
    }

    #[test]
    fn stderr_shrinks_like_inverse_root_n() {
        let sample = |rng: &mut ChaCha8Rng| (1.0, rng.gen::<f64>());
        let small = estimate(&McRun::new(10_000, 1), sample).unwrap();
        let large = estimate(&McRun::new(160_000, 1), sample).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }
}
