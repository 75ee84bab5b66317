//! Monte Carlo drivers and exact-identity verifiers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbitstats::Checkpoint;
use crate::sampling::Sampler;
use crate::stats::{wilson_interval, Z95};

pub mod cdf;
pub mod counterexample;
pub mod identities;
pub mod laplace;
pub mod ld;
pub mod thaler;

pub use cdf::{cdf_experiment, CdfRow, CdfSpec, CdfTable};
pub use counterexample::{counterexample_experiment, CounterexampleReport, CounterexampleRow, CounterexampleSpec};
pub use identities::{identity_suite, measure_preservation_residual, IdentityReport};
pub use laplace::{
    double_laplace_check_sa, double_laplace_check_sy, double_laplace_check_z, DoubleLaplaceReport,
    DoubleLaplaceSpec,
};
pub use ld::{ld_experiment, LdReport, LdSpec, Plateau};
pub use thaler::{thaler_asymptotics_check, thaler_tail_experiment, TailPoint, ThalerRow, ThalerTail};

/// Orbit statistic tracked by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Z,
    SY,
    SA0,
    SA1,
    /// `λ S^{A_0}` (the `d = 2` instance of `Σ λ_i S^{A_i}` over `i < d`).
    Weighted { lambda: f64 },
}

impl Statistic {
    pub fn value(&self, r: &Checkpoint) -> f64 {
        match *self {
            Statistic::Z => r.z_y as f64,
            Statistic::SY => r.s_y as f64,
            Statistic::SA0 => r.s_a0 as f64,
            Statistic::SA1 => r.s_a1 as f64,
            Statistic::Weighted { lambda } => lambda * r.s_a0 as f64,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Z => "Z",
            Statistic::SY => "SY",
            Statistic::SA0 => "SA0",
            Statistic::SA1 => "SA1",
            Statistic::Weighted { .. } => "weighted",
        }
    }
}

/// Binomial estimate at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateCI {
    pub n: u64,
    pub count: u64,
    pub samples: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Rate the estimate is divided by.
    pub theory: f64,
    pub ratio: f64,
}

impl EstimateCI {
    pub fn new(n: u64, count: u64, samples: u64, theory: f64) -> Self {
        let estimate = count as f64 / samples as f64;
        let (ci_lo, ci_hi) = wilson_interval(count, samples, Z95);
        Self { n, count, samples, estimate, ci_lo, ci_hi, theory, ratio: estimate / theory }
    }

    /// Do the Wilson intervals of the two estimates overlap?
    pub fn overlaps(&self, other: &EstimateCI) -> bool {
        self.ci_lo <= other.ci_hi && other.ci_lo <= self.ci_hi
    }
}

/// Samples per rayon task; a multiple of the orbit-engine lane count.
pub(crate) const CHUNK: u64 = 64;

/// Checkpoint records of samples `0..samples`, in index order. The result
/// does not depend on the number of worker threads.
pub fn run_records(sampler: &Sampler, checkpoints: &[u64], samples: u64, seed: u64) -> Result<Vec<Vec<Checkpoint>>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Vec<Vec<Checkpoint>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(samples);
            let starts = (lo..hi).map(|i| sampler.native(seed, i)).collect::<Result<Vec<f64>>>()?;
            sampler.engine().simulate_batch(&starts, checkpoints)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Count of samples satisfying `pred` at each checkpoint, without keeping
/// the records.
pub fn count_events<P>(sampler: &Sampler, checkpoints: &[u64], samples: u64, seed: u64, pred: P) -> Result<Vec<u64>>
where
    P: Fn(usize, &Checkpoint) -> bool + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let m = checkpoints.len();
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(samples);
            let starts = (lo..hi).map(|i| sampler.native(seed, i)).collect::<Result<Vec<f64>>>()?;
            let recs = sampler.engine().simulate_batch(&starts, checkpoints)?;
            let mut counts = vec![0u64; m];
            for r in &recs {
                for (j, cp) in r.iter().enumerate() {
                    counts[j] += pred(j, cp) as u64;
                }
            }
            Ok(counts)
        })
        .try_reduce(
            || vec![0u64; m],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )
}

/// Sorted checkpoint list from an arbitrary grid, rejecting empty grids.
pub(crate) fn sorted_grid(grid: &[u64]) -> Result<Vec<u64>> {
    let mut g = grid.to_vec();
    g.sort_unstable();
    g.dedup();
    if g.is_empty() || g[0] == 0 {
        return Err(Error::InvalidParameter("n-grid must be nonempty and positive".into()));
    }
    Ok(g)
}
