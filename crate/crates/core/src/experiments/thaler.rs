//! Asymptotics of the Thaler family: `f_0^n(1)` against `u_0^{-1}(n)`, and
//! the return-time tail exponent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sorted_grid, CHUNK};
use crate::error::{Error, Result};
use crate::invariant::thaler_u_inverse;
use crate::maps::MapModel;
use crate::orbitstats::ReturnTime;
use crate::sampling::Sampler;
use crate::stats::least_squares;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThalerRow {
    pub n: u64,
    /// `f_0^n(1)`.
    pub iterate: f64,
    /// `u_0^{-1}(n)`.
    pub u_inverse: f64,
    pub ratio: f64,
}

/// `f_0^n(1) / u_0^{-1}(n)` over the grid; iterates are accumulated, so the
/// cost is `max(n)` inverse-branch evaluations.
pub fn thaler_asymptotics_check(map: &MapModel, n_grid: &[u64]) -> Result<Vec<ThalerRow>> {
    let grid = sorted_grid(n_grid)?;
    let mut x = 1.0;
    let mut done = 0u64;
    let mut rows = Vec::with_capacity(grid.len());
    for n in grid {
        x = map.iterate_inverse_branch(0, x, n - done)?;
        done = n;
        let u_inverse = thaler_u_inverse(map, 0, n as f64)?;
        rows.push(ThalerRow { n, iterate: x, u_inverse, ratio: x / u_inverse });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub n: u64,
    /// Fraction of samples with `φ > n`.
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThalerTail {
    pub alpha: f64,
    pub samples: u64,
    pub tail: Vec<TailPoint>,
    /// Least-squares slope of `log tail` against `log n`.
    pub slope: f64,
    /// Samples whose return exceeded the largest `n`.
    pub censored: u64,
}

/// Monte Carlo tail of the first return time `φ` from the sampler's law.
pub fn thaler_tail_experiment(sampler: &Sampler, n_grid: &[u64], samples: u64, seed: u64) -> Result<ThalerTail> {
    let grid = sorted_grid(n_grid)?;
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("tail fit needs at least two n values".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let cap = *grid.last().unwrap();
    let m = grid.len();
    let counts = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; m + 1];
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let t = sampler.return_time(seed, i, cap)?;
                for (j, &n) in grid.iter().enumerate() {
                    counts[j] += t.exceeds(n) as u64;
                }
                counts[m] += matches!(t, ReturnTime::Overflow(_)) as u64;
            }
            Ok(counts)
        })
        .try_reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let tail: Vec<TailPoint> = grid
        .iter()
        .zip(&counts)
        .map(|(&n, &k)| TailPoint { n, tail: k as f64 / samples as f64 })
        .collect();
    if tail.iter().any(|p| p.tail == 0.0) {
        return Err(Error::InsufficientEvents { n: cap, expected: 0.0, min: 1.0 });
    }
    let lx: Vec<f64> = tail.iter().map(|p| (p.n as f64).ln()).collect();
    let ly: Vec<f64> = tail.iter().map(|p| p.tail.ln()).collect();
    let fit = least_squares(&lx, &ly);
    Ok(ThalerTail {
        alpha: sampler.engine().map().alpha(),
        samples,
        tail,
        slope: fit.slope,
        censored: counts[m],
    })
}
