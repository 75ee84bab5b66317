//! A law `G` on `Y` whose small-ball probabilities decay strictly slower
//! than `c(n)^α`: mass checks, quadrature tails and the diverging ratio.

use serde::{Deserialize, Serialize};

use super::{count_events, EstimateCI};
use crate::error::{Error, Result};
use crate::maps::{MapModel, ReferencePartition};
use crate::orbitstats::OrbitEngine;
use crate::sampling::{counterexample_density, CSequence, InitialLaw, Sampler};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub c: CSequence,
    pub alpha: f64,
    /// Levels `k = 1..=k_max` are reported.
    pub k_max: usize,
    pub samples: u64,
    pub seed: u64,
}

impl Default for CounterexampleSpec {
    fn default() -> Self {
        Self { c: CSequence::Exponential { rate: 0.5 }, alpha: 0.5, k_max: 20, samples: 100_000, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub k: usize,
    pub n_k: u64,
    pub c: f64,
    /// `c(N_k)^{α/2}`.
    pub tail_target: f64,
    /// `μ_G(φ > N_k)` from the level masses.
    pub tail_levels: f64,
    /// `μ_G(φ > N_k)` by quadrature over orbits.
    pub tail_quadrature: f64,
    /// `ν(Z_{N_k} <= c(N_k) N_k)` with theory `c(N_k)^α`.
    pub estimate: EstimateCI,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub total_mass: f64,
    pub levels: usize,
    pub rows: Vec<CounterexampleRow>,
    /// Largest `|tail_quadrature - tail_target|`.
    pub max_tail_error: f64,
    pub monotone: bool,
    pub final_ratio: f64,
}

pub fn counterexample_experiment(
    map: &MapModel,
    part: &ReferencePartition,
    spec: &CounterexampleSpec,
) -> Result<CounterexampleReport> {
    let law = counterexample_density(map, part, &spec.c, spec.alpha)?;
    let InitialLaw::Counterexample(g) = &law else { unreachable!() };
    let g = g.clone();
    if spec.k_max == 0 || spec.k_max >= g.levels.len() {
        return Err(Error::InvalidParameter(format!(
            "k_max must lie in [1, {}), got {}",
            g.levels.len(),
            spec.k_max
        )));
    }
    let engine = OrbitEngine::new(map, part);
    let ks: Vec<usize> = (1..=spec.k_max).collect();
    let times: Vec<u64> = ks.iter().map(|&k| g.level_time(k)).collect();
    let thresholds: Vec<f64> = times.iter().map(|&n| spec.c.value(n) * n as f64).collect();
    let sampler = Sampler::new(law, engine)?;
    let counts = count_events(&sampler, &times, spec.samples, spec.seed, |j, r| {
        (r.z_y as f64) <= thresholds[j]
    })?;
    let mut rows = Vec::with_capacity(ks.len());
    for (j, &k) in ks.iter().enumerate() {
        let n_k = times[j];
        let c = spec.c.value(n_k);
        rows.push(CounterexampleRow {
            k,
            n_k,
            c,
            tail_target: c.powf(spec.alpha / 2.0),
            tail_levels: g.tail(k),
            tail_quadrature: g.tail_by_quadrature(&engine, k)?,
            estimate: EstimateCI::new(n_k, counts[j], spec.samples, c.powf(spec.alpha)),
        });
    }
    let max_tail_error = rows
        .iter()
        .map(|r| (r.tail_quadrature - r.tail_target).abs())
        .fold(0.0, f64::max);
    let monotone = rows.windows(2).all(|w| w[1].estimate.ratio > w[0].estimate.ratio);
    Ok(CounterexampleReport {
        total_mass: g.mass(),
        levels: g.levels.len(),
        final_ratio: rows.last().unwrap().estimate.ratio,
        rows,
        max_tail_error,
        monotone,
    })
}
