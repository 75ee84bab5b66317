//! Small-ball probabilities `ν(statistic <= threshold(n))` against the
//! large-deviation rates, with plateau diagnostics.

use serde::{Deserialize, Serialize};

use super::{count_events, sorted_grid, EstimateCI, Statistic};
use crate::error::{Error, Result};
use crate::invariant::{thaler_beta, Renewal, WanderingTable};
use crate::sampling::{CSequence, Sampler};
use crate::specfun::ld_rate_constant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdSpec {
    pub statistic: Statistic,
    pub n_grid: Vec<u64>,
    /// `c(n)` for `Z` and the `S^{A_i}` statistics.
    pub c: CSequence,
    /// `θ'` in `c̃(n) = a(n)^{-θ'}` for `S^Y`.
    pub theta_tilde: f64,
    pub samples: u64,
    pub seed: u64,
    /// Minimum expected event count per `n`.
    pub min_expected: f64,
}

impl LdSpec {
    pub fn new(statistic: Statistic, n_grid: Vec<u64>, theta: f64, samples: u64, seed: u64) -> Self {
        Self {
            statistic,
            n_grid,
            c: CSequence::Power { theta },
            theta_tilde: theta,
            samples,
            seed,
            min_expected: 25.0,
        }
    }
}

/// Spread of the rescaled ratios over the top half of the `n`-grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub min: f64,
    pub max: f64,
    /// `max / min - 1`.
    pub spread: f64,
}

impl Plateau {
    pub fn of(ratios: &[f64]) -> Self {
        let top = &ratios[ratios.len() / 2..];
        let min = top.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = top.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Self { min, max, spread: max / min - 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdReport {
    pub statistic: Statistic,
    pub rows: Vec<EstimateCI>,
    /// Thresholds `c(n) n` (or `c̃(n) a(n)`) per row.
    pub thresholds: Vec<f64>,
    /// `sin(πα)/(πα)`: the limit of the ratios under the sharp-tier laws.
    pub target: f64,
    pub plateau: Plateau,
}

/// Threshold and rate for the statistic at each `n`.
struct Rates {
    threshold: Vec<f64>,
    rate: Vec<f64>,
}

fn ell_correction(table: Option<&WanderingTable>, alpha: f64, n: u64, cn: f64) -> f64 {
    match table {
        Some(t) => t.ell_hat(n as f64, 1.0 - alpha) / t.ell_hat(cn.max(1.0), 1.0 - alpha),
        None => 1.0,
    }
}

fn rates(sampler: &Sampler, spec: &LdSpec, grid: &[u64]) -> Result<Rates> {
    let map = sampler.engine().map();
    let part = sampler.engine().partition();
    let alpha = map.alpha();
    let n_max = *grid.last().unwrap();
    let ren = if map.is_boole() { Some(Renewal::new(map, part)?) } else { None };
    let needs_table = !matches!(spec.statistic, Statistic::SY);
    let table = match (&ren, needs_table) {
        (Some(r), true) => Some(r.wandering_table(n_max as usize)?),
        _ => None,
    };
    let beta = thaler_beta(map);
    let mut threshold = Vec::with_capacity(grid.len());
    let mut rate = Vec::with_capacity(grid.len());
    for &n in grid {
        let nf = n as f64;
        match spec.statistic {
            Statistic::SY => {
                let ren = ren.as_ref().ok_or(Error::NoClosedFormDensity("Thaler family"))?;
                let a = ren.dk_normalizer(nf)?;
                let ct = a.powf(-spec.theta_tilde);
                threshold.push(ct * a);
                rate.push(ct / ren.mu_y());
            }
            stat => {
                let c = spec.c.value(n);
                let cn = c * nf;
                let corr = ell_correction(table.as_ref(), alpha, n, cn);
                let side = match stat {
                    Statistic::Z => 1.0,
                    Statistic::SA0 => beta.beta1 / beta.beta0,
                    Statistic::SA1 => beta.beta0 / beta.beta1,
                    Statistic::Weighted { lambda } => beta.beta1 / beta.beta0 * lambda.powf(-alpha),
                    Statistic::SY => unreachable!(),
                };
                threshold.push(cn);
                rate.push(side * c.powf(alpha) * corr);
            }
        }
    }
    Ok(Rates { threshold, rate })
}

pub fn ld_experiment(sampler: &Sampler, spec: &LdSpec) -> Result<LdReport> {
    spec.c.validate()?;
    if !(spec.theta_tilde > 0.0 && spec.theta_tilde < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "θ' must lie in (0, 1), got {}",
            spec.theta_tilde
        )));
    }
    if let Statistic::Weighted { lambda } = spec.statistic {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("λ must be > 0, got {lambda}")));
        }
    }
    let grid = sorted_grid(&spec.n_grid)?;
    let alpha = sampler.engine().map().alpha();
    let target = ld_rate_constant(alpha)?;
    let Rates { threshold, rate } = rates(sampler, spec, &grid)?;
    for (j, &n) in grid.iter().enumerate() {
        let expected = spec.samples as f64 * target * rate[j];
        if expected < spec.min_expected {
            return Err(Error::InsufficientEvents { n, expected, min: spec.min_expected });
        }
    }
    let stat = spec.statistic;
    let counts = count_events(sampler, &grid, spec.samples, spec.seed, |j, r| {
        stat.value(r) <= threshold[j]
    })?;
    let rows: Vec<EstimateCI> = grid
        .iter()
        .zip(&counts)
        .zip(&rate)
        .map(|((&n, &k), &r)| EstimateCI::new(n, k, spec.samples, r))
        .collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    Ok(LdReport {
        statistic: stat,
        plateau: Plateau::of(&ratios),
        rows,
        thresholds: threshold,
        target,
    })
}
