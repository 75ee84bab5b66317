//! Empirical CDFs of normalized statistics against their limit laws.

use serde::{Deserialize, Serialize};

use super::{run_records, Statistic};
use crate::error::{Error, Result};
use crate::invariant::thaler_beta;
use crate::sampling::Sampler;
use crate::specfun::{lamperti_cdf_closed, LimitLaw};
use crate::stats::{empirical_cdf, ks_distance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfSpec {
    pub statistic: Statistic,
    pub n: u64,
    pub samples: u64,
    pub seed: u64,
    pub t_grid: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub t: f64,
    pub empirical: f64,
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfTable {
    pub statistic: Statistic,
    pub law: LimitLaw,
    pub n: u64,
    pub samples: u64,
    pub rows: Vec<CdfRow>,
    pub ks: f64,
}

/// Limit law of the normalized statistic, and the normalization.
fn target(sampler: &Sampler, stat: Statistic, n: u64) -> Result<(LimitLaw, Box<dyn Fn(f64) -> f64 + Sync>)> {
    let map = sampler.engine().map();
    let alpha = map.alpha();
    let nf = n as f64;
    Ok(match stat {
        Statistic::Z => (LimitLaw::DynkinLamperti { alpha }, Box::new(move |v| v / nf)),
        Statistic::SY => {
            if !map.is_boole() {
                return Err(Error::NoClosedFormDensity("Thaler family"));
            }
            let scale = std::f64::consts::PI / (2.0 * nf.sqrt());
            (LimitLaw::DarlingKacBoole, Box::new(move |v| v * scale))
        }
        Statistic::SA0 | Statistic::SA1 => {
            let beta = thaler_beta(map);
            let b = if stat == Statistic::SA0 { beta.beta1 / beta.beta0 } else { beta.beta0 / beta.beta1 };
            (LimitLaw::Lamperti { alpha, b }, Box::new(move |v| v / nf))
        }
        Statistic::Weighted { .. } => {
            return Err(Error::InvalidParameter("no limit law for the weighted statistic".into()))
        }
    })
}

pub fn cdf_experiment(sampler: &Sampler, spec: &CdfSpec) -> Result<CdfTable> {
    if spec.n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let (law, norm) = target(sampler, spec.statistic, spec.n)?;
    let theory = |t: f64| -> Result<f64> {
        match law {
            LimitLaw::Lamperti { alpha, b } => lamperti_cdf_closed(alpha, b, t.clamp(0.0, 1.0)),
            LimitLaw::DynkinLamperti { .. } => law.cdf(t.clamp(0.0, 1.0)),
            _ => law.cdf(t.max(0.0)),
        }
    };
    let records = run_records(sampler, &[spec.n], spec.samples, spec.seed)?;
    let mut values: Vec<f64> = records.iter().map(|r| norm(spec.statistic.value(&r[0]))).collect();
    values.sort_by(f64::total_cmp);
    // theory values at the sample points, so the KS pass stays infallible
    let mut at_samples = Vec::with_capacity(values.len());
    for &v in &values {
        at_samples.push(theory(v)?);
    }
    let lookup = |x: f64| {
        let i = values.partition_point(|&v| v < x);
        at_samples[i.min(at_samples.len() - 1)]
    };
    let ks = ks_distance(&values, lookup);
    let rows = spec
        .t_grid
        .iter()
        .map(|&t| {
            Ok(CdfRow {
                t,
                empirical: empirical_cdf(&values, t),
                theory: theory(t)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CdfTable {
        statistic: spec.statistic,
        law,
        n: spec.n,
        samples: spec.samples,
        rows,
        ks,
    })
}
