//! CSV tables and JSON summaries with run metadata in every file.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::EstimateCI;

/// Identifies the run that produced an output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunMeta {
    pub config_hash: String,
    pub seed: u64,
}

impl RunMeta {
    fn comment(&self) -> String {
        format!("# config_hash={} seed={}\n", self.config_hash, self.seed)
    }
}

/// `rows` as CSV under a `#`-comment line carrying `meta`. Column order is
/// the field order of `T`.
pub fn table_csv<T: Serialize>(meta: &RunMeta, rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| Error::Serialization(e.to_string()))?;
    Ok(meta.comment() + &body)
}

#[derive(Serialize)]
struct EstimateRow {
    n: u64,
    count: u64,
    #[serde(rename = "M")]
    samples: u64,
    estimate: f64,
    ci_lo: f64,
    ci_hi: f64,
    theory: f64,
    ratio: f64,
}

/// The estimate table: `n, count, M, estimate, ci_lo, ci_hi, theory, ratio`.
pub fn estimates_csv(meta: &RunMeta, rows: &[EstimateCI]) -> Result<String> {
    let rows: Vec<EstimateRow> = rows
        .iter()
        .map(|r| EstimateRow {
            n: r.n,
            count: r.count,
            samples: r.samples,
            estimate: r.estimate,
            ci_lo: r.ci_lo,
            ci_hi: r.ci_hi,
            theory: r.theory,
            ratio: r.ratio,
        })
        .collect();
    table_csv(meta, &rows)
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    config_hash: &'a str,
    seed: u64,
    passed: Option<bool>,
    result: &'a T,
}

/// Pretty JSON `{config_hash, seed, passed, result}`.
pub fn json_summary<T: Serialize>(meta: &RunMeta, passed: Option<bool>, result: &T) -> Result<String> {
    let s = Summary { config_hash: &meta.config_hash, seed: meta.seed, passed, result };
    serde_json::to_string_pretty(&s)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Serialization(e.to_string()))
}
