//! The deterministic identity suite: measure preservation, the renewal
//! identity on `Y` and the three double Laplace identities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::laplace::{double_laplace_check_sa, double_laplace_check_sy, double_laplace_check_z, DoubleLaplaceSpec};
use crate::entrance::Entrance;
use crate::error::Result;
use crate::invariant::measure_interval;
use crate::maps::{MapModel, ReferencePartition};
use crate::sampling::stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityReport {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, passed: value < tolerance }
    }
}

/// Largest `|μ(f_0 I) + μ(f_1 I) - μ(I)| / μ(I)` over `count` random intervals `I`.
pub fn measure_preservation_residual(map: &MapModel, count: usize, seed: u64) -> Result<f64> {
    let mut rng = stream(seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let (mut a, mut b) = (rng.random::<f64>(), rng.random::<f64>());
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        if !(a > 0.0 && b < 1.0 && a < b) {
            continue;
        }
        let whole = measure_interval(map, a, b)?;
        let left = measure_interval(map, map.inverse_branch(0, a)?, map.inverse_branch(0, b)?)?;
        let right = measure_interval(map, map.inverse_branch(1, a)?, map.inverse_branch(1, b)?)?;
        worst = worst.max(((left + right) - whole).abs() / whole);
    }
    Ok(worst)
}

/// Identity-suite tolerances.
pub const PRESERVATION_TOL: f64 = 1e-10;
pub const RENEWAL_TOL: f64 = 1e-6;
pub const LAPLACE_TOL: f64 = 1e-3;

/// Every exact identity at its reference parameters.
pub fn identity_suite(map: &MapModel, part: &ReferencePartition, seed: u64) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::with_capacity(5);
    out.push(IdentityReport::new(
        "measure-preservation",
        measure_preservation_residual(map, 100, seed)?,
        PRESERVATION_TOL,
    ));
    let renewal = Entrance::new(map, part)?.check_identity_renewal(0.5, 200, RENEWAL_TOL)?;
    out.push(IdentityReport::new("renewal", renewal.residual + renewal.truncation_bound, RENEWAL_TOL));
    let base = DoubleLaplaceSpec { target: LAPLACE_TOL, ..DoubleLaplaceSpec::default() };
    let z = double_laplace_check_z(map, part, &DoubleLaplaceSpec { s1: 0.5, s2: 0.3, ..base })?;
    out.push(IdentityReport::new("double-laplace-z", z.rel_error, LAPLACE_TOL));
    let sy = double_laplace_check_sy(map, part, &DoubleLaplaceSpec { s1: 0.4, s2: 0.6, ..base })?;
    out.push(IdentityReport::new("double-laplace-sy", sy.rel_error, LAPLACE_TOL));
    let sa = double_laplace_check_sa(map, part, &DoubleLaplaceSpec { s1: 0.5, sides: [0.2, 0.7], ..base })?;
    out.push(IdentityReport::new("double-laplace-sa", sa.rel_error, LAPLACE_TOL));
    Ok(out)
}
