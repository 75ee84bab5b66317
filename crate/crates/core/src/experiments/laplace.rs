//! Double Laplace transform identities for `Z^Y`, `S^Y` and `S^{A_i}`.
//!
//! Every `∫_Y v · T̂^m 1_{Y_m} dμ` is rewritten by duality as
//! `∫_{Y_m} v(T^m x) dμ(x)`, so the left-hand sides need only forward orbits
//! from quadrature nodes on the explicit level intervals. The right-hand
//! sides come from the exact renewal sequences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariant::Renewal;
use crate::maps::{MapModel, ReferencePartition, Region};
use crate::quad::CompositeRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleLaplaceSpec {
    /// `s_1` for the `Z`/`S^Y` identities, `s` for the `S^{A_i}` identity.
    pub s1: f64,
    /// `s_2` for the `Z`/`S^Y` identities.
    pub s2: f64,
    /// `(s_0, s_1)` for the `S^{A_i}` identity.
    pub sides: [f64; 2],
    /// Panels per level interval (the error estimate also runs `2 * panels`).
    pub panels: usize,
    /// Relative tolerance the identity must meet.
    pub target: f64,
}

impl Default for DoubleLaplaceSpec {
    fn default() -> Self {
        Self { s1: 0.5, s2: 0.3, sides: [0.2, 0.7], panels: 2048, target: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleLaplaceReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    /// Certified bound on the orbit and level truncations (absolute).
    pub truncation_bound: f64,
    /// `|LHS(2P) - LHS(P)|` over panel counts.
    pub quadrature_estimate: f64,
    pub orbit_horizon: u64,
    pub level_horizon: u64,
    pub target: f64,
    pub passed: bool,
}

/// Truncations aim at this fraction of the target.
const TRUNCATION_SHARE: f64 = 1e-3;
const MAX_HORIZON: u64 = 100_000;

fn check_s(name: &str, v: f64, strict: bool) -> Result<()> {
    let ok = if strict { v > 0.0 } else { v >= 0.0 };
    if !(ok && v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} out of range: {v}")));
    }
    Ok(())
}

/// Smallest `N` with `e^{-(N+1)s} / (1 - e^{-s}) <= tol`.
fn orbit_horizon(s: f64, tol: f64) -> Result<u64> {
    let geo = 1.0 / (-(-s).exp_m1());
    let n = ((geo / tol).ln() / s).ceil().max(1.0) as u64;
    if n > MAX_HORIZON {
        return Err(Error::BudgetExceeded { bound: geo * (-(MAX_HORIZON as f64 + 1.0) * s).exp(), target: tol });
    }
    Ok(n)
}

/// Smallest `M` with `e^{-(M+1)r} μ(Y_{M+1}) / (1 - e^{-r}) <= tol`, and the bound.
fn level_horizon(ren: &Renewal, r: f64, tol: f64) -> Result<(u64, f64)> {
    let geo = 1.0 / (-(-r).exp_m1());
    let mut walker = ren.walker();
    for m in 0..MAX_HORIZON {
        let (a, b) = walker.next_level();
        let bound = (-((m + 1) as f64) * r).exp() * (a + b) * geo;
        if bound <= tol {
            return Ok((m, bound));
        }
    }
    Err(Error::BudgetExceeded { bound: f64::NAN, target: tol })
}

/// Level intervals in the real-line chart: `Y` for `m = 0`, then `Y_m ∩ A_0`, `Y_m ∩ A_1`.
fn level_intervals(ren: &Renewal, m_max: u64) -> Vec<(u64, Region, f64, f64)> {
    let (zc0, zc1) = ren.chart_cuts();
    let mut out = vec![(0, Region::Y, zc0, zc1)];
    for m in 1..=m_max {
        let ((a0, b0), (a1, b1)) = ren.level_z(m);
        out.push((m, Region::A0, a0, b0));
        out.push((m, Region::A1, a1, b1));
    }
    out
}

/// `∫ v(T^m x) dx` over each level interval, at two panel counts.
fn dual_integrals<V>(ren: &Renewal, v: &V, m_max: u64, panels: usize) -> Vec<((u64, Region), (f64, f64))>
where
    V: Fn(f64) -> f64 + Sync,
{
    let rule = CompositeRule::new(2);
    level_intervals(ren, m_max)
        .into_par_iter()
        .map(|(m, side, a, b)| {
            let f = |x: f64| {
                let mut z = x;
                for _ in 0..m {
                    z -= 1.0 / z;
                }
                v(z)
            };
            let coarse = rule.integrate(f, a, b, panels);
            let fine = rule.integrate(f, a, b, 2 * panels);
            ((m, side), (coarse, fine))
        })
        .collect()
}

/// `Σ_{n=0}^{N} e^{-ns} g(n, S_n^Y, Z_n, S_n^{A_0}, S_n^{A_1})` along the orbit of `z`.
fn orbit_laplace<G>(zc: (f64, f64), z: f64, s: f64, horizon: u64, g: G) -> f64
where
    G: Fn(u64, u64, u64, u64) -> f64,
{
    let (zc0, zc1) = zc;
    let q = (-s).exp();
    let (mut sy, mut last, mut sa0, mut sa1) = (0u64, 0u64, 0u64, 0u64);
    let mut w = 1.0;
    let mut total = g(0, 0, 0, 0);
    let mut y = z;
    for n in 1..=horizon {
        y -= 1.0 / y;
        if y < zc0 {
            sa0 += 1;
        } else if y <= zc1 {
            sy += 1;
            last = n;
        } else {
            sa1 += 1;
        }
        w *= q;
        total += w * g(sy, last, sa0, sa1);
    }
    total
}

struct Prepared {
    ren: Renewal,
    zc: (f64, f64),
}

fn prepare(map: &MapModel, part: &ReferencePartition) -> Result<Prepared> {
    let ren = Renewal::new(map, part)?;
    Ok(Prepared { zc: ren.chart_cuts(), ren })
}

fn finish(
    lhs: (f64, f64),
    rhs: f64,
    truncation_bound: f64,
    orbit_horizon: u64,
    level_horizon: u64,
    target: f64,
) -> DoubleLaplaceReport {
    let rel_error = (lhs.1 / rhs - 1.0).abs();
    DoubleLaplaceReport {
        lhs: lhs.1,
        rhs,
        rel_error,
        truncation_bound,
        quadrature_estimate: (lhs.1 - lhs.0).abs(),
        orbit_horizon,
        level_horizon,
        target,
        passed: rel_error < target && truncation_bound < target * rhs.abs(),
    }
}

/// `∫_Y (Σ_n e^{-ns_1} e^{-s_2 Z_n}) (Σ_m e^{-m(s_1+s_2)} T̂^m 1_{Y_m}) dμ = Q^Y(s_1) / (1 - e^{-(s_1+s_2)})`.
pub fn double_laplace_check_z(map: &MapModel, part: &ReferencePartition, spec: &DoubleLaplaceSpec) -> Result<DoubleLaplaceReport> {
    let (s1, s2) = (spec.s1, spec.s2);
    check_s("s1", s1, true)?;
    check_s("s2", s2, false)?;
    let p = prepare(map, part)?;
    let rhs = p.ren.q_laplace(s1)? / (-(-(s1 + s2)).exp_m1());
    let tol = TRUNCATION_SHARE * spec.target * rhs;
    let geo1 = 1.0 / (-(-s1).exp_m1());
    let r = s1 + s2;
    let mass = p.ren.mu_y() / (-(-r).exp_m1());
    // v <= geo1, and Σ_m e^{-mr} μ(Y_m) <= mass
    let n = orbit_horizon(s1, 0.5 * tol / mass)?;
    let (m, level_bound) = level_horizon(&p.ren, r, 0.5 * tol / geo1)?;
    let bound = level_bound * geo1 + mass * geo1 * (-((n + 1) as f64) * s1).exp();
    let zc = p.zc;
    let v = |z: f64| orbit_laplace(zc, z, s1, n, |_, last, _, _| (-s2 * last as f64).exp());
    let lhs = sum_levels(&dual_integrals(&p.ren, &v, m, spec.panels), |m, _| (-(m as f64) * r).exp());
    Ok(finish(lhs, rhs, bound, n, m, spec.target))
}

fn sum_levels<W: Fn(u64, Region) -> f64>(terms: &[((u64, Region), (f64, f64))], weight: W) -> (f64, f64) {
    let mut a = crate::stats::CompensatedSum::default();
    let mut b = crate::stats::CompensatedSum::default();
    for &((m, side), (c, f)) in terms {
        let w = weight(m, side);
        a.add(w * c);
        b.add(w * f);
    }
    (a.value(), b.value())
}

/// `(1-e^{-s_2}) ∫_Y V dμ + (1-e^{-s_1}) e^{-s_2} ∫_Y V Σ_m e^{-ms_1} T̂^m 1_{Y_m} dμ = Q^Y(s_1)`
/// with `V = Σ_n e^{-ns_1} e^{-s_2 S_n^Y}`.
pub fn double_laplace_check_sy(map: &MapModel, part: &ReferencePartition, spec: &DoubleLaplaceSpec) -> Result<DoubleLaplaceReport> {
    let (s1, s2) = (spec.s1, spec.s2);
    check_s("s1", s1, true)?;
    check_s("s2", s2, false)?;
    let p = prepare(map, part)?;
    let rhs = p.ren.q_laplace(s1)?;
    let tol = TRUNCATION_SHARE * spec.target * rhs;
    let one_m1 = -(-s1).exp_m1();
    let geo1 = 1.0 / one_m1;
    let c2 = one_m1 * (-s2).exp();
    let c1 = -(-s2).exp_m1();
    // V <= geo1; the first integral has mass μ(Y), the second at most μ(Y) geo1
    let mass = c1 * p.ren.mu_y() + c2 * p.ren.mu_y() * geo1;
    let n = orbit_horizon(s1, 0.5 * tol / mass)?;
    let (m, level_bound) = level_horizon(&p.ren, s1, 0.5 * tol / (c2 * geo1))?;
    let bound = c2 * geo1 * level_bound + mass * geo1 * (-((n + 1) as f64) * s1).exp();
    let zc = p.zc;
    let v = |z: f64| orbit_laplace(zc, z, s1, n, |sy, _, _, _| (-s2 * sy as f64).exp());
    let terms = dual_integrals(&p.ren, &v, m, spec.panels);
    let first = sum_levels(&terms, |m, _| if m == 0 { c1 } else { 0.0 });
    let second = sum_levels(&terms, |m, _| c2 * (-(m as f64) * s1).exp());
    let lhs = (first.0 + second.0, first.1 + second.1);
    Ok(finish(lhs, rhs, bound, n, m, spec.target))
}

/// `(1-e^{-s}) ∫_Y R dμ + Σ_i (e^{s_i} - e^{-s}) ∫_Y R Σ_{m>=1} e^{-m(s+s_i)} T̂^m 1_{Y_m ∩ A_i} dμ
///  = μ(Y) + Σ_i Q^{Y,A_i}(s + s_i)` with `R = Σ_n e^{-ns} e^{-Σ_j s_j S_n^{A_j}}`.
pub fn double_laplace_check_sa(map: &MapModel, part: &ReferencePartition, spec: &DoubleLaplaceSpec) -> Result<DoubleLaplaceReport> {
    let s = spec.s1;
    let [t0, t1] = spec.sides;
    check_s("s", s, true)?;
    check_s("s_0", t0, false)?;
    check_s("s_1", t1, false)?;
    let p = prepare(map, part)?;
    let rhs = p.ren.mu_y() + p.ren.q_laplace_side(s + t0, 0)? + p.ren.q_laplace_side(s + t1, 1)?;
    let tol = TRUNCATION_SHARE * spec.target * rhs;
    let geo = 1.0 / (-(-s).exp_m1());
    let side_coef = [t0.exp() - (-s).exp(), t1.exp() - (-s).exp()];
    let r_min = s + t0.min(t1);
    let coef_max = side_coef[0].max(side_coef[1]);
    let mass = p.ren.mu_y() * (1.0 + 2.0 * coef_max * geo / (-(-r_min).exp_m1()));
    let n = orbit_horizon(s, 0.5 * tol / mass)?;
    let (m, level_bound) = level_horizon(&p.ren, r_min, 0.5 * tol / (2.0 * coef_max * geo))?;
    let bound = 2.0 * coef_max * geo * level_bound + mass * geo * (-((n + 1) as f64) * s).exp();
    let zc = p.zc;
    let v = |z: f64| orbit_laplace(zc, z, s, n, |_, _, a0, a1| (-(t0 * a0 as f64) - t1 * a1 as f64).exp());
    let terms = dual_integrals(&p.ren, &v, m, spec.panels);
    let one_m = -(-s).exp_m1();
    let lhs = sum_levels(&terms, |m, side| match side {
        Region::Y => one_m,
        Region::A0 => side_coef[0] * (-(m as f64) * (s + t0)).exp(),
        Region::A1 => side_coef[1] * (-(m as f64) * (s + t1)).exp(),
    });
    Ok(finish(lhs, rhs, bound, n, m, spec.target))
}
