//! Limit-law distribution functions: Mittag-Leffler, Dynkin–Lamperti
//! (generalized arcsine for waiting times), Lamperti (generalized arcsine for
//! occupation times) and the Darling–Kac limit of Boole's map.

use std::f64::consts::{FRAC_1_PI, PI};

use serde::{Deserialize, Serialize};
use libm::{erf, lgamma as ln_gamma, tgamma as gamma};

use crate::error::{Error, Result};
use crate::quad;
use crate::stats::CompensatedSum;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")))
    }
}

const SERIES_CAP: usize = 200;
/// ln Γ carries roughly this relative error, which dominates the rounding of each term.
const TERM_REL_ERR: f64 = 4e-14;
const SERIES_BUDGET: f64 = 1e-11;

/// Mittag-Leffler CDF by its power series:
/// `F(t) = (1/(πα)) Σ_{k>=1} (-1)^{k-1} sin(παk) Γ(1+αk) t^k / (k! k)`.
///
/// Fails with `PrecisionLoss` when the term cap is reached before the tail is
/// certified, or when cancellation between large terms exceeds the budget.
pub fn mittag_leffler_cdf_series(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let lt = t.ln();
    let log_mag = |k: usize| {
        let kf = k as f64;
        ln_gamma(1.0 + alpha * kf) - ln_gamma(kf + 1.0) + kf * lt - kf.ln()
    };
    let mut sum = CompensatedSum::default();
    let mut abs_sum = 0.0;
    for k in 1..=SERIES_CAP {
        let mag = log_mag(k).exp();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * (PI * alpha * k as f64).sin() * mag;
        sum.add(term);
        abs_sum += mag;
        let next = log_mag(k + 1).exp();
        let ratio = next / mag;
        // Past the peak the magnitude ratio decreases monotonically, so a
        // ratio below 1/2 bounds the tail by a geometric series.
        if ratio < 0.5 && next / (1.0 - ratio) < 1e-13 * PI * alpha {
            let rounding = abs_sum * TERM_REL_ERR;
            if rounding > SERIES_BUDGET {
                return Err(Error::PrecisionLoss { terms: k, bound: rounding / (PI * alpha) });
            }
            return Ok((sum.value() / (PI * alpha)).clamp(0.0, 1.0));
        }
    }
    Err(Error::PrecisionLoss {
        terms: SERIES_CAP,
        bound: log_mag(SERIES_CAP + 1).exp() / (PI * alpha),
    })
}

/// Mittag-Leffler CDF from the Kanter representation of the underlying
/// positive stable law: `F(t) = 1 - (1/π) ∫_0^π exp(-A(φ) t^{1/(1-α)}) dφ`.
pub fn mittag_leffler_cdf_integral(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let scale = t.powf(1.0 / (1.0 - alpha));
    let kanter = |phi: f64| {
        let s = (alpha * phi).sin();
        (s / phi.sin()).powf(1.0 / (1.0 - alpha)) * ((1.0 - alpha) * phi).sin() / s
    };
    let r = quad::integrate(
        |phi| {
            if phi <= 0.0 {
                let a0 = alpha.powf(alpha / (1.0 - alpha)) * (1.0 - alpha);
                return (-a0 * scale).exp();
            }
            if phi >= PI {
                return 0.0;
            }
            (-kanter(phi) * scale).exp()
        },
        0.0,
        PI,
        1e-14,
        1e-14,
    )?;
    Ok((1.0 - r.value * FRAC_1_PI).clamp(0.0, 1.0))
}

/// Mittag-Leffler distribution function of order `α`; the series is used
/// where it can be certified, the integral representation elsewhere.
pub fn mittag_leffler_cdf(alpha: f64, t: f64) -> Result<f64> {
    match mittag_leffler_cdf_series(alpha, t) {
        Err(Error::PrecisionLoss { .. }) => mittag_leffler_cdf_integral(alpha, t),
        other => other,
    }
}

/// Laplace transform `E[e^{-λX}] = E_α(-λ)` of the Mittag-Leffler law: the
/// series `Σ_k (-λ)^k / Γ(1+αk)` while its terms stay small, otherwise
/// `E_α(-λ) = (sin πα/(πα)) ∫_0^∞ exp(-λ^{1/α} s^{1/α}) / (s² + 2s cos πα + 1) ds`.
pub fn mittag_leffler_laplace(alpha: f64, lambda: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("λ must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let mut sum = CompensatedSum::default();
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        let mag = (kf * lambda.ln() - ln_gamma(1.0 + alpha * kf)).exp();
        if mag > 1e3 {
            return mittag_leffler_laplace_integral(alpha, lambda);
        }
        let term = if k == 0 { 1.0 } else if k % 2 == 1 { -mag } else { mag };
        sum.add(term);
        if k > 2 && mag < 1e-17 {
            return Ok(sum.value());
        }
    }
    mittag_leffler_laplace_integral(alpha, lambda)
}

fn mittag_leffler_laplace_integral(alpha: f64, lambda: f64) -> Result<f64> {
    let t = lambda.powf(1.0 / alpha);
    let c = (PI * alpha).cos();
    let f = |s: f64| (-t * s.powf(1.0 / alpha)).exp() / (s * s + 2.0 * s * c + 1.0);
    // the exponential factor is below e^{-700} beyond s_max
    let s_max = (700.0 / t).powf(alpha).max(2.0);
    let mut acc = CompensatedSum::default();
    for (a, b) in [(0.0, 1.0), (1.0, s_max)] {
        acc.add(quad::integrate(f, a, b, 1e-15, 1e-14)?.value);
    }
    Ok((PI * alpha).sin() / (PI * alpha) * acc.value())
}

/// Both sides of `∫ e^{-λt} dF(t) = Σ_k (-λ)^k / Γ(1+αk)`; the left side is
/// computed as `λ ∫ e^{-λt} F(t) dt` by quadrature.
pub fn mittag_leffler_laplace_check(alpha: f64, lambda: f64) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("λ must be > 0, got {lambda}")));
    }
    // Beyond T the integrand is e^{-λt} up to 1 - F(T), which is checked below.
    let t_max = (40.0 / lambda).max(16.0);
    let tail_gap = 1.0 - mittag_leffler_cdf(alpha, t_max)?;
    if tail_gap > 1e-10 {
        return Err(Error::BudgetExceeded { bound: tail_gap, target: 1e-10 });
    }
    let f = |t: f64| lambda * (-lambda * t).exp() * mittag_leffler_cdf(alpha, t).unwrap_or(f64::NAN);
    let mut acc = CompensatedSum::default();
    let edges = [0.0, 1.0, 2.0, 4.0, 8.0, 0.5 * t_max, t_max];
    for w in edges.windows(2) {
        if w[1] > w[0] {
            acc.add(quad::integrate(f, w[0], w[1], 1e-13, 1e-13)?.value);
        }
    }
    acc.add((-lambda * t_max).exp());
    Ok((acc.value(), mittag_leffler_laplace(alpha, lambda)?))
}

/// Beta(α, 1-α) distribution function, i.e. the generalized arcsine law.
pub fn dynkin_lamperti_cdf(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    let k = (PI * alpha).sin() / PI;
    // ∫_0^a s^{α-1}(1-s)^{-α} ds with u = s^α.
    let left = |a: f64| -> Result<f64> {
        let r = quad::integrate(
            |u| (1.0 - u.powf(1.0 / alpha)).powf(-alpha),
            0.0,
            a.powf(alpha),
            1e-15,
            1e-14,
        )?;
        Ok(r.value / alpha)
    };
    // ∫_a^1 s^{α-1}(1-s)^{-α} ds with v = (1-s)^{1-α}.
    let right = |a: f64| -> Result<f64> {
        let beta = 1.0 - alpha;
        let r = quad::integrate(
            |v| (1.0 - v.powf(1.0 / beta)).powf(alpha - 1.0),
            0.0,
            (1.0 - a).powf(beta),
            1e-15,
            1e-14,
        )?;
        Ok(r.value / beta)
    };
    let v = if t <= 0.5 { k * left(t)? } else { 1.0 - k * right(t)? };
    Ok(v.clamp(0.0, 1.0))
}

/// Lamperti CDF in closed form: `(1/(πα)) arccot(X)` with
/// `X = (1-t)^α / (b sin(πα) t^α) + cot(πα)` and `arccot` valued in `(0, π)`.
pub fn lamperti_cdf_closed(alpha: f64, b: f64, t: f64) -> Result<f64> {
    check_lamperti(alpha, b)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    let pa = PI * alpha;
    let x = (1.0 - t).powf(alpha) / (b * pa.sin() * t.powf(alpha)) + pa.cos() / pa.sin();
    Ok((1.0f64.atan2(x) / pa).clamp(0.0, 1.0))
}

/// Lamperti CDF by quadrature of its density
/// `(b sin(πα)/π) s^{α-1}(1-s)^{α-1} / (b² s^{2α} + 2b s^α (1-s)^α cos(πα) + (1-s)^{2α})`.
pub fn lamperti_cdf_integral(alpha: f64, b: f64, t: f64) -> Result<f64> {
    check_lamperti(alpha, b)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    let pa = PI * alpha;
    let (sn, cs) = pa.sin_cos();
    let denom = |s: f64, q: f64| {
        let a = s.powf(alpha);
        let c = q.powf(alpha);
        b * b * a * a + 2.0 * b * a * c * cs + c * c
    };
    let k = b * sn / PI;
    // Left half with u = s^α: density·ds = (1/α)(1-s)^{α-1}/D du.
    let left = |hi: f64| -> Result<f64> {
        let r = quad::integrate(
            |u| {
                let s = u.powf(1.0 / alpha);
                (1.0 - s).powf(alpha - 1.0) / denom(s, 1.0 - s)
            },
            0.0,
            hi.powf(alpha),
            1e-15,
            1e-14,
        )?;
        Ok(k * r.value / alpha)
    };
    // Right half with v = (1-s)^α.
    let right = |lo: f64| -> Result<f64> {
        let r = quad::integrate(
            |v| {
                let q = v.powf(1.0 / alpha);
                (1.0 - q).powf(alpha - 1.0) / denom(1.0 - q, q)
            },
            0.0,
            (1.0 - lo).powf(alpha),
            1e-15,
            1e-14,
        )?;
        Ok(k * r.value / alpha)
    };
    let v = if t <= 0.5 { left(t)? } else { 1.0 - right(t)? };
    Ok(v.clamp(0.0, 1.0))
}

fn check_lamperti(alpha: f64, b: f64) -> Result<()> {
    check_alpha(alpha)?;
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("b must be > 0, got {b}")))
    }
}

/// Lamperti CDF, cross-validated between the closed and integral forms.
pub fn lamperti_cdf(alpha: f64, b: f64, t: f64) -> Result<f64> {
    let closed = lamperti_cdf_closed(alpha, b, t)?;
    let integral = lamperti_cdf_integral(alpha, b, t)?;
    if (closed - integral).abs() > 1e-8 {
        return Err(Error::FormMismatch { t, closed, integral });
    }
    Ok(closed)
}

/// Darling–Kac limit for Boole's map: `(2/π) ∫_0^t e^{-y²/π} dy = erf(t/√π)`.
pub fn dk_limit_cdf_boole(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        erf(t / PI.sqrt())
    }
}

/// Large-deviation constant `sin(πα)/(πα)`.
pub fn ld_rate_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((PI * alpha).sin() / (PI * alpha))
}

/// A limit law addressable from configuration files and table dumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum LimitLaw {
    MittagLeffler { alpha: f64 },
    DynkinLamperti { alpha: f64 },
    Lamperti { alpha: f64, b: f64 },
    DarlingKacBoole,
}

impl LimitLaw {
    pub fn cdf(&self, t: f64) -> Result<f64> {
        match *self {
            LimitLaw::MittagLeffler { alpha } => mittag_leffler_cdf(alpha, t),
            LimitLaw::DynkinLamperti { alpha } => dynkin_lamperti_cdf(alpha, t),
            LimitLaw::Lamperti { alpha, b } => lamperti_cdf(alpha, b, t),
            LimitLaw::DarlingKacBoole => Ok(dk_limit_cdf_boole(t)),
        }
    }

    /// Natural plotting range.
    pub fn support_hint(&self) -> (f64, f64) {
        match self {
            LimitLaw::MittagLeffler { .. } | LimitLaw::DarlingKacBoole => (0.0, 6.0),
            _ => (0.0, 1.0),
        }
    }
}

/// Mittag-Leffler law rescaled to the Darling–Kac normalization with
/// `μ(Y)`: `P(S_n^Y / a(n) <= t) -> F(t / (Γ(1+α) μ(Y)))`.
pub fn darling_kac_cdf(alpha: f64, mu_y: f64, t: f64) -> Result<f64> {
    mittag_leffler_cdf(alpha, t / (gamma(1.0 + alpha) * mu_y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ml_half_is_erf() {
        for i in 0..=60 {
            let t = i as f64 * 0.1;
            let f = mittag_leffler_cdf(0.5, t).unwrap();
            assert!((f - erf(t / 2.0)).abs() < 1e-10, "t={t}: {f}");
        }
        assert!((mittag_leffler_cdf(0.5, 2.0).unwrap() - 0.842_700_792_949_714_9).abs() < 1e-12);
    }

    #[test]
    fn ml_routes_agree() {
        for alpha in [0.2, 0.5, 0.8] {
            for t in [0.3, 1.0, 2.5] {
                let s = mittag_leffler_cdf(alpha, t).unwrap();
                let i = mittag_leffler_cdf_integral(alpha, t).unwrap();
                assert!((s - i).abs() < 1e-10, "α={alpha} t={t}: {s} vs {i}");
            }
        }
        assert!(mittag_leffler_cdf_series(0.2, 2.5).is_ok());
        // for α near 1 the terms grow like t^k / Γ((1-α)k) before decaying
        assert!(mittag_leffler_cdf_series(0.8, 2.5).is_err());
        assert!(matches!(mittag_leffler_cdf_series(0.5, 40.0), Err(Error::PrecisionLoss { .. })));
        assert!((mittag_leffler_cdf(0.5, 40.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ml_laplace_at_half() {
        // E_{1/2}(-λ) = e^{λ²} erfc(λ)
        let l: f64 = 0.7;
        let e = mittag_leffler_laplace(0.5, l).unwrap();
        let oracle = (l * l).exp() * libm::erfc(l);
        assert!((e - oracle).abs() < 1e-13);
    }

    #[test]
    fn ml_laplace_branches_agree() {
        // E_{1/2}(-λ) = e^{λ²} erfc(λ) on both sides of the series cutoff
        for l in [0.7f64, 2.0, 5.0] {
            let e = mittag_leffler_laplace(0.5, l).unwrap();
            let oracle = (l * l).exp() * libm::erfc(l);
            assert!((e / oracle - 1.0).abs() < 1e-11, "λ={l}: {e} vs {oracle}");
            let i = mittag_leffler_laplace_integral(0.5, l).unwrap();
            assert!((i / oracle - 1.0).abs() < 1e-11, "λ={l}: {i} vs {oracle}");
        }
    }

    #[test]
    fn ml_laplace_identity() {
        for &(a, l) in &[(0.4, 0.7), (0.5, 1.3), (0.25, 0.2), (0.75, 2.0)] {
            let (lhs, rhs) = mittag_leffler_laplace_check(a, l).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "α={a} λ={l}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn dynkin_lamperti_values() {
        assert!((dynkin_lamperti_cdf(0.5, 0.5).unwrap() - 0.5).abs() < 1e-13);
        assert!((dynkin_lamperti_cdf(0.5, 0.25).unwrap() - 1.0 / 3.0).abs() < 1e-13);
        let a = 0.3;
        let t = 1e-4;
        let r = dynkin_lamperti_cdf(a, t).unwrap() / (ld_rate_constant(a).unwrap() * t.powf(a));
        assert!((r - 1.0).abs() < 0.01);
        // Beta(α,1-α) CDF oracle
        for &(a, t) in &[(0.3, 0.2), (0.7, 0.9), (0.5, 0.01)] {
            let oracle = statrs::function::beta::beta_reg(a, 1.0 - a, t);
            assert!((dynkin_lamperti_cdf(a, t).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn lamperti_forms_and_reductions() {
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let arcsine = 2.0 / PI * t.sqrt().asin();
            assert!((lamperti_cdf(0.5, 1.0, t).unwrap() - arcsine).abs() < 1e-10);
        }
        for a in [0.2, 0.5, 0.9] {
            assert!((lamperti_cdf(a, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-12);
        }
        let c = lamperti_cdf_closed(0.3, 2.0, 0.4).unwrap();
        let i = lamperti_cdf_integral(0.3, 2.0, 0.4).unwrap();
        assert!((c - i).abs() < 1e-10);
    }

    #[test]
    fn dk_boole_limit() {
        assert_eq!(dk_limit_cdf_boole(0.0), 0.0);
        assert!((dk_limit_cdf_boole(50.0) - 1.0).abs() < 1e-15);
        let t = 1.3;
        let direct = quad::integrate(|y| (-y * y / PI).exp(), 0.0, t, 1e-15, 1e-15).unwrap();
        assert!((dk_limit_cdf_boole(t) - 2.0 / PI * direct.value).abs() < 1e-12);
    }

    #[test]
    fn rate_constant() {
        assert!((ld_rate_constant(0.5).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!((ld_rate_constant(1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!(ld_rate_constant(1.0).is_err());
    }
}
