//! Invariant measure and renewal quantities.
//!
//! For Boole's map the density `h(x) = 1/x² + 1/(1-x)²` has antiderivative
//! equal to the real-line chart, so every measure below is a length in `z`.
//! The level sets `Y_n ∩ A_i` are intervals between consecutive inverse-branch
//! iterates of the cut points; in `z` their lengths have the closed form
//! `w - F0(w) = -1/F0(w)`, which avoids cancellation.

use serde::Serialize;
use libm::tgamma as gamma;

use crate::error::{Error, Result};
use crate::maps::{boole_chart, boole_chart_inverse, boole_real_inverse, Family, MapModel, ReferencePartition};
use crate::quad;
use crate::roots::bisect;
use crate::stats::{least_squares, CompensatedSum, LineFit};

/// Invariant density of a map family.
#[derive(Debug, Clone, Copy)]
pub struct InvariantDensity {
    family: Family,
}

impl InvariantDensity {
    pub fn of(map: &MapModel) -> Self {
        Self { family: map.family() }
    }

    fn require_closed_form(&self) -> Result<()> {
        match self.family {
            Family::Boole => Ok(()),
            Family::Thaler { .. } => Err(Error::NoClosedFormDensity("Thaler family")),
        }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        self.require_closed_form()?;
        Ok(1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x)))
    }

    pub fn antiderivative(&self, x: f64) -> Result<f64> {
        self.require_closed_form()?;
        Ok(boole_chart(x))
    }
}

/// `μ([a, b])` for `0 < a <= b < 1`.
pub fn measure_interval(map: &MapModel, a: f64, b: f64) -> Result<f64> {
    let d = InvariantDensity::of(map);
    d.require_closed_form()?;
    if !(a > 0.0 && b < 1.0 && a <= b) {
        return Err(Error::DomainError(format!(
            "measure_interval needs 0 < a <= b < 1, got [{a}, {b}]"
        )));
    }
    Ok(d.antiderivative(b)? - d.antiderivative(a)?)
}

/// Real interval with explicit endpoint closure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

/// `Y_n ∩ A_0` and `Y_n ∩ A_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelSet {
    pub n: u64,
    pub a0: Interval,
    pub a1: Interval,
}

/// Level sets in unit-interval coordinates: `[f0^n(c0), f0^{n-1}(c0))` and
/// `(f1^{n-1}(c1), f1^n(c1)]`.
pub fn y_level_set(map: &MapModel, part: &ReferencePartition, n: u64) -> Result<LevelSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("level sets start at n = 1".into()));
    }
    let (l_hi, l_lo, r_lo, r_hi) = if map.is_boole() {
        let (z0, z1) = part.chart_cuts();
        let a = iterate_real(0, z0, n - 1);
        let b = iterate_real(1, z1, n - 1);
        (
            boole_chart_inverse(a),
            boole_chart_inverse(boole_real_inverse(0, a)),
            boole_chart_inverse(b),
            boole_chart_inverse(boole_real_inverse(1, b)),
        )
    } else {
        let a = map.iterate_inverse_branch(0, part.c0, n - 1)?;
        let b = map.iterate_inverse_branch(1, part.c1, n - 1)?;
        (a, map.inverse_branch(0, a)?, b, map.inverse_branch(1, b)?)
    };
    Ok(LevelSet {
        n,
        a0: Interval { lo: l_lo, hi: l_hi, lo_closed: true, hi_closed: false },
        a1: Interval { lo: r_lo, hi: r_hi, lo_closed: false, hi_closed: true },
    })
}

fn iterate_real(branch: usize, z: f64, n: u64) -> f64 {
    (0..n).fold(z, |acc, _| boole_real_inverse(branch, acc))
}

/// Exact renewal quantities for Boole's map and a reference partition.
#[derive(Debug, Clone, Copy)]
pub struct Renewal {
    part: ReferencePartition,
    zc0: f64,
    zc1: f64,
}

/// Sequential walker over the level sets in the real-line chart.
#[derive(Debug, Clone, Copy)]
pub struct LevelWalker {
    /// Current left endpoint of `Y_n ∩ A_0`, i.e. `F0^n(zc0)`.
    pub left: f64,
    /// Current right endpoint of `Y_n ∩ A_1`, i.e. `F1^n(zc1)`.
    pub right: f64,
    pub n: u64,
}

impl LevelWalker {
    /// Advance to the next level and return `(μ(Y_n ∩ A_0), μ(Y_n ∩ A_1))`.
    #[inline]
    pub fn next_level(&mut self) -> (f64, f64) {
        self.left = boole_real_inverse(0, self.left);
        self.right = boole_real_inverse(1, self.right);
        self.n += 1;
        (-1.0 / self.left, 1.0 / self.right)
    }
}

impl Renewal {
    pub fn new(map: &MapModel, part: &ReferencePartition) -> Result<Self> {
        if !map.is_boole() {
            return Err(Error::NoClosedFormDensity("Thaler family"));
        }
        let (zc0, zc1) = part.chart_cuts();
        Ok(Self { part: *part, zc0, zc1 })
    }

    pub fn boole_canonical() -> Self {
        let map = MapModel::boole();
        let part = ReferencePartition::canonical(&map).expect("Boole has a 2-periodic point");
        Self::new(&map, &part).expect("Boole has a closed-form density")
    }

    pub fn partition(&self) -> &ReferencePartition {
        &self.part
    }

    /// Chart images of the cut points.
    pub fn chart_cuts(&self) -> (f64, f64) {
        (self.zc0, self.zc1)
    }

    pub fn mu_y(&self) -> f64 {
        self.zc1 - self.zc0
    }

    pub fn walker(&self) -> LevelWalker {
        LevelWalker { left: self.zc0, right: self.zc1, n: 0 }
    }

    /// `Y_n ∩ A_0` and `Y_n ∩ A_1` as half-open `z`-intervals `[lo, hi)` and `(lo, hi]`.
    pub fn level_z(&self, n: u64) -> ((f64, f64), (f64, f64)) {
        assert!(n >= 1);
        let a = iterate_real(0, self.zc0, n - 1);
        let b = iterate_real(1, self.zc1, n - 1);
        ((boole_real_inverse(0, a), a), (b, boole_real_inverse(1, b)))
    }

    /// `μ(Y_n) = μ(Y ∩ {φ > n})`.
    pub fn return_tail(&self, n: u64) -> f64 {
        if n == 0 {
            return self.mu_y();
        }
        let (a, b) = self.return_tails_side(n);
        a + b
    }

    /// `μ(Y_n ∩ A_i)` for `n >= 1`.
    pub fn return_tail_side(&self, n: u64, side: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter("side tails start at n = 1".into()));
        }
        let (a, b) = self.return_tails_side(n);
        Ok(if side == 0 { a } else { b })
    }

    fn return_tails_side(&self, n: u64) -> (f64, f64) {
        let mut w = self.walker();
        let mut out = (0.0, 0.0);
        for _ in 0..n {
            out = w.next_level();
        }
        out
    }

    /// `μ(Y ∩ {φ = n})`, the mass of first returns at time `n >= 1`.
    pub fn return_mass(&self, n: u64) -> f64 {
        assert!(n >= 1);
        let mut w = self.walker();
        let mut prev = self.mu_y();
        for _ in 0..n {
            let (a, b) = w.next_level();
            let cur = a + b;
            if w.n == n {
                return prev - cur;
            }
            prev = cur;
        }
        unreachable!()
    }

    pub fn wandering_table(&self, n_max: usize) -> Result<WanderingTable> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("wandering table needs N >= 1".into()));
        }
        let mut t = WanderingTable {
            mu_yn: Vec::with_capacity(n_max + 1),
            mu_yn_a0: Vec::with_capacity(n_max + 1),
            mu_yn_a1: Vec::with_capacity(n_max + 1),
            w: Vec::with_capacity(n_max + 1),
            w_a0: Vec::with_capacity(n_max + 1),
            w_a1: Vec::with_capacity(n_max + 1),
        };
        t.mu_yn.push(self.mu_y());
        t.mu_yn_a0.push(0.0);
        t.mu_yn_a1.push(0.0);
        t.w.push(0.0);
        t.w_a0.push(0.0);
        t.w_a1.push(0.0);
        let mut walker = self.walker();
        let (mut s0, mut s1) = (CompensatedSum::default(), CompensatedSum::default());
        for n in 1..=n_max {
            // w_n = μ(Y) + Σ_{k=1}^{n-1} μ(Y_k), so w_n's sides lag one level.
            let (m0, m1) = walker.next_level();
            t.w_a0.push(s0.value());
            t.w_a1.push(s1.value());
            t.w.push(self.mu_y() + s0.value() + s1.value());
            s0.add(m0);
            s1.add(m1);
            t.mu_yn_a0.push(m0);
            t.mu_yn_a1.push(m1);
            t.mu_yn.push(m0 + m1);
            debug_assert_eq!(n, t.w.len() - 1);
        }
        Ok(t)
    }

    /// `Q^Y(s) = Σ_{n>=0} e^{-ns} μ(Y_n)`.
    pub fn q_laplace(&self, s: f64) -> Result<f64> {
        let (q0, q1) = self.q_sides(s)?;
        Ok(self.mu_y() + q0 + q1)
    }

    /// `Q^{Y,A_i}(s) = Σ_{n>=1} e^{-ns} μ(Y_n ∩ A_i)`.
    pub fn q_laplace_side(&self, s: f64, side: usize) -> Result<f64> {
        let (q0, q1) = self.q_sides(s)?;
        Ok(if side == 0 { q0 } else { q1 })
    }

    fn q_sides(&self, s: f64) -> Result<(f64, f64)> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("Laplace variable must be > 0, got {s}")));
        }
        let ratio = (-s).exp();
        let geo = 1.0 / (-(-s).exp_m1());
        let mut walker = self.walker();
        let (mut q0, mut q1) = (CompensatedSum::default(), CompensatedSum::default());
        let mut weight = 1.0;
        loop {
            let (m0, m1) = walker.next_level();
            weight *= ratio;
            q0.add(weight * m0);
            q1.add(weight * m1);
            // Tail bound: Σ_{k>n} e^{-ks} μ(Y_k) <= e^{-ns} μ(Y_n) / (1 - e^{-s}).
            let partial = self.mu_y() + q0.value() + q1.value();
            if weight * (m0 + m1) * geo < 1e-12 * partial {
                break;
            }
            if walker.n % 4096 == 0 {
                // Recompute the weight to keep the geometric product exact.
                weight = (-(walker.n as f64) * s).exp();
            }
        }
        Ok((q0.value(), q1.value()))
    }

    /// Darling–Kac normalizer `a(t) = t / (Γ(1+α) Q^Y(1/t))` with `α = 1/2`.
    pub fn dk_normalizer(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!("t must be > 0, got {t}")));
        }
        Ok(t / (gamma(1.5) * self.q_laplace(1.0 / t)?))
    }
}

/// Exact renewal sequences indexed by `n = 0..=N`.
#[derive(Debug, Clone, Serialize)]
pub struct WanderingTable {
    pub mu_yn: Vec<f64>,
    pub mu_yn_a0: Vec<f64>,
    pub mu_yn_a1: Vec<f64>,
    /// `w_n`; `w_0 = 0`.
    pub w: Vec<f64>,
    pub w_a0: Vec<f64>,
    pub w_a1: Vec<f64>,
}

/// Least-squares fit of `log w_n` against `log n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFit {
    pub n_lo: usize,
    pub n_hi: usize,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

impl WanderingTable {
    pub fn len(&self) -> usize {
        self.w.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fit over `points` logarithmically spaced indices in `[n_lo, n_hi]`.
    pub fn fit(&self, n_lo: usize, n_hi: usize, points: usize) -> Result<RateFit> {
        if !(1 <= n_lo && n_lo < n_hi && n_hi <= self.len()) {
            return Err(Error::InvalidParameter(format!(
                "fit window [{n_lo}, {n_hi}] outside table of length {}",
                self.len()
            )));
        }
        let ns = crate::stats::log_grid(n_lo as u64, n_hi as u64, points.max(2));
        let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
        let y: Vec<f64> = ns.iter().map(|&n| self.w[n as usize].ln()).collect();
        let LineFit { slope, intercept, residual_rms } = least_squares(&x, &y);
        Ok(RateFit { n_lo, n_hi, slope, intercept, residual_rms })
    }

    /// `ℓ̂(t) = w_⌊t⌋ / t^{exponent}`.
    pub fn ell_hat(&self, t: f64, exponent: f64) -> f64 {
        let n = (t.floor() as usize).clamp(1, self.len());
        self.w[n] / t.powf(exponent)
    }

    /// `w_n^{Y,A_0} / w_n^Y`, the empirical side weight at index `n`.
    pub fn beta_hat(&self, n: usize) -> f64 {
        self.w_a0[n] / self.w[n]
    }
}

/// `α = 1/p`, `a = (K1/K0)^{1/p}` and the side weights `β_0, β_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThalerBeta {
    pub alpha: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub a: f64,
}

pub fn thaler_beta(map: &MapModel) -> ThalerBeta {
    use crate::maps::Side;
    let (alpha, a) = match map.family() {
        Family::Boole => (0.5, 1.0),
        Family::Thaler { p, k0, k1 } => (1.0 / p, (k1 / k0).powf(1.0 / p)),
    };
    let dl = map.derivative(map.cut(), Side::Left);
    let dr = map.derivative(map.cut(), Side::Right);
    let beta0 = dl / (dl + dr / a);
    ThalerBeta { alpha, beta0, beta1: 1.0 - beta0, a }
}

/// `u_i(x) = ∫_x^1 dy / (y - f_i(y))`, with side 1 measured as distance
/// from the fixed point at 1.
pub fn thaler_u(map: &MapModel, side: usize, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::DomainError(format!("u needs x in (0, 1], got {x}")));
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    let inv = |y: f64| if side == 0 { map.inverse_left(y) } else { map.inv_right_reflected(y) };
    // y - f(y) = e(f(y)) with e the branch excess, evaluated without cancellation.
    let (sing, sing_int): (Box<dyn Fn(f64) -> f64>, f64) = match map.family() {
        Family::Boole => {
            let s = |y: f64| 1.0 / (y * y * y) - 1.0 / (y * y) + 2.0 / y;
            let si = 0.5 * (1.0 / (x * x) - 1.0) - (1.0 / x - 1.0) - 2.0 * x.ln();
            (Box::new(s), si)
        }
        Family::Thaler { p, k0, k1 } => {
            let k = if side == 0 { k0 } else { k1 };
            let s = move |y: f64| 1.0 / (k * y.powf(p + 1.0)) + (p + 1.0) / y;
            let si = (x.powf(-p) - 1.0) / (p * k) - (p + 1.0) * x.ln();
            (Box::new(s), si)
        }
    };
    let excess = |v: f64| match map.family() {
        Family::Boole => v * v * v / (1.0 - v - v * v),
        Family::Thaler { p, k0, k1 } => (if side == 0 { k0 } else { k1 }) * v.powf(p + 1.0),
    };
    let remainder = |w: f64| {
        let y = (-w).exp();
        let fy = inv(y);
        (1.0 / excess(fy) - sing(y)) * y
    };
    let tol = 1e-11 * sing_int.abs().max(1.0);
    let r = quad::integrate(remainder, 0.0, -x.ln(), tol, 1e-12)?;
    let total = sing_int + r.value;
    if r.error > 1e-9 * total.abs().max(1.0) {
        return Err(Error::QuadratureFailure { tol: 1e-9, estimate: r.error });
    }
    Ok(total)
}

/// Inverse of [`thaler_u`] on `(0, ∞)`, by bisection in `ln x`.
pub fn thaler_u_inverse(map: &MapModel, side: usize, v: f64) -> Result<f64> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::DomainError(format!("u^{{-1}} needs v >= 0, got {v}")));
    }
    if v == 0.0 {
        return Ok(1.0);
    }
    let p = map.order();
    let k = match map.family() {
        Family::Boole => 1.0,
        Family::Thaler { k0, k1, .. } => if side == 0 { k0 } else { k1 },
    };
    // Leading-order guess u(x) ≈ x^{-p}/(pK), widened until it brackets.
    let guess = (p * k * v).powf(-1.0 / p).min(0.5).ln();
    let f = |lx: f64| thaler_u(map, side, lx.exp()).map(|u| u - v).unwrap_or(f64::NAN);
    let mut lo = guess - 1.0;
    while f(lo) < 0.0 {
        lo -= 2.0;
        if lo < -700.0 {
            return Err(Error::DomainError(format!("u^{{-1}}({v}) underflows")));
        }
    }
    let mut hi = (guess + 1.0).min(0.0);
    while f(hi) > 0.0 {
        hi = (hi + 1.0).min(0.0);
    }
    let lx = bisect(f, lo, hi, 1e-14).ok_or(Error::NotFound)?;
    Ok(lx.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn boole() -> (MapModel, ReferencePartition, Renewal) {
        let m = MapModel::boole();
        let p = ReferencePartition::canonical(&m).unwrap();
        let r = Renewal::new(&m, &p).unwrap();
        (m, p, r)
    }

    #[test]
    fn measure_of_y_is_sqrt2() {
        let (m, p, r) = boole();
        assert!((measure_interval(&m, p.c0, p.c1).unwrap() - SQRT_2).abs() < 1e-12);
        assert!((r.mu_y() - SQRT_2).abs() < 1e-12);
        assert_eq!(measure_interval(&m, 0.3, 0.3).unwrap(), 0.0);
        let v = measure_interval(&m, 0.25, 0.75).unwrap();
        assert!((v - 16.0 / 3.0).abs() < 1e-12);
        let h = InvariantDensity::of(&m);
        let q = quad::integrate(|x| h.density(x).unwrap(), 0.25, 0.75, 1e-13, 1e-13).unwrap();
        assert!((q.value - v).abs() < 1e-11);
    }

    #[test]
    fn thaler_measure_is_rejected() {
        let m = MapModel::thaler(2.0, 3.0).unwrap();
        assert!(matches!(measure_interval(&m, 0.2, 0.4), Err(Error::NoClosedFormDensity(_))));
        let p = ReferencePartition::canonical(&m).unwrap();
        assert!(Renewal::new(&m, &p).is_err());
    }

    #[test]
    fn measure_domain_errors() {
        let m = MapModel::boole();
        assert!(matches!(measure_interval(&m, 0.0, 0.5), Err(Error::DomainError(_))));
        assert!(matches!(measure_interval(&m, 0.5, 1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn level_set_one_boole() {
        let (m, p, _) = boole();
        let l = y_level_set(&m, &p, 1).unwrap();
        assert!((l.a1.lo - (1.0 - p.gamma)).abs() < 1e-14);
        assert!((l.a1.hi - m.inverse_branch(1, 1.0 - p.gamma).unwrap()).abs() < 1e-13);
        assert!((l.a0.hi - p.c0).abs() < 1e-15);
        for i in 1..100 {
            let x = l.a1.lo + (l.a1.hi - l.a1.lo) * i as f64 / 100.0;
            assert_eq!(p.region(m.apply(x)), crate::maps::Region::Y);
        }
    }

    #[test]
    fn level_set_endpoints_map_to_cut() {
        let (m, p, _) = boole();
        for n in [1u64, 2, 5, 20] {
            let l = y_level_set(&m, &p, n).unwrap();
            let mut x = l.a0.lo;
            for _ in 0..n {
                x = m.apply(x);
            }
            assert!((x - p.c0).abs() < 1e-10, "n={n}: {x}");
        }
        let t = MapModel::thaler(2.0, 3.0).unwrap();
        let tp = ReferencePartition::canonical(&t).unwrap();
        let l = y_level_set(&t, &tp, 4).unwrap();
        let mut x = l.a0.lo;
        for _ in 0..4 {
            x = t.apply(x);
        }
        assert!((x - tp.c0).abs() < 1e-10);
    }

    #[test]
    fn level_sets_match_first_entry_times() {
        let (m, p, _) = boole();
        let levels: Vec<LevelSet> = (1..=50).map(|n| y_level_set(&m, &p, n).unwrap()).collect();
        let mut hits = 0;
        for i in 0..10_000 {
            let x = 0.002 + 0.996 * (i as f64 + 0.5) / 10_000.0;
            if p.region(x) == crate::maps::Region::Y {
                assert!(levels.iter().all(|l| !l.a0.contains(x) && !l.a1.contains(x)));
                continue;
            }
            let mut y = x;
            let mut entry = None;
            for k in 1..=50u64 {
                y = m.apply(y);
                if p.region(y) == crate::maps::Region::Y {
                    entry = Some(k);
                    break;
                }
            }
            let inside: Vec<u64> = levels
                .iter()
                .filter(|l| l.a0.contains(x) || l.a1.contains(x))
                .map(|l| l.n)
                .collect();
            match entry {
                Some(k) => {
                    assert_eq!(inside, vec![k], "x={x}");
                    hits += 1;
                }
                None => assert!(inside.is_empty()),
            }
        }
        assert!(hits > 1000);
    }

    #[test]
    fn tails_decrease_and_sum() {
        let (_, _, r) = boole();
        assert!((r.return_tail(0) - SQRT_2).abs() < 1e-12);
        let t = r.wandering_table(10_000).unwrap();
        // For Y = [γ, Tγ] no point returns at time 1, so μ(Y_1) = μ(Y).
        assert!((t.mu_yn[1] - SQRT_2).abs() < 1e-12);
        for n in 1..=10_000 {
            if n >= 2 {
                assert!(t.mu_yn[n] < t.mu_yn[n - 1]);
            }
            assert!((t.w[n] - t.w[n - 1] - t.mu_yn[n - 1]).abs() < 1e-9 * t.w[n]);
            assert!((t.w[n] - (SQRT_2 + t.w_a0[n] + t.w_a1[n])).abs() < 1e-12 * t.w[n]);
        }
        assert!((t.w[1] - SQRT_2).abs() < 1e-12);
        assert!((r.return_tail(37) - t.mu_yn[37]).abs() < 1e-15);
        assert!((r.return_mass(5) - (t.mu_yn[4] - t.mu_yn[5])).abs() < 1e-15);
        // closed-form telescoping of the side rate
        let (z0, _) = r.chart_cuts();
        let n = 10_000;
        let f = (0..n - 1).fold(z0, |a, _| boole_real_inverse(0, a));
        assert!((t.w_a0[n] - (z0 - f)).abs() < 1e-9 * t.w_a0[n]);
    }

    #[test]
    fn laplace_sides_sum() {
        let (_, _, r) = boole();
        for s in [0.01, 0.3, 2.0] {
            let q = r.q_laplace(s).unwrap();
            let q0 = r.q_laplace_side(s, 0).unwrap();
            let q1 = r.q_laplace_side(s, 1).unwrap();
            assert!(q >= SQRT_2);
            assert!((q - SQRT_2 - q0 - q1).abs() < 1e-10);
            assert!((q0 - q1).abs() < 1e-10 * q);
        }
        assert!(r.q_laplace(0.0).is_err());
    }

    #[test]
    fn dk_normalizer_scaling() {
        let (_, _, r) = boole();
        let vals: Vec<f64> = [1e4, 1e5, 1e6].iter().map(|&t| r.dk_normalizer(t).unwrap() / t.sqrt()).collect();
        let max = vals.iter().cloned().fold(f64::MIN, f64::max);
        let min = vals.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min - 1.0 < 0.05);
        assert!((vals[2] - SQRT_2 / std::f64::consts::PI).abs() < 0.01);
    }

    #[test]
    fn beta_formula() {
        let b = thaler_beta(&MapModel::thaler(2.0, 4.0).unwrap());
        assert!((b.beta0 - 0.5).abs() < 1e-12 && (b.a - 1.0).abs() < 1e-12);
        let b = thaler_beta(&MapModel::thaler(2.0, 3.0).unwrap());
        assert!((b.beta0 + b.beta1 - 1.0).abs() < 1e-15 && b.beta0 != 0.5);
        assert_eq!(thaler_beta(&MapModel::thaler(3.0, 1.0).unwrap()).alpha, 1.0 / 3.0);
    }

    #[test]
    fn u0_asymptotics() {
        let m = MapModel::thaler(2.0, 4.0).unwrap();
        assert_eq!(thaler_u(&m, 0, 1.0).unwrap(), 0.0);
        let x = 1e-3;
        let u = thaler_u(&m, 0, x).unwrap();
        assert!((u * 2.0 * 4.0 * x * x - 1.0).abs() < 0.02);
        // direct quadrature oracle at a moderate point
        let direct = quad::integrate(|y| 1.0 / (y - m.inverse_left(y)), 0.2, 1.0, 1e-12, 1e-12).unwrap();
        assert!((thaler_u(&m, 0, 0.2).unwrap() - direct.value).abs() < 1e-9);
        let b = MapModel::boole();
        let direct = quad::integrate(|y| 1.0 / (y - b.inverse_left(y)), 0.05, 1.0, 1e-12, 1e-12).unwrap();
        assert!((thaler_u(&b, 0, 0.05).unwrap() - direct.value).abs() < 1e-8);
    }

    #[test]
    fn u_inverse_round_trip() {
        let m = MapModel::thaler(1.5, 2.0).unwrap();
        for v in [0.5, 10.0, 1e5] {
            for side in 0..2 {
                let x = thaler_u_inverse(&m, side, v).unwrap();
                let u = thaler_u(&m, side, x).unwrap();
                assert!((u / v - 1.0).abs() < 1e-9, "{v} {u}");
            }
        }
        let a = thaler_u_inverse(&m, 0, 10.0).unwrap();
        let b = thaler_u_inverse(&m, 0, 20.0).unwrap();
        assert!(b < a);
    }
}
