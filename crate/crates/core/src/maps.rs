//! Two-branch interval maps with indifferent fixed points at 0 and 1.
//!
//! Two families are provided: Boole's transformation conjugated to `[0,1]`
//! and a polynomial family `x + K0 x^{p+1}` / `1 - g1(1-x)` with an adjustable
//! asymmetry. Boole also has a real-line chart `z = 1/(1-x) - 1/x`, in which
//! the map becomes `z - 1/z` and the invariant measure becomes Lebesgue.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect, newton_increasing};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Boole,
    /// `T0(x) = x + k0 x^{p+1}` on `[0,c]`, `T1(x) = 1 - g1(1-x)` on `(c,1]`
    /// with `g1(u) = u + k1 u^{p+1}`.
    Thaler { p: f64, k0: f64, k1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    UnitInterval,
    RealLine,
}

/// One-sided selector for derivatives at the cut point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapModel {
    family: Family,
    c: f64,
    chart: Chart,
}

/// Result of the 2-periodic point scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPeriodic {
    pub gamma: f64,
    /// Number of sign changes found by the scan; more than one means the
    /// reported point is the leftmost of several.
    pub multiplicity: usize,
}

const INV_TOL: f64 = 1e-14;

/// `x^{p+1}`, with fast paths for integer and half-integer exponents.
#[inline]
pub(crate) fn pow_p1(x: f64, p: f64) -> f64 {
    let e = p + 1.0;
    if e == e.trunc() && e <= 32.0 {
        x.powi(e as i32)
    } else if 2.0 * e == (2.0 * e).trunc() && e <= 32.0 {
        x.powi(e.trunc() as i32) * x.sqrt()
    } else {
        x.powf(e)
    }
}

impl MapModel {
    pub fn boole() -> Self {
        Self {
            family: Family::Boole,
            c: 0.5,
            chart: Chart::RealLine,
        }
    }

    /// Polynomial family with exponent `p > 1` and left coefficient `k0 > 0`.
    /// The cut point and the right coefficient are derived so both branches
    /// are onto.
    pub fn thaler(p: f64, k0: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("p must be > 1, got {p}")));
        }
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::InvalidParameter(format!("K0 must be > 0, got {k0}")));
        }
        let c = bisect(|x| x + k0 * x.powf(p + 1.0) - 1.0, 0.0, 1.0, 1e-17)
            .ok_or_else(|| Error::InvalidParameter("no cut point".into()))?;
        let u = 1.0 - c;
        let k1 = c / u.powf(p + 1.0);
        Ok(Self {
            family: Family::Thaler { p, k0, k1 },
            c,
            chart: Chart::UnitInterval,
        })
    }

    pub fn with_chart(mut self, chart: Chart) -> Result<Self> {
        if chart == Chart::RealLine && self.family != Family::Boole {
            return Err(Error::InvalidParameter(
                "the real-line chart exists only for Boole's map".into(),
            ));
        }
        self.chart = chart;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn cut(&self) -> f64 {
        self.c
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn is_boole(&self) -> bool {
        self.family == Family::Boole
    }

    /// Tail exponent `α` of the return time (1/2 for Boole, 1/p otherwise).
    pub fn alpha(&self) -> f64 {
        match self.family {
            Family::Boole => 0.5,
            Family::Thaler { p, .. } => 1.0 / p,
        }
    }

    /// Exponent `p` of the indifferent fixed points (Boole: `Tx - x ~ x^3`).
    pub fn order(&self) -> f64 {
        match self.family {
            Family::Boole => 2.0,
            Family::Thaler { p, .. } => p,
        }
    }

    /// `T0(x)` for `x` in `[0, c]`.
    pub fn left(&self, x: f64) -> f64 {
        match self.family {
            Family::Boole => x + x * x * x / (1.0 - x - x * x),
            Family::Thaler { p, k0, .. } => x + k0 * pow_p1(x, p),
        }
    }

    /// `1 - T0(x)` for `x` in `[0, c]`, without cancellation near `c`.
    pub fn left_complement(&self, x: f64) -> f64 {
        match self.family {
            Family::Boole => (1.0 - 2.0 * x) / (1.0 - x - x * x),
            Family::Thaler { p, k0, .. } => {
                let c = self.c;
                let d = c - x;
                // c^{p+1} - x^{p+1} = -c^{p+1} expm1((p+1) ln(1 - d/c))
                d - k0 * c.powf(p + 1.0) * ((p + 1.0) * (-d / c).ln_1p()).exp_m1()
            }
        }
    }

    /// `g1(u) = 1 - T1(1 - u)` for `u` in `[0, 1-c]`.
    pub fn right_reflected(&self, u: f64) -> f64 {
        match self.family {
            Family::Boole => self.left(u),
            Family::Thaler { p, k1, .. } => u + k1 * pow_p1(u, p),
        }
    }

    /// `T1(1 - u) = 1 - g1(u)` for `u` in `[0, 1-c]`, without cancellation
    /// near `u = 1-c`.
    pub fn right_complement(&self, u: f64) -> f64 {
        match self.family {
            Family::Boole => self.left_complement(u),
            Family::Thaler { p, k1, .. } => {
                let b = 1.0 - self.c;
                let d = b - u;
                d - k1 * b.powf(p + 1.0) * ((p + 1.0) * (-d / b).ln_1p()).exp_m1()
            }
        }
    }

    /// `T(x)` on `[0,1]`; the cut point belongs to the left branch.
    pub fn apply(&self, x: f64) -> f64 {
        if x <= self.c {
            self.left(x)
        } else {
            1.0 - self.right_reflected(1.0 - x)
        }
    }

    /// `T'(x)`; `side` only matters at the cut point.
    pub fn derivative(&self, x: f64, side: Side) -> f64 {
        let use_left = x < self.c || (x == self.c && side == Side::Left);
        match self.family {
            Family::Boole => {
                let t = if use_left { x } else { 1.0 - x };
                let d = 1.0 - t - t * t;
                (1.0 - 2.0 * t + 2.0 * t * t) / (d * d)
            }
            Family::Thaler { p, k0, k1 } => {
                if use_left {
                    1.0 + (p + 1.0) * k0 * x.powf(p)
                } else {
                    1.0 + (p + 1.0) * k1 * (1.0 - x).powf(p)
                }
            }
        }
    }

    /// Inverse `f_i` of branch `i`; `f_0` maps `[0,1]` onto `[0,c]`, `f_1`
    /// maps `[0,1]` onto `[c,1]`.
    pub fn inverse_branch(&self, branch: usize, y: f64) -> Result<f64> {
        if branch > 1 {
            return Err(Error::InvalidParameter(format!("branch {branch}")));
        }
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::OutOfRange { branch, value: y });
        }
        Ok(match branch {
            0 => self.inv_left(y),
            _ => 1.0 - self.inv_right_reflected(1.0 - y),
        })
    }

    /// `f_0(y)`.
    fn inv_left(&self, y: f64) -> f64 {
        match self.family {
            Family::Boole => 2.0 * y / ((1.0 + y) + (1.0 - 2.0 * y + 5.0 * y * y).sqrt()),
            Family::Thaler { p, k0, .. } => {
                if y == 0.0 {
                    return 0.0;
                }
                if y == 1.0 {
                    return self.c;
                }
                newton_increasing(
                    |x| x + k0 * x.powf(p + 1.0) - y,
                    |x| 1.0 + (p + 1.0) * k0 * x.powf(p),
                    0.0,
                    y.min(self.c),
                    y.min(self.c),
                    INV_TOL,
                )
            }
        }
    }

    /// `g1^{-1}(v)`, i.e. `1 - f_1(1 - v)`.
    pub fn inv_right_reflected(&self, v: f64) -> f64 {
        match self.family {
            Family::Boole => self.inv_left(v),
            Family::Thaler { p, k1, .. } => {
                let b = 1.0 - self.c;
                if v == 0.0 {
                    return 0.0;
                }
                if v == 1.0 {
                    return b;
                }
                newton_increasing(
                    |u| u + k1 * u.powf(p + 1.0) - v,
                    |u| 1.0 + (p + 1.0) * k1 * u.powf(p),
                    0.0,
                    v.min(b),
                    v.min(b),
                    INV_TOL,
                )
            }
        }
    }

    /// `f_0(y)` directly, for `y` in `[0,1]`.
    pub fn inverse_left(&self, y: f64) -> f64 {
        self.inv_left(y)
    }

    /// `f_branch^n(y)`.
    pub fn iterate_inverse_branch(&self, branch: usize, y: f64, n: u64) -> Result<f64> {
        self.inverse_branch(branch, y)?;
        Ok(match branch {
            0 => (0..n).fold(y, |acc, _| self.inv_left(acc)),
            _ => 1.0 - (0..n).fold(1.0 - y, |acc, _| self.inv_right_reflected(acc)),
        })
    }

    /// 2-periodic point in `(0, c)` with `Tγ > c`, located by a sign-change
    /// scan of `T²x - x` followed by bisection.
    pub fn find_two_periodic_point(&self) -> Result<TwoPeriodic> {
        const SCAN: usize = 4096;
        let g = |x: f64| self.apply(self.apply(x)) - x;
        let mut found: Option<(f64, f64)> = None;
        let mut count = 0;
        let mut prev: Option<(f64, f64)> = None;
        for i in 1..=SCAN {
            let x = self.c * i as f64 / (SCAN + 1) as f64;
            if self.apply(x) <= self.c {
                prev = None;
                continue;
            }
            let gx = g(x);
            if let Some((px, pg)) = prev {
                if pg < 0.0 && gx >= 0.0 {
                    count += 1;
                    found.get_or_insert((px, x));
                }
            }
            prev = Some((x, gx));
        }
        // The scan's last point sits below c; T²(c) - c = 1 - c > 0 closes
        // the final bracket.
        if let Some((px, pg)) = prev {
            if pg < 0.0 {
                count += 1;
                found.get_or_insert((px, self.c));
            }
        }
        let (lo, hi) = found.ok_or(Error::NotFound)?;
        let gamma = if self.is_boole() {
            std::f64::consts::SQRT_2 - 1.0
        } else {
            bisect(g, lo, hi, 1e-17).ok_or(Error::NotFound)?
        };
        Ok(TwoPeriodic {
            gamma,
            multiplicity: count,
        })
    }
}

/// Boole chart `z = 1/(1-x) - 1/x`.
pub fn boole_chart(x: f64) -> f64 {
    (2.0 * x - 1.0) / (x * (1.0 - x))
}

/// Inverse of [`boole_chart`].
pub fn boole_chart_inverse(z: f64) -> f64 {
    if z <= 0.0 {
        2.0 / ((2.0 - z) + (z * z + 4.0).sqrt())
    } else {
        1.0 - 2.0 / ((2.0 + z) + (z * z + 4.0).sqrt())
    }
}

/// `x` for `z <= 0` and `1 - x` for `z > 0`, both without cancellation.
pub fn boole_chart_inverse_distance(z: f64) -> f64 {
    let a = z.abs();
    2.0 / ((2.0 + a) + (a * a + 4.0).sqrt())
}

/// Boole's map on the real line.
#[inline]
pub fn boole_real(z: f64) -> f64 {
    z - 1.0 / z
}

/// Derivative of [`boole_real`].
#[inline]
pub fn boole_real_derivative(z: f64) -> f64 {
    1.0 + 1.0 / (z * z)
}

/// Inverse branch of `z - 1/z`: branch 0 lands in `z < 0`, branch 1 in `z > 0`.
pub fn boole_real_inverse(branch: usize, w: f64) -> f64 {
    let r = (w * w + 4.0).sqrt();
    if branch == 0 {
        if w > 0.0 {
            -2.0 / (r + w)
        } else {
            0.5 * (w - r)
        }
    } else if w < 0.0 {
        2.0 / (r - w)
    } else {
        0.5 * (w + r)
    }
}

/// The three regions of the reference partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    A0,
    Y,
    A1,
}

/// `A0 = [0,c0)`, `Y = [c0,c1]`, `A1 = (c1,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferencePartition {
    pub c0: f64,
    pub c1: f64,
    pub gamma: f64,
}

impl ReferencePartition {
    /// `Y = [γ, Tγ]`.
    pub fn canonical(map: &MapModel) -> Result<Self> {
        let gamma = map.find_two_periodic_point()?.gamma;
        let c1 = if map.is_boole() { 1.0 - gamma } else { map.apply(gamma) };
        Ok(Self { c0: gamma, c1, gamma })
    }

    pub fn new(map: &MapModel, c0: f64, c1: f64) -> Result<Self> {
        let canon = Self::canonical(map)?;
        // Tolerances allow manually entered decimal expansions of γ and Tγ.
        let slack = 1e-12;
        if !(c0 > 0.0 && c0 <= canon.gamma + slack) {
            return Err(Error::InvalidParameter(format!(
                "c0 must lie in (0, γ] with γ = {}, got {c0}",
                canon.gamma
            )));
        }
        if !(c1 < 1.0 && c1 >= canon.c1 - slack) {
            return Err(Error::InvalidParameter(format!(
                "c1 must lie in [Tγ, 1) with Tγ = {}, got {c1}",
                canon.c1
            )));
        }
        Ok(Self {
            c0: c0.min(canon.gamma),
            c1: c1.max(canon.c1),
            gamma: canon.gamma,
        })
    }

    pub fn region(&self, x: f64) -> Region {
        if x < self.c0 {
            Region::A0
        } else if x <= self.c1 {
            Region::Y
        } else {
            Region::A1
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.c0 == self.gamma
    }

    /// Cut points in the Boole real-line chart.
    pub fn chart_cuts(&self) -> (f64, f64) {
        (boole_chart(self.c0), boole_chart(self.c1))
    }
}
