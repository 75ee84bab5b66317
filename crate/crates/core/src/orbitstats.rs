//! Occupation times, last visits and return times along orbits.
//!
//! With `Y = [c0, c1]`:
//! `S_n^A(x) = #{1 <= k <= n : T^k x ∈ A}` and
//! `Z_n^Y(x) = max{0 <= k <= n : T^k x ∈ Y}` with `max ∅ = 0`,
//! so `Z_n = 0` both when the orbit never visits `Y` in `1..=n` and when it
//! only sits there at time 0.
//!
//! Two state encodings are used. Boole in the real-line chart iterates
//! `z - 1/z` directly. Everything else uses a signed encoding of `[0,1]`:
//! a state `s` with the sign bit clear means `x = s <= 1/2`, a state with the
//! sign bit set means `1 - x = -s <= 1/2`. Both fixed points are then
//! represented at full relative precision.
//!
//! An iterate close enough to a fixed point stops moving in floating point
//! (`|z| > ~1e8` for Boole, `K0 x^p < 2^-53` for the polynomial family). The
//! true orbit needs more than ~10^15 steps to leave such a neighbourhood, so
//! a stalled state gives exact statistics for any horizon used here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{boole_chart, boole_chart_inverse, Chart, MapModel, ReferencePartition, Region};

/// Statistics at a single checkpoint `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub s_y: u64,
    pub z_y: u64,
    pub s_a0: u64,
    pub s_a1: u64,
}

/// First return (or entry) time to `Y`, possibly censored at a cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReturnTime {
    Time(u64),
    Overflow(u64),
}

impl ReturnTime {
    /// Whether `φ > n` is known to hold.
    pub fn exceeds(&self, n: u64) -> bool {
        match *self {
            ReturnTime::Time(k) => k > n,
            ReturnTime::Overflow(cap) => {
                assert!(n <= cap, "tail at {n} beyond the cap {cap}");
                true
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub x0: f64,
    pub records: Vec<Checkpoint>,
    /// `min{k >= 1 : T^k x0 ∈ Y}`, censored at the last checkpoint.
    pub phi: ReturnTime,
}

/// A starting point, either on `[0,1]` or in Boole's real-line chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Unit(f64),
    Chart(f64),
}

impl Point {
    pub fn unit(&self) -> f64 {
        match *self {
            Point::Unit(x) => x,
            Point::Chart(z) => boole_chart_inverse(z),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Real { zc0: f64, zc1: f64 },
    Unit { c0: f64, c1: f64, d0: f64, d1: f64 },
}

/// Number of orbits advanced together by [`OrbitEngine::simulate_batch`].
pub const LANES: usize = 8;

/// Orbit iterator for one map and partition.
#[derive(Debug, Clone, Copy)]
pub struct OrbitEngine {
    map: MapModel,
    part: ReferencePartition,
    kind: Kind,
}

fn check_checkpoints(checkpoints: &[u64]) -> Result<u64> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidParameter("no checkpoints".into()));
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be positive and strictly increasing".into(),
        ));
    }
    Ok(*checkpoints.last().unwrap())
}

#[inline]
fn from_image(t: f64) -> f64 {
    if t <= 0.5 {
        t
    } else {
        -(1.0 - t)
    }
}

#[inline]
fn from_complement(r: f64) -> f64 {
    if r < 0.5 {
        -r
    } else {
        1.0 - r
    }
}

impl OrbitEngine {
    /// Iterates in the chart selected on `map`.
    pub fn new(map: &MapModel, part: &ReferencePartition) -> Self {
        let kind = match map.chart() {
            Chart::RealLine => {
                let (zc0, zc1) = part.chart_cuts();
                Kind::Real { zc0, zc1 }
            }
            Chart::UnitInterval => Kind::Unit {
                c0: part.c0,
                c1: part.c1,
                d0: 1.0 - part.c0,
                d1: 1.0 - part.c1,
            },
        };
        Self { map: *map, part: *part, kind }
    }

    pub fn map(&self) -> &MapModel {
        &self.map
    }

    pub fn partition(&self) -> &ReferencePartition {
        &self.part
    }

    /// Native state for a starting point.
    pub fn encode(&self, p: Point) -> Result<f64> {
        let bad = |v: f64| Error::DomainError(format!("starting point {v} outside [0,1]"));
        match (self.kind, p) {
            (Kind::Real { .. }, Point::Chart(z)) => {
                if z.is_nan() {
                    return Err(bad(z));
                }
                Ok(z)
            }
            (Kind::Real { .. }, Point::Unit(x)) => {
                if !(0.0..=1.0).contains(&x) {
                    return Err(bad(x));
                }
                Ok(boole_chart(x))
            }
            (Kind::Unit { .. }, p) => {
                let x = p.unit();
                if !(0.0..=1.0).contains(&x) {
                    return Err(bad(x));
                }
                Ok(match p {
                    Point::Chart(z) if z > 0.0 => {
                        -crate::maps::boole_chart_inverse_distance(z)
                    }
                    _ => from_image(x),
                })
            }
        }
    }

    /// Point on `[0,1]` represented by a native state.
    pub fn decode(&self, s: f64) -> f64 {
        match self.kind {
            Kind::Real { .. } => boole_chart_inverse(s),
            Kind::Unit { .. } => {
                if s.is_sign_negative() {
                    1.0 - (-s)
                } else {
                    s
                }
            }
        }
    }

    #[inline]
    pub fn region(&self, s: f64) -> Region {
        match self.kind {
            Kind::Real { zc0, zc1 } => {
                if s < zc0 {
                    Region::A0
                } else if s <= zc1 {
                    Region::Y
                } else {
                    Region::A1
                }
            }
            Kind::Unit { c0, c1, d0, d1 } => {
                if s.is_sign_negative() {
                    let u = -s;
                    if u < d1 {
                        Region::A1
                    } else if u > d0 {
                        Region::A0
                    } else {
                        Region::Y
                    }
                } else if s < c0 {
                    Region::A0
                } else if s > c1 {
                    Region::A1
                } else {
                    Region::Y
                }
            }
        }
    }

    /// One application of the map to a native state.
    #[inline]
    pub fn step(&self, s: f64) -> f64 {
        match self.kind {
            Kind::Real { .. } => s - 1.0 / s,
            Kind::Unit { .. } => self.step_unit(s),
        }
    }

    fn step_unit(&self, s: f64) -> f64 {
        let m = &self.map;
        let c = m.cut();
        let left = |x: f64| {
            if x > 0.5 * c {
                from_complement(m.left_complement(x))
            } else {
                from_image(m.left(x))
            }
        };
        let b = 1.0 - c;
        let right = |u: f64| {
            if u > 0.5 * b {
                from_image(m.right_complement(u))
            } else {
                from_complement(m.right_reflected(u))
            }
        };
        if s.is_sign_negative() {
            let u = -s;
            if u < b {
                right(u)
            } else {
                left(1.0 - u)
            }
        } else if s <= c {
            left(s)
        } else {
            right(1.0 - s)
        }
    }

    fn escaped(&self, s: f64) -> bool {
        match self.kind {
            Kind::Real { .. } => !s.is_finite(),
            Kind::Unit { .. } => !(s.abs() <= 0.5),
        }
    }

    /// Single-orbit statistics at each checkpoint.
    pub fn simulate(&self, p: Point, checkpoints: &[u64]) -> Result<OrbitSummary> {
        let n_max = check_checkpoints(checkpoints)?;
        let mut s = self.encode(p)?;
        let x0 = p.unit();
        let mut rec = Checkpoint::default();
        let mut phi = None;
        let mut records = Vec::with_capacity(checkpoints.len());
        let mut next = 0;
        for k in 1..=n_max {
            s = self.step(s);
            match self.region(s) {
                Region::Y => {
                    rec.s_y += 1;
                    rec.z_y = k;
                    phi.get_or_insert(k);
                }
                Region::A0 => rec.s_a0 += 1,
                Region::A1 => rec.s_a1 += 1,
            }
            if k == checkpoints[next] {
                if self.escaped(s) {
                    return Err(Error::NumericEscape { step: k });
                }
                rec.n = k;
                records.push(rec);
                next += 1;
            }
        }
        Ok(OrbitSummary {
            x0,
            records,
            phi: phi.map_or(ReturnTime::Overflow(n_max), ReturnTime::Time),
        })
    }

    /// `min{k >= 1 : T^k x ∈ Y}` up to `cap`; `x0` must lie in `Y`.
    pub fn first_return_time(&self, p: Point, cap: u64) -> Result<ReturnTime> {
        if cap == 0 {
            return Err(Error::InvalidParameter("cap must be >= 1".into()));
        }
        let s = self.encode(p)?;
        if self.region(s) != Region::Y {
            return Err(Error::DomainError(format!("{} is not in Y", p.unit())));
        }
        self.entry_time(s, cap)
    }

    /// `min{k >= 1 : T^k s ∈ Y}` for any native state.
    pub fn entry_time(&self, mut s: f64, cap: u64) -> Result<ReturnTime> {
        for k in 1..=cap {
            s = self.step(s);
            if self.region(s) == Region::Y {
                return Ok(ReturnTime::Time(k));
            }
        }
        if self.escaped(s) {
            return Err(Error::NumericEscape { step: cap });
        }
        Ok(ReturnTime::Overflow(cap))
    }

    /// Checkpoint records for many native starting states. Boole's
    /// real-line chart runs [`LANES`] orbits in lockstep.
    pub fn simulate_batch(&self, starts: &[f64], checkpoints: &[u64]) -> Result<Vec<Vec<Checkpoint>>> {
        let n_max = check_checkpoints(checkpoints)?;
        match self.kind {
            Kind::Real { zc0, zc1 } if n_max < u32::MAX as u64 => {
                let mut out = Vec::with_capacity(starts.len());
                for chunk in starts.chunks(LANES) {
                    lanes_real(zc0, zc1, chunk, checkpoints, &mut out)?;
                }
                Ok(out)
            }
            _ => starts
                .iter()
                .map(|&s| self.simulate_native(s, checkpoints))
                .collect(),
        }
    }

    fn simulate_native(&self, mut s: f64, checkpoints: &[u64]) -> Result<Vec<Checkpoint>> {
        let mut rec = Checkpoint::default();
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut k = 0;
        for &n in checkpoints {
            while k < n {
                k += 1;
                s = self.step(s);
                match self.region(s) {
                    Region::Y => {
                        rec.s_y += 1;
                        rec.z_y = k;
                    }
                    Region::A0 => rec.s_a0 += 1,
                    Region::A1 => rec.s_a1 += 1,
                }
            }
            if self.escaped(s) {
                return Err(Error::NumericEscape { step: n });
            }
            rec.n = n;
            out.push(rec);
        }
        Ok(out)
    }
}

/// Lockstep kernel; the inner loop is branch-free so it vectorizes.
fn lanes_real(zc0: f64, zc1: f64, chunk: &[f64], checkpoints: &[u64], out: &mut Vec<Vec<Checkpoint>>) -> Result<()> {
    let live = chunk.len();
    // Padding lanes sit on the 2-periodic orbit and are discarded.
    let mut z = [-std::f64::consts::FRAC_1_SQRT_2; LANES];
    z[..live].copy_from_slice(chunk);
    let mut sy = [0u32; LANES];
    let mut sa0 = [0u32; LANES];
    let mut last = [0u32; LANES];
    let mut recs: Vec<Vec<Checkpoint>> = (0..live).map(|_| Vec::with_capacity(checkpoints.len())).collect();
    let mut k = 0u32;
    for &n in checkpoints {
        let n32 = n as u32;
        while k < n32 {
            k += 1;
            for l in 0..LANES {
                let v = z[l] - 1.0 / z[l];
                z[l] = v;
                let in_y = (v >= zc0) & (v <= zc1);
                sy[l] += in_y as u32;
                sa0[l] += (v < zc0) as u32;
                last[l] = if in_y { k } else { last[l] };
            }
        }
        for l in 0..live {
            if !z[l].is_finite() {
                return Err(Error::NumericEscape { step: n });
            }
            let (s_y, s_a0) = (sy[l] as u64, sa0[l] as u64);
            recs[l].push(Checkpoint {
                n,
                s_y,
                z_y: last[l] as u64,
                s_a0,
                s_a1: n - s_y - s_a0,
            });
        }
    }
    out.extend(recs);
    Ok(())
}

/// Statistics of the orbit of `x0 ∈ [0,1]` at each checkpoint.
pub fn simulate_orbit(map: &MapModel, part: &ReferencePartition, x0: f64, checkpoints: &[u64]) -> Result<OrbitSummary> {
    OrbitEngine::new(map, part).simulate(Point::Unit(x0), checkpoints)
}

/// First return time of `x0 ∈ Y`, censored at `cap`.
pub fn first_return_time(map: &MapModel, part: &ReferencePartition, x0: f64, cap: u64) -> Result<ReturnTime> {
    OrbitEngine::new(map, part).first_return_time(Point::Unit(x0), cap)
}
