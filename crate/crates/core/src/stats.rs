//! Small statistical helpers: compensated sums, binomial intervals,
//! Kolmogorov–Smirnov distance and log–log least squares.

use serde::Serialize;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

/// Wilson score interval for `k` successes out of `m` trials at normal quantile `z`.
pub fn wilson_interval(k: u64, m: u64, z: f64) -> (f64, f64) {
    if m == 0 {
        return (0.0, 1.0);
    }
    let n = m as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == m { 1.0 } else { (center + half).min(1.0) };
    (lo.min(p), hi.max(p))
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and a
/// continuous CDF. Ties are handled by evaluating both sides of each jump.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    d
}

/// Empirical CDF of `samples` at `t`: fraction of samples `<= t`.
pub fn empirical_cdf(sorted: &[f64], t: f64) -> f64 {
    sorted.partition_point(|&x| x <= t) as f64 / sorted.len() as f64
}

/// Ordinary least squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need two points for a line fit");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    LineFit {
        slope,
        intercept,
        residual_rms: (rss / n).sqrt(),
    }
}

/// Logarithmically spaced integers in `[lo, hi]`, deduplicated.
pub fn log_grid(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut v: Vec<u64> = (0..points)
        .map(|i| {
            let t = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
            (a + t * (b - a)).exp().round() as u64
        })
        .collect();
    v.dedup();
    v
}
