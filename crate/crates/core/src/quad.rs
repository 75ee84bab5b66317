//! Quadrature rules used by the measure and special-function layers.
//!
//! Adaptive Gauss–Kronrod (7/15) with global bisection, fixed Gauss–Legendre
//! panels, and Clenshaw–Curtis weights on Chebyshev extreme points.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    let err = ((resk - resg) * half).abs();
    (resk * half, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Stops once the summed error estimate is below `max(abs_tol, rel_tol*|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    const MAX_PANELS: usize = 4000;
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_PANELS {
            return Err(Error::QuadratureFailure {
                tol: abs_tol.max(rel_tol * total.abs()),
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
        // Re-sum periodically so cancellation in the running totals cannot drift.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.err).sum();
    Ok(Integral { value, error })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * x * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            dp = nf * (x * p1 - p2) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule: `panels` equal panels with `order` nodes each.
pub struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let c = lo + 0.5 * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(c + 0.5 * h * x);
            }
            sum += 0.5 * h * s;
        }
        sum
    }
}

/// Chebyshev extreme points mapped to `[a, b]`, ascending, `n >= 2` points
/// including both endpoints.
pub fn chebyshev_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two Chebyshev points");
    let deg = (n - 1) as f64;
    (0..n)
        .map(|j| {
            let t = -(std::f64::consts::PI * j as f64 / deg).cos();
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect()
}

/// Clenshaw–Curtis weights matching [`chebyshev_points`] on `[a, b]`.
pub fn clenshaw_curtis_weights(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two Chebyshev points");
    let big_n = n - 1;
    let nf = big_n as f64;
    let mut w = vec![0.0; n];
    let theta = |j: usize| std::f64::consts::PI * j as f64 / nf;
    let mut v: Vec<f64> = vec![1.0; n.saturating_sub(2)];
    if big_n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[big_n] = w[0];
        for k in 1..big_n / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * kf * theta(i + 1)).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (i, vi) in v.iter_mut().enumerate() {
            *vi -= (nf * theta(i + 1)).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[big_n] = w[0];
        for k in 1..=(big_n - 1) / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= 2.0 * (2.0 * kf * theta(i + 1)).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (i, vi) in v.iter().enumerate() {
        w[i + 1] = 2.0 * vi / nf;
    }
    let scale = 0.5 * (b - a);
    w.iter_mut().for_each(|x| *x *= scale);
    w
}

/// Barycentric interpolation through values at [`chebyshev_points`].
pub fn chebyshev_interpolate(points: &[f64], values: &[f64], x: f64) -> f64 {
    let n = points.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let d = x - points[j];
        if d == 0.0 {
            return values[j];
        }
        let mut wj = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n - 1 {
            wj *= 0.5;
        }
        let t = wj / d;
        num += t * values[j];
        den += t;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_polynomial_exact() {
        let r = integrate(|x| x.powi(6) - 3.0 * x, 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((r.value - (128.0 / 7.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn kronrod_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} = 2
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
        let (x, w) = gauss_legendre(10);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((i - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn clenshaw_curtis_integrates_exp() {
        for n in [9, 10, 33, 256] {
            let pts = chebyshev_points(-1.0, 2.0, n);
            let w = clenshaw_curtis_weights(-1.0, 2.0, n);
            let i: f64 = pts.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
            assert!((i - (2f64.exp() - (-1f64).exp())).abs() < 1e-6, "n={n}: {i}");
        }
    }

    #[test]
    fn barycentric_reproduces_smooth_function() {
        let pts = chebyshev_points(0.0, 1.0, 40);
        let vals: Vec<f64> = pts.iter().map(|x| (3.0 * x).sin()).collect();
        for x in [0.013, 0.5, 0.77] {
            assert!((chebyshev_interpolate(&pts, &vals, x) - (3.0 * x).sin()).abs() < 1e-12);
        }
    }
}
