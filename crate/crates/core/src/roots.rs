//! Scalar root finding.

/// Bisection on a bracket with `f(lo)` and `f(hi)` of opposite sign.
/// Returns `None` when the bracket does not straddle a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Newton's method kept inside `[lo, hi]`; any step leaving the bracket, or a
/// stalled step, falls back to bisection. `f` must be increasing on the bracket.
pub fn newton_increasing<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, x0: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0.clamp(lo, hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = df(x);
        let mut next = x - fx / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= tol * x.abs().max(f64::MIN_POSITIVE) || hi - lo <= tol * hi.abs() {
            return next;
        }
        x = next;
    }
    x
}
