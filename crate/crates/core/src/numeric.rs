//! Small numerical helpers shared across modules.

/// Root of an increasing function on `[lo, hi]` by bisection, returned as the
/// upper end of the final bracket (so `f(result) >= 0`).
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
