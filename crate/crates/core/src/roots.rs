//! Bracketing root finders.

use crate::error::{GeomError, Result};
use crate::scalar::Real;

/// Samples used when scanning an interval for sign changes.
pub const SCAN_SAMPLES: usize = 1024;

/// Bisection on a bracket with a sign change, run until the bracket stops
/// shrinking or is narrower than `tol`.
pub fn bisect<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T, tol: T) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) || flo.is_nan() || fhi.is_nan() {
        return Err(GeomError::RootBracketingFailure(format!(
            "no sign change on [{}, {}]",
            lo.as_f64(),
            hi.as_f64()
        )));
    }
    for _ in 0..400 {
        let mid = lo + (hi - lo) / T::of(2.0);
        if mid <= lo || mid >= hi || hi - lo <= tol {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::of(2.0))
}

/// All sign changes of `f` on `[a, b]` found by a uniform scan, each refined by
/// bisection to `tol`.
pub fn scan_roots<T: Real>(f: impl Fn(T) -> T, a: T, b: T, samples: usize, tol: T) -> Vec<T> {
    let step = (b - a) / T::of_usize(samples);
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=samples {
        let x1 = if i == samples { b } else { a + step * T::of_usize(i) };
        let f1 = f(x1);
        if f0 != T::zero() && f1 != T::zero() && (f0 > T::zero()) != (f1 > T::zero()) {
            if let Ok(r) = bisect(&f, x0, x1, tol) {
                roots.push(r);
            }
        } else if f1 == T::zero() && i < samples {
            roots.push(x1);
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}
