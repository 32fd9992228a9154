//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisects `f` on `[lo, hi]` until the bracket width drops below `tol`,
/// returning the bracket midpoint. Requires a sign change over the interval.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput {
            name: "bracket",
            reason: format!("need finite lo < hi, got [{lo}, {hi}]"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }

    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() * f_hi.signum() > 0.0 {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at floating-point resolution
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
