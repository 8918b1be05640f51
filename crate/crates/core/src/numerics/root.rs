//! Bracketed scalar root finding: bisection with a secant acceleration step,
//! guaranteed to converge on continuous strictly monotone functions.

use crate::error::{GeomError, Result};

/// Settings for [`solve_monotone_root`].
#[derive(Clone, Copy, Debug)]
pub struct RootSolveSettings {
    /// Convergence threshold: the solve stops once the bracket width or the
    /// scaled residual drops below this.
    pub abs_tol: f64,
    pub max_iter: usize,
    /// Factor by which the interval grows while hunting for a sign change.
    pub bracket_expansion: f64,
}

impl Default for RootSolveSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 200,
            bracket_expansion: 2.0,
        }
    }
}

impl RootSolveSettings {
    /// Settings that push the bracket down to floating-point collapse; used
    /// where the root feeds finite differences and must carry no solve noise.
    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-15,
            max_iter: 300,
            bracket_expansion: 2.0,
        }
    }
}

const MAX_EXPANSIONS: usize = 200;

/// Finds the root of a continuous, strictly monotone `f` on `[lo, hi]`.
///
/// If `f` has the same sign at both endpoints the upper endpoint is grown by
/// `bracket_expansion` until a sign change appears ([`GeomError::NoBracket`]
/// after a bounded number of expansions). The iteration keeps a guaranteed
/// bracket and tries a secant step first, falling back to bisection whenever
/// the secant step leaves the bracket or fails to shrink it.
pub fn solve_monotone_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    settings: &RootSolveSettings,
) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }

    let mut expansions = 0;
    while fa.signum() == fb.signum() {
        if expansions >= MAX_EXPANSIONS {
            return Err(GeomError::NoBracket { lo: a, hi: b });
        }
        let width = (b - a).max(f64::MIN_POSITIVE);
        b = a + width * settings.bracket_expansion.max(1.5);
        fb = f(b);
        if fb == 0.0 {
            return Ok(b);
        }
        expansions += 1;
    }

    let f_scale = fa.abs().min(fb.abs()).max(f64::MIN_POSITIVE);

    for _ in 0..settings.max_iter {
        // Secant candidate; bisect when it is non-finite, outside the open
        // bracket, or when an endpoint value is infinite.
        let mid = 0.5 * (a + b);
        let x = if fa.is_finite() && fb.is_finite() && fb != fa {
            let s = b - fb * (b - a) / (fb - fa);
            if s.is_finite() && s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        // Bracket has collapsed to adjacent floats.
        if x <= a || x >= b {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        let scale = a.abs().max(b.abs()).max(1.0);
        if (b - a) <= settings.abs_tol * scale || fx.abs() <= settings.abs_tol * f_scale {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
    }
    Err(GeomError::NoConvergence {
        max_iter: settings.max_iter,
    })
}
