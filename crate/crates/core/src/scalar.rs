//! Bounded scalar minimization (Brent's method).
//!
//! Golden-section steps with parabolic interpolation where the last three
//! points justify it, plus a final comparison against both endpoints and the
//! interval midpoint so a boundary minimum is never missed. No derivatives
//! required; kinked objectives fall back to pure golden-section behavior.

use crate::error::{Error, Result};

const GOLDEN_MEAN: f64 = 0.381_966_011_250_105_1; // (3 - sqrt(5)) / 2
const SQRT_EPS: f64 = 1.490_116_119_384_765_6e-8; // sqrt(f64::EPSILON)

/// Outcome of a bounded minimization.
#[derive(Debug, Clone, Copy)]
pub struct ScalarResult {
    pub argmin: f64,
    pub value: f64,
    /// Number of objective evaluations spent.
    pub iterations: usize,
}

fn signum_or_one(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Minimizes `f` over `[lo, hi]` to absolute x-tolerance `xatol`.
///
/// The returned value never exceeds the smallest of f(lo), f(hi), and
/// f((lo+hi)/2), so monotone objectives resolve to the correct endpoint.
pub fn brent_minimize(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    xatol: f64,
    max_iter: usize,
) -> Result<ScalarResult> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidBracket { lo, hi });
    }
    if !xatol.is_finite() || xatol < 0.0 {
        return Err(Error::InvalidParameter { what: "xatol", why: format!("got {xatol}") });
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter { what: "max_iter", why: "must be positive".into() });
    }

    let mut evals = 0usize;
    let mut eval = |x: f64, evals: &mut usize| -> Result<f64> {
        let v = f(x);
        *evals += 1;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteEvaluation { at: x })
        }
    };

    let (mut a, mut b) = (lo, hi);
    let mut xf = a + GOLDEN_MEAN * (b - a);
    let (mut nfc, mut fulc) = (xf, xf);
    let mut fx = eval(xf, &mut evals)?;
    let (mut fnfc, mut ffulc) = (fx, fx);
    let mut rat = 0.0f64;
    let mut e = 0.0f64;

    let mut xm = 0.5 * (a + b);
    let mut tol1 = SQRT_EPS * xf.abs() + xatol / 3.0;
    let mut tol2 = 2.0 * tol1;

    while (xf - xm).abs() > tol2 - 0.5 * (b - a) {
        let mut golden = true;
        // Try a parabola through the three best points seen so far.
        if e.abs() > tol1 {
            let r = (xf - nfc) * (fx - ffulc);
            let mut q = (xf - fulc) * (fx - fnfc);
            let mut p = (xf - fulc) * q - (xf - nfc) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let r_prev = e;
            e = rat;
            if p.abs() < (0.5 * q * r_prev).abs() && p > q * (a - xf) && p < q * (b - xf) {
                golden = false;
                rat = p / q;
                let x_try = xf + rat;
                if (x_try - a) < tol2 || (b - x_try) < tol2 {
                    rat = tol1 * signum_or_one(xm - xf);
                }
            }
        }
        if golden {
            e = if xf >= xm { a - xf } else { b - xf };
            rat = GOLDEN_MEAN * e;
        }

        let step = signum_or_one(rat) * rat.abs().max(tol1);
        let x = xf + step;
        let fu = eval(x, &mut evals)?;

        if fu <= fx {
            if x >= xf {
                a = xf;
            } else {
                b = xf;
            }
            (fulc, ffulc) = (nfc, fnfc);
            (nfc, fnfc) = (xf, fx);
            (xf, fx) = (x, fu);
        } else {
            if x < xf {
                a = x;
            } else {
                b = x;
            }
            if fu <= fnfc || nfc == xf {
                (fulc, ffulc) = (nfc, fnfc);
                (nfc, fnfc) = (x, fu);
            } else if fu <= ffulc || fulc == xf || fulc == nfc {
                (fulc, ffulc) = (x, fu);
            }
        }

        xm = 0.5 * (a + b);
        tol1 = SQRT_EPS * xf.abs() + xatol / 3.0;
        tol2 = 2.0 * tol1;
        if evals >= max_iter {
            break;
        }
    }

    // Boundary sweep: an interior probe can never certify an endpoint minimum.
    let mut best = ScalarResult { argmin: xf, value: fx, iterations: 0 };
    for x in [lo, 0.5 * (lo + hi), hi] {
        let v = eval(x, &mut evals)?;
        if v < best.value {
            best = ScalarResult { argmin: x, value: v, iterations: 0 };
        }
    }
    best.iterations = evals;
    Ok(best)
}
