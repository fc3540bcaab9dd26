//! Bracketed root finding for monotone functions.

use crate::error::{CovarError, Result};

/// Iteration budget shared by every conditional-quantile inversion.
pub const MAX_ITERATIONS: usize = 200;
/// Required accuracy on the function value.
pub const VALUE_TOLERANCE: f64 = 1e-10;

/// Solve `f(x) = 0` for `x ∈ [lo, hi]` where `f(lo) ≤ 0 ≤ f(hi)`.
///
/// Bisection safeguarded by secant and inverse quadratic steps (Brent). The
/// iteration continues until the residual vanishes or the bracket collapses
/// to a few ulps; it fails only if the final residual exceeds
/// `value_tol` after [`MAX_ITERATIONS`].
pub fn solve_increasing<F>(mut f: F, lo: f64, hi: f64, value_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa > 0.0 || fb < 0.0 {
        // No sign change; report the closer endpoint's residual.
        let residual = if fa > 0.0 { fa } else { -fb };
        return Err(CovarError::Convergence {
            what: "root bracket (no sign change)",
            residual,
            iterations: 0,
        });
    }

    // Brent's method with b the best estimate, a the previous, c the contrapoint.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 0..MAX_ITERATIONS {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if fb == 0.0 || m.abs() <= tol {
            return finish(b, fb, value_tol, iter);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    finish(b, fb, value_tol, MAX_ITERATIONS)
}

fn finish(x: f64, fx: f64, value_tol: f64, iterations: usize) -> Result<f64> {
    if fx.abs() <= value_tol {
        Ok(x)
    } else {
        Err(CovarError::Convergence {
            what: "bracketed root search",
            residual: fx.abs(),
            iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let x = solve_increasing(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn flat_ends_still_converge() {
        // steep in the middle, flat near both ends
        let f = |x: f64| ((x - 0.3) * 200.0).tanh();
        let x = solve_increasing(f, 0.0, 1.0, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-14);
    }

    #[test]
    fn missing_sign_change_is_an_error() {
        let err = solve_increasing(|x| x + 1.0, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(err.is_numerical());
    }

    #[test]
    fn step_function_reports_residual() {
        let err = solve_increasing(|x| if x < 0.5 { -1.0 } else { 1.0 }, 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, CovarError::Convergence { .. }));
    }
}
