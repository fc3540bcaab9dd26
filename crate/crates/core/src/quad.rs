//! Gauss–Legendre quadrature: fixed rules and an adaptive panel integrator,
//! with maps for half-infinite ranges.

use std::sync::OnceLock;

use crate::error::{CovarError, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre three-term recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut rule = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    rule
}

const PANEL_POINTS: usize = 10;
const MAX_DEPTH: usize = 48;
const MAX_PANELS: usize = 20_000;

fn panel_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_POINTS))
}

/// Apply a fixed rule to `f` on `[a, b]`.
pub fn fixed<F: FnMut(f64) -> f64>(rule: &[(f64, f64)], a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Adaptive Gauss–Legendre integration of `f` over the finite range `[a, b]`.
///
/// Each panel is compared with the sum over its two halves; a panel is accepted
/// when the difference is below its share of `abs_tol`.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = panel_rule();
    let whole = fixed(rule, a, b, &mut f);
    // (lo, hi, estimate, tolerance, depth)
    let mut stack = vec![(a, b, whole, abs_tol, 0usize)];
    let mut total = 0.0;
    let mut excess = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, est, tol, depth)) = stack.pop() {
        panels += 1;
        let mid = 0.5 * (lo + hi);
        let left = fixed(rule, lo, mid, &mut f);
        let right = fixed(rule, mid, hi, &mut f);
        let refined = left + right;
        let err = (refined - est).abs();
        if !refined.is_finite() {
            return Err(CovarError::Convergence {
                what: "adaptive quadrature (non-finite integrand)",
                residual: f64::NAN,
                iterations: panels,
            });
        }
        if err <= tol || depth >= MAX_DEPTH || panels >= MAX_PANELS {
            if err > tol {
                excess += err - tol;
            }
            total += refined;
        } else {
            let sub_tol = tol * std::f64::consts::FRAC_1_SQRT_2;
            stack.push((mid, hi, right, sub_tol, depth + 1));
            stack.push((lo, mid, left, sub_tol, depth + 1));
        }
    }
    if excess > 100.0 * abs_tol.max(1e-15) {
        return Err(CovarError::Convergence {
            what: "adaptive quadrature",
            residual: excess,
            iterations: panels,
        });
    }
    Ok(total)
}

/// `∫_a^∞ f(s) ds` via `s = a + scale (1 - x)/x`, `x ∈ (0, 1]`.
pub fn adaptive_upper<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, abs_tol: f64) -> Result<f64> {
    adaptive(
        |x| {
            let s = a + scale * (1.0 - x) / x;
            let v = f(s);
            if v == 0.0 {
                0.0
            } else {
                v * scale / (x * x)
            }
        },
        0.0,
        1.0,
        abs_tol,
    )
}

/// `∫_{-∞}^a f(s) ds` via `s = a - scale (1 - x)/x`, `x ∈ (0, 1]`.
pub fn adaptive_lower<F: FnMut(f64) -> f64>(mut f: F, a: f64, scale: f64, abs_tol: f64) -> Result<f64> {
    adaptive(
        |x| {
            let s = a - scale * (1.0 - x) / x;
            let v = f(s);
            if v == 0.0 {
                0.0
            } else {
                v * scale / (x * x)
            }
        },
        0.0,
        1.0,
        abs_tol,
    )
}
