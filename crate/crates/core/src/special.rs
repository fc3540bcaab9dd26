//! Special functions: standard normal, regularized incomplete beta and the
//! standard Student-t law built on it.

use std::f64::consts::SQRT_2;

pub(crate) const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF, accurate to a few ulps over the whole real line.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Upper tail `1 - Φ(x)` without cancellation.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Standard normal quantile.
///
/// Acklam's rational approximation (relative error below 1.2e-9) polished by
/// one Halley step against [`norm_cdf`]. Returns ±∞ at 0 and 1, NaN outside.
pub fn norm_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p == 0.5 {
        return 0.0;
    }
    // Work in the lower half and reflect, so tail residuals never cancel.
    if p > 0.5 {
        return -lower_norm_quantile(1.0 - p);
    }
    lower_norm_quantile(p)
}

fn lower_norm_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };

    // Halley refinement; the residual is formed against the lower tail.
    let e = norm_cdf(x) - p;
    let u = e * SQRT_2PI * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Natural log of the beta function.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Regularized incomplete beta `I_x(a, b)`.
///
/// Takes `x` together with its complement `y = 1 - x`, so callers that know
/// `1 - x` more accurately than `x` (Student-t near the origin) lose nothing
/// to cancellation. `ln_b` is `ln B(a, b)`, usually cached by the caller.
pub fn inc_beta_with(a: f64, b: f64, x: f64, y: f64, ln_b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let front = (a * x.ln() + b * y.ln() - ln_b).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cont_frac(a, b, x) / a
    } else {
        1.0 - front * beta_cont_frac(b, a, y) / b
    }
}

/// Regularized incomplete beta `I_x(a, b)` for `x ∈ [0, 1]`.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    inc_beta_with(a, b, x, 1.0 - x, ln_beta(a, b))
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cont_frac(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    const MAX_ITER: usize = 500;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `ln(1 + t²/ν)` without overflow for huge `|t|`.
pub(crate) fn ln1p_square_ratio(t: f64, nu: f64) -> f64 {
    if t.abs() < 1e100 {
        (t * t / nu).ln_1p()
    } else {
        2.0 * t.abs().ln() - nu.ln()
    }
}

/// Standard Student-t law with `nu` degrees of freedom, with its
/// normalizing constants cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdT {
    nu: f64,
    ln_norm: f64,
    ln_b: f64,
}

impl StdT {
    pub fn new(nu: f64) -> Self {
        let ln_b = ln_beta(0.5 * nu, 0.5);
        // pdf(t) = exp(ln_norm) (1 + t²/ν)^{-(ν+1)/2},  norm = 1 / (√ν B(ν/2, 1/2))
        let ln_norm = -0.5 * nu.ln() - ln_b;
        StdT { nu, ln_norm, ln_b }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn pdf(&self, t: f64) -> f64 {
        self.ln_pdf(t).exp()
    }

    pub fn ln_pdf(&self, t: f64) -> f64 {
        self.ln_norm - 0.5 * (self.nu + 1.0) * ln1p_square_ratio(t, self.nu)
    }

    /// `P(T ≤ t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        if t.is_infinite() {
            return if t > 0.0 { 1.0 } else { 0.0 };
        }
        let tail = self.tail(t.abs());
        if t < 0.0 {
            tail
        } else {
            1.0 - tail
        }
    }

    /// `P(T > t)`.
    pub fn sf(&self, t: f64) -> f64 {
        self.cdf(-t)
    }

    /// `P(T > s)` for `s ≥ 0`.
    fn tail(&self, s: f64) -> f64 {
        let t2 = s * s;
        let x = self.nu / (self.nu + t2);
        let y = 1.0 / (1.0 + self.nu / t2);
        0.5 * inc_beta_with(0.5 * self.nu, 0.5, x, y, self.ln_b)
    }

    /// Quantile by safeguarded Newton iteration inside a bracket.
    pub fn quantile(&self, p: f64) -> f64 {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return f64::NAN;
        }
        if p == 0.0 {
            return f64::NEG_INFINITY;
        }
        if p == 1.0 {
            return f64::INFINITY;
        }
        if p == 0.5 {
            return 0.0;
        }
        if p > 0.5 {
            -self.lower_quantile(1.0 - p)
        } else {
            self.lower_quantile(p)
        }
    }

    /// Quantile for `p < 1/2`, solved against the lower tail directly.
    fn lower_quantile(&self, p: f64) -> f64 {
        let nu = self.nu;
        // Starting point: power-tail asymptote far out, a Cornish-Fisher
        // corrected normal quantile otherwise.
        let z = norm_quantile(p);
        let cf = z * (1.0 + (z * z + 1.0) / (4.0 * nu));
        let k = (self.ln_norm + 0.5 * (nu - 1.0) * nu.ln()).exp();
        let asym = -(k / p).powf(1.0 / nu);
        let mut t = if nu <= 4.0 && p < 0.05 { asym.min(cf) } else { cf };
        if !t.is_finite() || t >= 0.0 {
            t = z.min(-1e-3);
        }

        // Bracket [lo, hi] with cdf(lo) < p < cdf(hi); hi = 0 always works.
        let mut hi = 0.0_f64;
        let mut lo = t;
        while self.cdf(lo) > p {
            hi = lo;
            lo *= 2.0;
            if !lo.is_finite() {
                return f64::NEG_INFINITY;
            }
        }
        if t < lo || t > hi {
            t = 0.5 * (lo + hi);
        }

        for _ in 0..200 {
            let f = self.cdf(t) - p;
            if f == 0.0 {
                return t;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.pdf(t);
            let mut next = t - f / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 4.0 * f64::EPSILON * t.abs().max(1e-300) {
                return next;
            }
            t = next;
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Taylor series of Φ about 0, summed to convergence. Independent of erfc.
    fn norm_cdf_series(x: f64) -> f64 {
        // Φ(x) = 1/2 + φ(x) Σ x^{2k+1} / (1·3·5···(2k+1))
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            k += 1.0;
            term *= x * x / (2.0 * k + 1.0);
            sum += term;
        }
        0.5 + norm_pdf(x) * sum
    }

    #[test]
    fn normal_cdf_matches_series() {
        for i in -60..=60 {
            let x = i as f64 / 10.0;
            let a = norm_cdf(x);
            let b = norm_cdf_series(x);
            assert!((a - b).abs() < 1e-14, "x={x}: {a} vs {b}");
        }
        assert!((norm_cdf_series(1.644_853_626_951_472_2) - 0.95).abs() < 1e-15);
        assert!((norm_cdf(1.644_853_626_951_472_2) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn normal_quantile_round_trip() {
        for &p in &[1e-300, 1e-20, 1e-8, 1e-3, 0.024, 0.025, 0.3, 0.5, 0.7, 0.975, 0.999, 1.0 - 1e-12] {
            let x = norm_quantile(p);
            let back = if p < 0.5 { norm_cdf(x) } else { 1.0 - norm_sf(x) };
            assert!((back - p).abs() <= 1e-14 * p.max(1e-300) + 1e-16, "p={p}");
        }
        assert_eq!(norm_quantile(0.5), 0.0);
        assert!(norm_quantile(0.0).is_infinite());
        assert!(norm_quantile(1.5).is_nan());
    }

    #[test]
    fn normal_quantile_relative_accuracy_in_lower_tail() {
        for &p in &[1e-10, 1e-6, 0.01, 0.02] {
            let x = norm_quantile(p);
            assert!((norm_cdf(x) / p - 1.0).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn inc_beta_special_cases() {
        // I_x(1, 1) = x ; I_x(a, 1) = x^a ; I_x(1, b) = 1 - (1-x)^b
        for &x in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            assert!((inc_beta(1.0, 1.0, x) - x).abs() < 1e-15);
            assert!((inc_beta(2.5, 1.0, x) - x.powf(2.5)).abs() < 1e-14);
            assert!((inc_beta(1.0, 3.0, x) - (1.0 - (1.0 - x).powi(3))).abs() < 1e-14);
        }
        // symmetry
        assert!((inc_beta(2.0, 2.0, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn student_t3_closed_form() {
        // ν = 3: F(t) = 1/2 + [ t/(√3 (1 + t²/3)) + atan(t/√3) ] / π
        let t3 = StdT::new(3.0);
        for i in -80..=80 {
            let t = i as f64 / 4.0;
            let s = t / 3f64.sqrt();
            let exact = 0.5 + (s / (1.0 + s * s) + s.atan()) / PI;
            assert!((t3.cdf(t) - exact).abs() < 1e-14, "t={t}");
        }
        assert_eq!(t3.cdf(0.0), 0.5);
    }

    #[test]
    fn student_t_quantile_round_trip() {
        for &nu in &[0.7, 1.0, 2.0, 3.0, 4.0, 10.0, 60.0] {
            let d = StdT::new(nu);
            for &p in &[1e-10, 1e-6, 0.01, 0.2, 0.5, 0.77, 0.95, 0.999] {
                let t = d.quantile(p);
                let back = if p < 0.5 { d.cdf(t) } else { 1.0 - d.sf(t) };
                assert!((back - p).abs() <= 1e-13 * p.min(1.0 - p) + 1e-16, "nu={nu} p={p}: {back}");
            }
        }
    }

    #[test]
    fn student_t_pdf_integrates_to_cdf_difference() {
        let d = StdT::new(3.0);
        // Simpson on [-1, 2]
        let n = 2000;
        let h = 3.0 / n as f64;
        let mut s = d.pdf(-1.0) + d.pdf(2.0);
        for i in 1..n {
            let x = -1.0 + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * d.pdf(x);
        }
        let integral = s * h / 3.0;
        assert!((integral - (d.cdf(2.0) - d.cdf(-1.0))).abs() < 1e-12);
    }
}
