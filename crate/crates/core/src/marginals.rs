//! Univariate loss distributions: Normal and location-scale Student-t.

use std::fmt;

use crate::error::{check_probability_open, CovarError, Result};
use crate::special::{norm_cdf, norm_pdf, norm_quantile, norm_sf, StdT};

/// Family of a [`Marginal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginalKind {
    Normal,
    StudentT { nu: f64 },
}

/// A continuous univariate loss distribution `location + scale · Z`, with
/// `Z` standard normal or standard Student-t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    kind: MarginalKind,
    location: f64,
    scale: f64,
    t: Option<StdT>,
}

impl Marginal {
    pub fn normal(location: f64, scale: f64) -> Result<Self> {
        check_location_scale(location, scale)?;
        Ok(Marginal {
            kind: MarginalKind::Normal,
            location,
            scale,
            t: None,
        })
    }

    pub fn standard_normal() -> Self {
        Marginal::normal(0.0, 1.0).expect("valid")
    }

    pub fn student_t(nu: f64, location: f64, scale: f64) -> Result<Self> {
        check_location_scale(location, scale)?;
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(CovarError::domain("degrees_of_freedom", nu, "ν > 0"));
        }
        Ok(Marginal {
            kind: MarginalKind::StudentT { nu },
            location,
            scale,
            t: Some(StdT::new(nu)),
        })
    }

    /// Build from a kind tag plus parameters.
    pub fn new(kind: MarginalKind, location: f64, scale: f64) -> Result<Self> {
        match kind {
            MarginalKind::Normal => Marginal::normal(location, scale),
            MarginalKind::StudentT { nu } => Marginal::student_t(nu, location, scale),
        }
    }

    pub fn kind(&self) -> MarginalKind {
        self.kind
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The same law shifted by `c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        Marginal::new(self.kind, self.location + c, self.scale)
    }

    fn standardize(&self, x: f64) -> f64 {
        (x - self.location) / self.scale
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.std_pdf(self.standardize(x)) / self.scale
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.std_cdf(self.standardize(x))
    }

    /// `P(X > x)`, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        self.std_sf(self.standardize(x))
    }

    pub(crate) fn std_cdf(&self, z: f64) -> f64 {
        match &self.t {
            None => norm_cdf(z),
            Some(t) => t.cdf(z),
        }
    }

    pub(crate) fn std_sf(&self, z: f64) -> f64 {
        match &self.t {
            None => norm_sf(z),
            Some(t) => t.sf(z),
        }
    }

    pub(crate) fn std_pdf(&self, z: f64) -> f64 {
        match &self.t {
            None => norm_pdf(z),
            Some(t) => t.pdf(z),
        }
    }

    /// Standard (location 0, scale 1) quantile; `p` is not range-checked.
    pub(crate) fn std_quantile(&self, p: f64) -> f64 {
        match &self.t {
            None => norm_quantile(p),
            Some(t) => t.quantile(p),
        }
    }

    /// Generalized inverse `inf{x : F(x) ≥ p}` for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        check_probability_open("p", p)?;
        Ok(self.location + self.scale * self.std_quantile(p))
    }

    /// `VaR_α = F^←(α)`.
    pub fn value_at_risk(&self, alpha: f64) -> Result<f64> {
        check_probability_open("alpha", alpha).and_then(|_| self.quantile(alpha))
    }

    /// Mean, or a divergence error for Student-t with ν ≤ 1.
    pub fn mean(&self) -> Result<f64> {
        self.require_finite_mean()?;
        Ok(self.location)
    }

    pub(crate) fn require_finite_mean(&self) -> Result<()> {
        match self.kind {
            MarginalKind::StudentT { nu } if nu <= 1.0 => Err(CovarError::Divergent(format!(
                "Student-t with ν = {nu} has no finite mean"
            ))),
            _ => Ok(()),
        }
    }

    /// `ES_β = (1/(1-β)) ∫_β^1 VaR_t dt`, in closed form for both families.
    pub fn expected_shortfall(&self, beta: f64) -> Result<f64> {
        check_probability_open("beta", beta)?;
        self.require_finite_mean()?;
        let z = self.std_quantile(beta);
        let tail = 1.0 - beta;
        let kernel = match (&self.kind, &self.t) {
            (MarginalKind::StudentT { nu }, Some(t)) => (nu + z * z) / (nu - 1.0) * t.pdf(z) / tail,
            _ => norm_pdf(z) / tail,
        };
        Ok(self.location + self.scale * kernel)
    }
}

fn check_location_scale(location: f64, scale: f64) -> Result<()> {
    if !location.is_finite() {
        return Err(CovarError::domain("location", location, "finite real"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CovarError::domain("scale", scale, "σ > 0"));
    }
    Ok(())
}

impl fmt::Display for Marginal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MarginalKind::Normal => write!(f, "N({}, {}²)", self.location, self.scale),
            MarginalKind::StudentT { nu } => {
                write!(f, "t{}({}, {})", nu, self.location, self.scale)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    #[test]
    fn symmetric_centres() {
        assert_eq!(Marginal::standard_normal().cdf(0.0), 0.5);
        let t3 = Marginal::student_t(3.0, 0.0, 1.0).unwrap();
        assert_eq!(t3.cdf(0.0), 0.5);
        assert_eq!(Marginal::standard_normal().quantile(0.5).unwrap(), 0.0);
        let m = Marginal::student_t(5.0, 2.5, 3.0).unwrap();
        assert!((m.value_at_risk(0.5).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn normal_var_95() {
        let v = Marginal::standard_normal().value_at_risk(0.95).unwrap();
        assert_eq!(format!("{v:.4}"), "1.6449");
        assert!((Marginal::standard_normal().cdf(1.644_853_626_951_472_2) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn t3_quantile_95() {
        // bisection on the incomplete-beta CDF to 1e-10
        let t3 = Marginal::student_t(3.0, 0.0, 1.0).unwrap();
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if crate::special::inc_beta(1.5, 0.5, 3.0 / (3.0 + mid * mid)) * 0.5 > 0.05 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = t3.quantile(0.95).unwrap();
        assert!((q - lo).abs() < 1e-10);
        assert!(q.to_string().starts_with("2.35336"));
    }

    #[test]
    fn domain_errors() {
        let m = Marginal::standard_normal();
        assert!(m.quantile(0.0).is_err());
        assert!(m.quantile(1.0).is_err());
        assert!(m.quantile(f64::NAN).is_err());
        assert!(Marginal::normal(0.0, 0.0).is_err());
        assert!(Marginal::student_t(-1.0, 0.0, 1.0).is_err());
        let cauchy = Marginal::student_t(1.0, 0.0, 1.0).unwrap();
        assert!(matches!(cauchy.expected_shortfall(0.9), Err(CovarError::Divergent(_))));
        assert!(cauchy.mean().is_err());
    }

    #[test]
    fn normal_es_closed_form() {
        let es = Marginal::standard_normal().expected_shortfall(0.95).unwrap();
        let z = norm_quantile(0.95);
        assert!((es - norm_pdf(z) / 0.05).abs() < 1e-14);
        assert_eq!(format!("{es:.4}"), "2.0627");
    }

    #[test]
    fn t3_es_matches_trapezoid_oracle() {
        // 10^6-panel trapezoid of the quantile on (β, 1 - 1e-9) plus the
        // analytic power-tail remainder ∫_{1-δ}^1 c (1-t)^{-1/3} dt.
        let t3 = Marginal::student_t(3.0, 0.0, 1.0).unwrap();
        let beta: f64 = 0.95;
        let delta: f64 = 1e-9;
        // trapezoid in s with t = 1 - (1-β) e^{-s}: smooths the singular end
        let s_max = ((1.0 - beta) / delta).ln();
        let n = 1_000_000;
        let h = s_max / n as f64;
        let g = |s: f64| {
            let w = (1.0 - beta) * (-s).exp();
            t3.quantile(1.0 - w).unwrap() * w
        };
        let mut sum = 0.5 * (g(0.0) + g(s_max));
        for i in 1..n {
            sum += g(i as f64 * h);
        }
        let body = sum * h;
        // remainder: VaR_t ≈ q(1-δ) ((1-t)/δ)^{-1/3}, integral = q δ · 3/2
        let tail = t3.quantile(1.0 - delta).unwrap() * delta * 1.5;
        let oracle = (body + tail) / (1.0 - beta);
        let es = t3.expected_shortfall(beta).unwrap();
        assert!((es - oracle).abs() < 1e-6, "{es} vs {oracle}");
    }

    #[test]
    fn es_by_adaptive_quadrature() {
        // ES = (1/(1-β)) ∫_{VaR}^∞ x f(x) dx, checked for several families
        for m in [
            Marginal::normal(1.0, 2.0).unwrap(),
            Marginal::student_t(3.0, -0.5, 1.5).unwrap(),
            Marginal::student_t(7.5, 0.0, 1.0).unwrap(),
        ] {
            for &b in &[0.5, 0.9, 0.99] {
                let v = m.value_at_risk(b).unwrap();
                let i = quad::adaptive_upper(|x| x * m.pdf(x), v, m.scale(), 1e-13).unwrap();
                let es = m.expected_shortfall(b).unwrap();
                assert!((es - i / (1.0 - b)).abs() < 1e-9, "{m} b={b}");
            }
        }
    }
}
