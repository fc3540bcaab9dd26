//! Dependence orderings and monotonicity checks.

use serde::Serialize;

use crate::copulas::Copula;
use crate::error::{check_probability_open, Result};
use crate::measures::{gaussian_covar_eq_derivative, BivariateModel, Levels, Measure};

/// Outcome of a pointwise concordance comparison `C₁ ≤ C₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Concordance {
    Ordered,
    /// First grid point where `C₁(u, v) - C₂(u, v)` exceeded the tolerance.
    Violated { u: f64, v: f64, gap: f64 },
}

impl Concordance {
    pub fn is_ordered(&self) -> bool {
        matches!(self, Concordance::Ordered)
    }
}

/// Check `C₁ ≤ C₂` on the interior grid `{i/(n+1)}²`.
pub fn concordance_leq(c1: &Copula, c2: &Copula, grid: usize, tol: f64) -> Concordance {
    let step = 1.0 / (grid as f64 + 1.0);
    for i in 1..=grid {
        let u = i as f64 * step;
        for j in 1..=grid {
            let v = j as f64 * step;
            let gap = c1.cdf(u, v) - c2.cdf(u, v);
            if gap > tol {
                return Concordance::Violated { u, v, gap };
            }
        }
    }
    Concordance::Ordered
}

/// Direction of a derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Sign of `∂_ρ CoVaR=` for the bivariate normal.
pub fn gaussian_derivative_sign(rho: f64, levels: Levels) -> Sign {
    Sign::of(gaussian_covar_eq_derivative(1.0, rho, levels))
}

/// `β₀(α) = (1/2 - C(α, 1/2))/(1 - α) = P(V ≤ 1/2 | U ≥ α)`. For `β ≥ β₀`
/// the stressed quantile `CoVaR_{α,β}` sits at or above the median of `Y`.
pub fn beta0(copula: &Copula, alpha: f64) -> Result<f64> {
    check_probability_open("alpha", alpha)?;
    Ok(copula.exceed_mass(alpha, 0.5) / (1.0 - alpha))
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    pub value: f64,
}

/// A measure evaluated along an increasing dependence parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub measure: Measure,
    pub levels: Levels,
    pub points: Vec<SweepPoint>,
    /// Indices `i` where `value[i+1] < value[i] - tol(value[i])`.
    pub violations: Vec<usize>,
}

impl SweepResult {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Relative tolerance for sweep decreases: `1e-7 (1 + |v|)`.
pub fn sweep_tolerance(v: f64) -> f64 {
    1e-7 * (1.0 + v.abs())
}

/// Evaluate `measure` for each model built from `params` (assumed increasing
/// in concordance) and record the non-increasing steps.
pub fn monotonicity_sweep<F>(params: &[f64], build: F, measure: Measure, levels: Levels) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<BivariateModel>,
{
    let mut points = Vec::with_capacity(params.len());
    for &p in params {
        let model = build(p)?;
        points.push(SweepPoint {
            param: p,
            value: measure.evaluate(&model, levels)?,
        });
    }
    let violations = points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].value < w[0].value - sweep_tolerance(w[0].value))
        .map(|(i, _)| i)
        .collect();
    Ok(SweepResult {
        measure,
        levels,
        points,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_concordance_by_rho() {
        let a = Copula::gaussian(0.2).unwrap();
        let b = Copula::gaussian(0.6).unwrap();
        assert!(concordance_leq(&a, &b, 20, 1e-12).is_ordered());
        assert!(!concordance_leq(&b, &a, 20, 1e-12).is_ordered());
        assert!(concordance_leq(&a, &Copula::comonotone(), 20, 0.0).is_ordered());
    }

    #[test]
    fn beta0_limits() {
        assert!((beta0(&Copula::independence(), 0.9).unwrap() - 0.5).abs() < 1e-15);
        assert!(beta0(&Copula::comonotone(), 0.9).unwrap().abs() < 1e-12);
        let g = beta0(&Copula::gaussian(0.5).unwrap(), 0.95).unwrap();
        assert!(g > 0.0 && g < 0.5);
    }

    #[test]
    fn derivative_sign_flips_at_critical_rho() {
        let l = Levels::equal(0.95).unwrap();
        assert_eq!(gaussian_derivative_sign(0.5, l), Sign::Positive);
        assert_eq!(gaussian_derivative_sign(0.8, l), Sign::Negative);
    }

    #[test]
    fn sweep_flags_decrease() {
        let l = Levels::equal(0.95).unwrap();
        let params: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        let eq = monotonicity_sweep(&params, |r| BivariateModel::gaussian(r, 0.0, 1.0), Measure::CovarEq, l).unwrap();
        assert!(!eq.is_monotone());
        let geq = monotonicity_sweep(&params, |r| BivariateModel::gaussian(r, 0.0, 1.0), Measure::CovarGeq, l).unwrap();
        assert!(geq.is_monotone());
    }
}
