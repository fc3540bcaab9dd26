//! Systemic risk measures built from a [`BivariateModel`].
//!
//! `X` is the stressed institution (or system), `Y` the one whose risk is
//! measured. Both CoVaR notions are computed through the copula:
//!
//! * `CoVaR_{α,β}(Y|X)`, stress event `X ≥ VaR_α(X)`:
//!   `F_Y^←(F_{V|U≥α}^←(β))`;
//! * `CoVaR=_{α,β}(Y|X)`, stress event `X = VaR_α(X)`:
//!   `F_Y^←(F_{V|U=α}^←(β))`.
//!
//! The conditional expected shortfalls are tail averages
//! `(1/(1-β)) ∫_β^1 CoVaR_{α,t} dt`. Substituting `t = K(v)`, with `K` the
//! conditional CDF of `V`, and `v = F_Y(y)` turns each into a weighted tail
//! integral over `y` that needs no quantile inversions inside the quadrature:
//!
//! ```text
//! CoES_{α,β} = (1/(1-β)) ∫_{CoVaR_{α,β}}^∞ y · k(F_Y(y)) f_Y(y) dy,
//! ```
//!
//! where `k = K'` is the conditional density of `V`: `(1 - ∂_v C(α, v))/(1-α)`
//! under `U ≥ α`, and the copula density `c(α, v)` under `U = α`.

use std::fmt;

use serde::Serialize;

use crate::copulas::{Copula, CopulaFamily};
use crate::error::{check_probability_open, CovarError, Result};
use crate::marginals::Marginal;
use crate::quad;
use crate::special::norm_quantile;

/// Absolute tolerance of the standardized tail integrals.
const TAIL_TOLERANCE: f64 = 1e-13;

/// Confidence pair `(α, β)`, both in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Levels {
    pub alpha: f64,
    pub beta: f64,
}

impl Levels {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_probability_open("alpha", alpha)?;
        check_probability_open("beta", beta)?;
        Ok(Levels { alpha, beta })
    }

    /// `α = β`.
    pub fn equal(level: f64) -> Result<Self> {
        Levels::new(level, level)
    }

    fn validate(&self) -> Result<()> {
        Levels::new(self.alpha, self.beta).map(|_| ())
    }
}

impl fmt::Display for Levels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// Which stress event conditions `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `X = VaR_α(X)`
    Eq,
    /// `X ≥ VaR_α(X)`
    Geq,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Eq => "eq",
            Variant::Geq => "geq",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Joint law of `(X, Y)` as two continuous marginals and a copula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateModel {
    pub marginal_x: Marginal,
    pub marginal_y: Marginal,
    pub copula: Copula,
}

impl BivariateModel {
    pub fn new(marginal_x: Marginal, marginal_y: Marginal, copula: Copula) -> Self {
        BivariateModel {
            marginal_x,
            marginal_y,
            copula,
        }
    }

    /// Bivariate normal with standard `X` and `Y ~ N(μ_Y, σ_Y²)`.
    pub fn gaussian(rho: f64, mu_y: f64, sigma_y: f64) -> Result<Self> {
        Ok(BivariateModel::new(
            Marginal::standard_normal(),
            Marginal::normal(mu_y, sigma_y)?,
            Copula::gaussian(rho)?,
        ))
    }

    /// Centred bivariate t(ν): `√(ν/W)` times a correlated normal pair.
    pub fn student_t(rho: f64, nu: f64) -> Result<Self> {
        let m = Marginal::student_t(nu, 0.0, 1.0)?;
        Ok(BivariateModel::new(m, m, Copula::student_t(rho, nu)?))
    }

    /// Gumbel copula with standard t(ν) margins.
    pub fn gumbel_t(theta: f64, nu: f64) -> Result<Self> {
        let m = Marginal::student_t(nu, 0.0, 1.0)?;
        Ok(BivariateModel::new(m, m, Copula::gumbel(theta)?))
    }

    /// The same model with `Y` replaced by `Y + c`.
    pub fn shift_y(&self, c: f64) -> Result<Self> {
        Ok(BivariateModel {
            marginal_y: self.marginal_y.shifted(c)?,
            ..*self
        })
    }
}

/// Weighted combination `Σ wᵢ CoES_{αᵢ,β}(Y|Xᵢ)` for one institution `Y`
/// stressed by several risk factors.
#[derive(Debug, Clone, PartialEq)]
pub struct StressAggregate {
    pub components: Vec<StressComponent>,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressComponent {
    pub model: BivariateModel,
    pub weight: f64,
    pub alpha: f64,
}

impl StressAggregate {
    /// Weights sum to one, making the aggregate a convex combination.
    pub fn is_coherent(&self) -> bool {
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        (total - 1.0).abs() <= 1e-12
    }
}

/// `VaR_β(Y | X ≥ VaR_α(X))`.
pub fn covar_geq(m: &BivariateModel, levels: Levels) -> Result<f64> {
    levels.validate()?;
    let v = m.copula.cond_exceed_quantile(levels.alpha, levels.beta)?;
    quantile_y(m, v)
}

/// `VaR_β(Y | X = VaR_α(X))`.
pub fn covar_eq(m: &BivariateModel, levels: Levels) -> Result<f64> {
    levels.validate()?;
    let v = m.copula.cond_equal_quantile(levels.alpha, levels.beta)?;
    quantile_y(m, v)
}

fn quantile_y(m: &BivariateModel, v: f64) -> Result<f64> {
    // the root finder may land on an endpoint for extreme levels
    if v <= 0.0 || v >= 1.0 {
        return Err(CovarError::Convergence {
            what: "conditional quantile at the boundary of (0, 1)",
            residual: v,
            iterations: 0,
        });
    }
    m.marginal_y.quantile(v)
}

/// Closed form of `CoVaR=` in the bivariate normal model:
/// `μ_Y + σ_Y (ρ Φ⁻¹(α) + Φ⁻¹(β) √(1-ρ²))`.
pub fn covar_eq_gaussian_analytic(mu_y: f64, sigma_y: f64, rho: f64, levels: Levels) -> Result<f64> {
    levels.validate()?;
    if !(sigma_y > 0.0 && sigma_y.is_finite()) {
        return Err(CovarError::domain("sigma_y", sigma_y, "σ > 0"));
    }
    if !(rho > -1.0 && rho < 1.0) {
        return Err(CovarError::domain("rho", rho, "open interval (-1, 1)"));
    }
    let (za, zb) = (norm_quantile(levels.alpha), norm_quantile(levels.beta));
    Ok(mu_y + sigma_y * (rho * za + zb * (1.0 - rho * rho).sqrt()))
}

/// `∂_ρ CoVaR=` in the bivariate normal model:
/// `σ_Y (Φ⁻¹(α) - ρ Φ⁻¹(β)/√(1-ρ²))`.
pub fn gaussian_covar_eq_derivative(sigma_y: f64, rho: f64, levels: Levels) -> f64 {
    let (za, zb) = (norm_quantile(levels.alpha), norm_quantile(levels.beta));
    sigma_y * (za - rho * zb / (1.0 - rho * rho).sqrt())
}

/// Stationary correlation of the Gaussian `CoVaR=`,
/// `ρ₀ = |Φ⁻¹(α)| / √(Φ⁻¹(α)² + Φ⁻¹(β)²)`.
///
/// At `β = 1/2` the derivative never vanishes on `(-1, 1)` and the value is
/// the supremum 1. `α = β = 1/2` is rejected: `CoVaR=` is constant there.
pub fn rho_critical(levels: Levels) -> Result<f64> {
    levels.validate()?;
    let (za, zb) = (norm_quantile(levels.alpha), norm_quantile(levels.beta));
    if za == 0.0 && zb == 0.0 {
        return Err(CovarError::DegenerateLevels);
    }
    Ok(za.abs() / za.hypot(zb))
}

/// Offsets `s` of the split levels `β + (1-β) s` used to partition tail
/// integrals at conditional quantiles.
const SPLIT_OFFSETS: [f64; 9] = [1e-4, 1e-3, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999, 0.9999];

/// Standardized `Y` quantiles of the conditional law at levels above `beta`.
/// Splitting there lets each piece adapt to the local spread, which can be
/// many orders of magnitude below 1 for strong dependence. Levels whose
/// quantile cannot be computed are skipped.
fn split_points<Q>(m: &BivariateModel, beta: f64, cond_quantile: Q) -> Vec<f64>
where
    Q: Fn(f64) -> Result<f64>,
{
    let mut z: Vec<f64> = SPLIT_OFFSETS
        .iter()
        .map(|s| beta + (1.0 - beta) * s)
        .filter(|&t| t > beta && t < 1.0)
        .filter_map(|t| cond_quantile(t).ok())
        .filter(|&v| v > 0.0 && v < 1.0)
        .map(|v| m.marginal_y.std_quantile(v))
        .filter(|z| z.is_finite())
        .collect();
    z.sort_by(f64::total_cmp);
    z.dedup();
    z
}

/// `∫_{z0}^∞ z · k(F(z)) f(z) dz` on the standardized scale of `Y`
/// (`z0 = -∞` when `None`), split at `splits`. `mass` is the probability
/// carried by the range and scales the tolerance.
fn standardized_tail<K>(m: &BivariateModel, z0: Option<f64>, splits: &[f64], mass: f64, mut weight: K) -> Result<f64>
where
    K: FnMut(f64, f64) -> Result<f64>,
{
    let y = &m.marginal_y;
    let tol = TAIL_TOLERANCE * mass;
    let mut failure = None;
    let mut integrand = |z: f64| {
        let dens = y.std_pdf(z);
        if dens == 0.0 {
            return 0.0;
        }
        // largest double below 1 keeps copula scores finite
        let v = y.std_cdf(z).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
        let ln_v = if z > 0.0 { (-y.std_sf(z)).ln_1p() } else { v.ln() };
        match weight(v, ln_v) {
            Ok(w) => z * w * dens,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };

    let mut points: Vec<f64> = z0.into_iter().collect();
    points.extend(splits.iter().copied().filter(|&z| z0.is_none_or(|z0| z > z0)));
    if points.is_empty() {
        points.push(0.0);
    }
    // tail map scales follow the spacing of the outermost pieces
    let spacing = |a: f64, b: f64| {
        let d = (b - a).abs();
        if d > 0.0 {
            d
        } else {
            1.0
        }
    };
    let n = points.len();
    let mut total = 0.0;
    if z0.is_none() {
        let scale = if n > 1 { spacing(points[0], points[1]) } else { 1.0 };
        total += quad::adaptive_lower(&mut integrand, points[0], scale, tol)?;
    }
    for w in points.windows(2) {
        total += quad::adaptive(&mut integrand, w[0], w[1], tol)?;
    }
    let scale = if n > 1 { spacing(points[n - 2], points[n - 1]) } else { 1.0 };
    total += quad::adaptive_upper(&mut integrand, points[n - 1], scale, tol)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Conditional density of `V` given `U ≥ α`: `(1 - ∂_v C(α, v))/(1 - α)`.
fn exceed_weight(c: &Copula, alpha: f64, v: f64, ln_v: f64) -> Result<f64> {
    Ok((1.0 - c.partial_v_ln(alpha, v, ln_v)?) / (1.0 - alpha))
}

/// Tail integral under `U ≥ α` above the level `beta` (whole line for
/// `beta = 0`), with `z0` the standardized quantile at `beta`.
fn standardized_tail_geq(m: &BivariateModel, alpha: f64, beta: f64, z0: Option<f64>) -> Result<f64> {
    let c = m.copula;
    let splits = split_points(m, beta, |t| c.cond_exceed_quantile(alpha, t));
    match c.family() {
        CopulaFamily::Comonotone => {
            // V = U: the conditional law is uniform on (α, 1)
            let za = m.marginal_y.std_quantile(alpha);
            let start = z0.map_or(za, |z| z.max(za));
            standardized_tail(m, Some(start), &splits, 1.0 - beta, |_, _| Ok(1.0 / (1.0 - alpha)))
        }
        _ => standardized_tail(m, z0, &splits, 1.0 - beta, |v, ln_v| exceed_weight(&c, alpha, v, ln_v)),
    }
}

/// `CoES_{α,β}(Y|X) = (1/(1-β)) ∫_β^1 CoVaR_{α,t}(Y|X) dt`.
pub fn coes_geq(m: &BivariateModel, levels: Levels) -> Result<f64> {
    m.marginal_y.require_finite_mean()?;
    let covar = covar_geq(m, levels)?;
    let y = &m.marginal_y;
    let z0 = (covar - y.location()) / y.scale();
    let integral = standardized_tail_geq(m, levels.alpha, levels.beta, Some(z0))?;
    Ok(y.location() + y.scale() * integral / (1.0 - levels.beta))
}

/// `CoES=_{α,β}(Y|X) = (1/(1-β)) ∫_β^1 CoVaR=_{α,t}(Y|X) dt`.
pub fn coes_eq(m: &BivariateModel, levels: Levels) -> Result<f64> {
    m.marginal_y.require_finite_mean()?;
    let covar = covar_eq(m, levels)?;
    let y = &m.marginal_y;
    let z0 = (covar - y.location()) / y.scale();
    let c = m.copula;
    let alpha = levels.alpha;
    let splits = split_points(m, levels.beta, |t| c.cond_equal_quantile(alpha, t));
    let integral = standardized_tail(m, Some(z0), &splits, 1.0 - levels.beta, |v, _| c.density(alpha, v))?;
    Ok(y.location() + y.scale() * integral / (1.0 - levels.beta))
}

/// Marginal expected shortfall `E[Y | X ≥ VaR_α(X)] = ∫_0^1 CoVaR_{α,t} dt`.
pub fn mes(m: &BivariateModel, alpha: f64) -> Result<f64> {
    check_probability_open("alpha", alpha)?;
    m.marginal_y.require_finite_mean()?;
    let integral = standardized_tail_geq(m, alpha, 0.0, None)?;
    Ok(m.marginal_y.location() + m.marginal_y.scale() * integral)
}

/// Systemic impact index of institution `i`:
/// `1 + Σ_{j≠i} P(Y_j ≥ VaR_α(Y_j) | Y_i ≥ VaR_α(Y_i))`, with one copula per
/// pair `(Y_i, Y_j)`.
pub fn sii(pair_copulas: &[Copula], alpha: f64) -> Result<f64> {
    check_probability_open("alpha", alpha)?;
    let conditional: f64 = pair_copulas
        .iter()
        .map(|c| c.joint_survival(alpha, alpha) / (1.0 - alpha))
        .sum();
    Ok(1.0 + conditional)
}

/// `ΔCoVaR_{α,β} = CoVaR=_{α,β}(Y|X) - VaR_β(Y)`.
pub fn dcovar(m: &BivariateModel, levels: Levels) -> Result<f64> {
    Ok(covar_eq(m, levels)? - m.marginal_y.value_at_risk(levels.beta)?)
}

/// `Δ-med-CoVaR_{α,β} = CoVaR=_{α,β}(Y|X) - VaR_β(Y | X = med X)`.
pub fn dmedcovar(m: &BivariateModel, levels: Levels) -> Result<f64> {
    let at_median = m.copula.cond_equal_quantile(0.5, levels.beta)?;
    Ok(covar_eq(m, levels)? - quantile_y(m, at_median)?)
}

/// `CoVaR_{α,β}(Y|X) / VaR_α(Y)` for the chosen variant.
pub fn covar_ratio(m: &BivariateModel, levels: Levels, variant: Variant) -> Result<f64> {
    let var = m.marginal_y.value_at_risk(levels.alpha)?;
    if var.abs() <= 1e-14 * m.marginal_y.scale() {
        return Err(CovarError::DivisionByZero("VaR_α(Y) is zero"));
    }
    let covar = match variant {
        Variant::Eq => covar_eq(m, levels)?,
        Variant::Geq => covar_geq(m, levels)?,
    };
    Ok(covar / var)
}

/// `Σ wᵢ CoES_{αᵢ,β}(Y|Xᵢ)`. All components must share the same `Y`.
pub fn weighted_coes(agg: &StressAggregate) -> Result<f64> {
    check_probability_open("beta", agg.beta)?;
    let Some(first) = agg.components.first() else {
        return Err(CovarError::Invalid("aggregate has no components".into()));
    };
    let mut total = 0.0;
    for comp in &agg.components {
        if !(comp.weight >= 0.0 && comp.weight.is_finite()) {
            return Err(CovarError::domain("weight", comp.weight, "w ≥ 0"));
        }
        if comp.model.marginal_y != first.model.marginal_y {
            return Err(CovarError::Invalid(
                "all components must share the same marginal of Y".into(),
            ));
        }
        if comp.weight > 0.0 {
            total += comp.weight * coes_geq(&comp.model, Levels::new(comp.alpha, agg.beta)?)?;
        }
    }
    Ok(total)
}

/// Evaluate a measure by name; used by sweeps and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    CovarGeq,
    CovarEq,
    CoesGeq,
    CoesEq,
    Mes,
    Dcovar,
    Dmedcovar,
    RatioGeq,
    RatioEq,
    VarY,
    EsY,
    Beta0,
}

impl Measure {
    pub const ALL: [Measure; 12] = [
        Measure::CovarGeq,
        Measure::CovarEq,
        Measure::CoesGeq,
        Measure::CoesEq,
        Measure::Mes,
        Measure::Dcovar,
        Measure::Dmedcovar,
        Measure::RatioGeq,
        Measure::RatioEq,
        Measure::VarY,
        Measure::EsY,
        Measure::Beta0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::CovarGeq => "covar_geq",
            Measure::CovarEq => "covar_eq",
            Measure::CoesGeq => "coes_geq",
            Measure::CoesEq => "coes_eq",
            Measure::Mes => "mes",
            Measure::Dcovar => "dcovar",
            Measure::Dmedcovar => "dmedcovar",
            Measure::RatioGeq => "ratio_geq",
            Measure::RatioEq => "ratio_eq",
            Measure::VarY => "var_y",
            Measure::EsY => "es_y",
            Measure::Beta0 => "beta0",
        }
    }

    pub fn parse(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn evaluate(&self, m: &BivariateModel, levels: Levels) -> Result<f64> {
        match self {
            Measure::CovarGeq => covar_geq(m, levels),
            Measure::CovarEq => covar_eq(m, levels),
            Measure::CoesGeq => coes_geq(m, levels),
            Measure::CoesEq => coes_eq(m, levels),
            Measure::Mes => mes(m, levels.alpha),
            Measure::Dcovar => dcovar(m, levels),
            Measure::Dmedcovar => dmedcovar(m, levels),
            Measure::RatioGeq => covar_ratio(m, levels, Variant::Geq),
            Measure::RatioEq => covar_ratio(m, levels, Variant::Eq),
            Measure::VarY => m.marginal_y.value_at_risk(levels.beta),
            Measure::EsY => m.marginal_y.expected_shortfall(levels.beta),
            Measure::Beta0 => crate::ordering::beta0(&m.copula, levels.alpha),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
