//! Fast analytic self-checks of the dependence-consistency results.
//!
//! Every check is deterministic and finishes in well under a minute on one
//! core. Monte Carlo tables are not part of this suite; use the backtest
//! command for those.

use rand::Rng;

use crate::copulas::Copula;
use crate::error::Result;
use crate::marginals::Marginal;
use crate::measures::{
    coes_geq, covar_eq, covar_eq_gaussian_analytic, covar_geq, mes, rho_critical, BivariateModel, Levels, Measure,
};
use crate::ordering::{concordance_leq, gaussian_derivative_sign, monotonicity_sweep, Concordance, Sign};
use crate::rng::rng_from_seed;

/// Result of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, r: Result<(bool, String)>) -> CheckOutcome {
    match r {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

const LEVELS: [f64; 3] = [0.9, 0.95, 0.99];

fn level_grid() -> Vec<Levels> {
    LEVELS
        .iter()
        .flat_map(|&a| LEVELS.iter().map(move |&b| Levels { alpha: a, beta: b }))
        .collect()
}

/// Numeric `CoVaR=` against the Gaussian closed form.
pub fn gaussian_closed_form() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &rho in &[-0.9, -0.5, 0.0, 0.5, 0.7071, 0.9] {
        let m = BivariateModel::gaussian(rho, 0.0, 1.0)?;
        for l in level_grid() {
            let d = (covar_eq(&m, l)? - covar_eq_gaussian_analytic(0.0, 1.0, rho, l)?).abs();
            worst = worst.max(d);
        }
    }
    Ok((worst <= 1e-6, format!("max |Δ| = {worst:.3e}")))
}

/// `ρ₀ = 1/√2` at `α = β` and derivative-sign agreement with a central
/// finite difference at `count` random points.
pub fn critical_correlation(count: usize, seed: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &a in &[0.6, 0.9, 0.95, 0.99, 0.3] {
        worst = worst.max((rho_critical(Levels::equal(a)?)? - std::f64::consts::FRAC_1_SQRT_2).abs());
    }
    let mut rng = rng_from_seed(seed);
    let (mut checked, mut mismatches) = (0usize, 0usize);
    while checked < count {
        let rho: f64 = rng.random_range(-0.99..0.99);
        let l = Levels::new(rng.random_range(0.01..0.99), rng.random_range(0.01..0.99))?;
        // stay away from the zero set of the derivative
        if rho_critical(l).map_or(true, |r0| (rho.abs() - r0).abs() < 1e-4) {
            continue;
        }
        let f = |r: f64| covar_eq_gaussian_analytic(0.0, 1.0, r, l);
        let fd = (f(rho + 1e-6)? - f(rho - 1e-6)?) / 2e-6;
        if gaussian_derivative_sign(rho, l) != Sign::of(fd) {
            mismatches += 1;
        }
        checked += 1;
    }
    Ok((
        worst <= 1e-12 && mismatches == 0,
        format!("|ρ₀ - 1/√2| ≤ {worst:.1e}, {mismatches} sign mismatches in {count}"),
    ))
}

/// Concordance ordering on a 50×50 grid, both directions.
pub fn concordance_grid() -> Result<(bool, String)> {
    let pairs = [
        (Copula::gaussian(0.3)?, Copula::gaussian(0.7)?),
        (Copula::gaussian(-0.5)?, Copula::gaussian(0.2)?),
        (Copula::gumbel(1.2)?, Copula::gumbel(2.0)?),
        (Copula::gumbel(1.0)?, Copula::gumbel(3.0)?),
    ];
    let mut ok = true;
    for (lo, hi) in &pairs {
        ok &= concordance_leq(lo, hi, 50, 1e-12) == Concordance::Ordered;
        ok &= !concordance_leq(hi, lo, 50, 1e-12).is_ordered();
    }
    Ok((ok, format!("{} ordered pairs and their reversals", pairs.len())))
}

fn families() -> Vec<(&'static str, Vec<f64>, fn(f64) -> Result<BivariateModel>)> {
    let rho: Vec<f64> = (0..25).map(|i| 0.05 + 0.0375 * i as f64).collect();
    let theta: Vec<f64> = (0..21).map(|i| 1.0 + 0.1 * i as f64).collect();
    vec![
        ("gaussian", rho.clone(), |r| BivariateModel::gaussian(r, 0.0, 1.0)),
        ("t3", rho, |r| BivariateModel::student_t(r, 3.0)),
        ("gumbel_t3", theta, |t| BivariateModel::gumbel_t(t, 3.0)),
    ]
}

/// `covar_geq` nondecreasing in the dependence parameter at `α = β = 0.95`.
pub fn geq_monotone() -> Result<(bool, String)> {
    let l = Levels::equal(0.95)?;
    let mut total = 0;
    for (_, grid, build) in families() {
        total += monotonicity_sweep(&grid, build, Measure::CovarGeq, l)?.violations.len();
    }
    Ok((total == 0, format!("{total} violations")))
}

/// `covar_eq` decreases somewhere in every family.
pub fn eq_non_monotone() -> Result<(bool, String)> {
    let l = Levels::equal(0.95)?;
    let mut flagged = Vec::new();
    for (name, grid, build) in families() {
        let sweep = monotonicity_sweep(&grid, build, Measure::CovarEq, l)?;
        if !sweep.is_monotone() {
            flagged.push(name);
        }
    }
    Ok((flagged.len() == 3, format!("non-monotone: {}", flagged.join(", "))))
}

/// Independence, comonotone, translation and MES limit identities.
pub fn identities() -> Result<(bool, String)> {
    let y = Marginal::student_t(3.0, 0.5, 2.0)?;
    let x = Marginal::standard_normal();
    let l = Levels::new(0.95, 0.9)?;
    let ind = BivariateModel::new(x, y, Copula::independence());
    let com = BivariateModel::new(x, y, Copula::comonotone());
    let g = BivariateModel::gaussian(0.6, 0.0, 1.0)?;
    let mut worst: f64 = 0.0;
    worst = worst.max((covar_geq(&ind, l)? - y.value_at_risk(l.beta)?).abs());
    worst = worst.max((coes_geq(&ind, l)? - y.expected_shortfall(l.beta)?).abs());
    worst = worst.max((mes(&ind, l.alpha)? - y.mean()?).abs());
    worst = worst.max((covar_geq(&com, l)? - y.quantile(l.alpha + (1.0 - l.alpha) * l.beta)?).abs());
    let shifted = g.shift_y(1.75)?;
    worst = worst.max((covar_geq(&shifted, l)? - covar_geq(&g, l)? - 1.75).abs());
    worst = worst.max((covar_eq(&shifted, l)? - covar_eq(&g, l)? - 1.75).abs());
    let limit = (mes(&g, l.alpha)? - coes_geq(&g, Levels::new(l.alpha, 1e-13)?)?).abs();
    Ok((
        worst <= 1e-9 && limit <= 1e-6,
        format!("max identity gap {worst:.2e}, MES limit gap {limit:.2e}"),
    ))
}

/// Run every check.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        outcome("gaussian closed form", gaussian_closed_form()),
        outcome("critical correlation", critical_correlation(1000, 7)),
        outcome("concordance grid", concordance_grid()),
        outcome("covar_geq monotone", geq_monotone()),
        outcome("covar_eq non-monotone", eq_non_monotone()),
        outcome("identities", identities()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        for (name, r) in [
            ("closed form", gaussian_closed_form()),
            ("critical", critical_correlation(200, 1)),
            ("identities", identities()),
        ] {
            let (ok, detail) = r.unwrap();
            assert!(ok, "{name}: {detail}");
        }
    }
}
