//! Monte Carlo violation-rate backtests.
//!
//! A cell fixes a model, a level pair, a CoVaR variant and its model-implied
//! threshold. A fresh sample of size `n` is drawn and the rate
//! `#{X ≥ VaR_α(X), Y ≥ threshold} / #{X ≥ VaR_α(X)}` is reported with its
//! binomial standard error. For `geq` thresholds the rate is `1 - β` by
//! construction; for `eq` thresholds it measures how badly the equality
//! stress event understates risk under the exceedance event.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::copulas::{Copula, CopulaFamily};
use crate::error::{CovarError, Result};
use crate::marginals::{Marginal, MarginalKind};
use crate::measures::{covar_eq, covar_geq, BivariateModel, Levels, Variant};
use crate::rng::{cell_seed, rng_from_seed, McRng, RNG_ALGORITHM};

/// Tool version written into every output header.
pub const TOOL_VERSION: &str = concat!("covar ", env!("CARGO_PKG_VERSION"));

/// Model families with published backtest tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFamily {
    /// Standard bivariate normal, parameter `ρ`.
    Gaussian,
    /// Bivariate t with 3 degrees of freedom, parameter `ρ`.
    T3,
    /// Gumbel copula with t(3) margins, parameter `θ`.
    GumbelT3,
}

impl TableFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TableFamily::Gaussian => "gaussian",
            TableFamily::T3 => "t3",
            TableFamily::GumbelT3 => "gumbel_t3",
        }
    }

    pub fn parse(s: &str) -> Option<TableFamily> {
        match s {
            "gaussian" => Some(TableFamily::Gaussian),
            "t3" => Some(TableFamily::T3),
            "gumbel_t3" => Some(TableFamily::GumbelT3),
            _ => None,
        }
    }

    /// Name of the dependence parameter.
    pub fn param_name(&self) -> &'static str {
        match self {
            TableFamily::GumbelT3 => "theta",
            _ => "rho",
        }
    }

    pub fn model(&self, param: f64) -> Result<BivariateModel> {
        match self {
            TableFamily::Gaussian => BivariateModel::gaussian(param, 0.0, 1.0),
            TableFamily::T3 => BivariateModel::student_t(param, 3.0),
            TableFamily::GumbelT3 => BivariateModel::gumbel_t(param, 3.0),
        }
    }
}

impl fmt::Display for TableFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One backtest experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktestCell {
    pub model: BivariateModel,
    pub levels: Levels,
    pub variant: Variant,
    /// Model-implied CoVaR tested against the sample.
    pub threshold: f64,
    pub n: usize,
    pub seed: u64,
}

impl BacktestCell {
    /// Cell with the threshold computed from the model.
    pub fn new(model: BivariateModel, levels: Levels, variant: Variant, n: usize, seed: u64) -> Result<Self> {
        let threshold = match variant {
            Variant::Eq => covar_eq(&model, levels)?,
            Variant::Geq => covar_geq(&model, levels)?,
        };
        Ok(BacktestCell {
            model,
            levels,
            variant,
            threshold,
            n,
            seed,
        })
    }
}

/// Counts and rate of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub family: String,
    pub param: f64,
    pub alpha: f64,
    pub beta: f64,
    pub variant: Variant,
    pub n: usize,
    pub seed: u64,
    pub threshold: f64,
    pub conditioning_count: u64,
    pub joint_count: u64,
    pub violation_rate: f64,
    pub std_error: f64,
    pub rng_algorithm: &'static str,
}

/// Source of `(x, y)` draws in natural units.
enum Sampler {
    /// Elliptical copula whose score law equals both standardized margins.
    Scores(Copula, Marginal, Marginal),
    Copula(Copula, Marginal, Marginal),
}

impl Sampler {
    fn new(m: &BivariateModel) -> Sampler {
        if scores_match(&m.copula, &m.marginal_x) && scores_match(&m.copula, &m.marginal_y) {
            Sampler::Scores(m.copula, m.marginal_x, m.marginal_y)
        } else {
            Sampler::Copula(m.copula, m.marginal_x, m.marginal_y)
        }
    }

    fn draw(&self, rng: &mut McRng) -> (f64, f64) {
        match self {
            Sampler::Scores(c, mx, my) => {
                let (a, b) = c.draw_scores(rng).expect("elliptical");
                (mx.location() + mx.scale() * a, my.location() + my.scale() * b)
            }
            Sampler::Copula(c, mx, my) => {
                let (u, v) = c.draw(rng);
                let x = mx.location() + mx.scale() * mx.std_quantile(u);
                let y = my.location() + my.scale() * my.std_quantile(v);
                (x, y)
            }
        }
    }
}

fn scores_match(c: &Copula, m: &Marginal) -> bool {
    match (c.family(), m.kind()) {
        (CopulaFamily::Gaussian { .. }, MarginalKind::Normal) => true,
        (CopulaFamily::StudentT { nu, .. }, MarginalKind::StudentT { nu: mu }) => nu == mu,
        _ => false,
    }
}

/// `n` i.i.d. draws of `(X, Y)`, deterministic in `seed`.
///
/// Elliptical models with matching margins are built directly (Cholesky
/// factor, then `√(ν/W)` mixing for t); all others push copula draws
/// through the marginal quantiles.
pub fn sample_model(m: &BivariateModel, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let sampler = Sampler::new(m);
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| sampler.draw(&mut rng)).collect()
}

/// Run one cell.
pub fn violation_rate(cell: &BacktestCell) -> Result<(u64, u64)> {
    if cell.n == 0 {
        return Err(CovarError::domain("n", 0.0, "n ≥ 1"));
    }
    if !cell.threshold.is_finite() {
        return Err(CovarError::domain("threshold", cell.threshold, "finite real"));
    }
    let m = &cell.model;
    let mut rng = rng_from_seed(cell.seed);
    let (mut cond, mut joint) = (0u64, 0u64);
    match Sampler::new(m) {
        sampler @ Sampler::Scores(..) => {
            let var_x = m.marginal_x.value_at_risk(cell.levels.alpha)?;
            for _ in 0..cell.n {
                let (x, y) = sampler.draw(&mut rng);
                if x >= var_x {
                    cond += 1;
                    joint += (y >= cell.threshold) as u64;
                }
            }
        }
        // same events in copula coordinates: {U ≥ α} and {V ≥ F_Y(threshold)}
        Sampler::Copula(c, _, my) => {
            let alpha = cell.levels.alpha;
            let v_star = my.cdf(cell.threshold);
            for _ in 0..cell.n {
                let (u, v) = c.draw(&mut rng);
                if u >= alpha {
                    cond += 1;
                    joint += (v >= v_star) as u64;
                }
            }
        }
    }
    if cond == 0 {
        return Err(CovarError::NoConditioningEvents { n: cell.n });
    }
    Ok((cond, joint))
}

/// Exact violation probability `P(Y ≥ threshold | X ≥ VaR_α(X))` implied by
/// the model, the value a backtest rate estimates.
pub fn model_violation_rate(m: &BivariateModel, levels: Levels, variant: Variant) -> Result<f64> {
    let threshold = match variant {
        Variant::Eq => covar_eq(m, levels)?,
        Variant::Geq => covar_geq(m, levels)?,
    };
    let v = m.marginal_y.cdf(threshold);
    Ok(m.copula.joint_survival(levels.alpha, v) / (1.0 - levels.alpha))
}

/// Rate and standard error `√(r(1-r)/cond)`.
pub fn rate_and_error(cond: u64, joint: u64) -> (f64, f64) {
    let r = joint as f64 / cond as f64;
    (r, (r * (1.0 - r) / cond as f64).sqrt())
}

/// Run a cell and package the result.
pub fn run_cell(family: &str, param: f64, cell: &BacktestCell) -> Result<BacktestReport> {
    let (cond, joint) = violation_rate(cell)?;
    let (rate, se) = rate_and_error(cond, joint);
    Ok(BacktestReport {
        family: family.to_string(),
        param,
        alpha: cell.levels.alpha,
        beta: cell.levels.beta,
        variant: cell.variant,
        n: cell.n,
        seed: cell.seed,
        threshold: cell.threshold,
        conditioning_count: cond,
        joint_count: joint,
        violation_rate: rate,
        std_error: se,
        rng_algorithm: RNG_ALGORITHM,
    })
}

/// The full `params × levels × {eq, geq}` grid.
///
/// Cell `i` in that enumeration order uses seed `cell_seed(seed, i)`, so any
/// cell can be rerun alone. Output is sorted by `(param, α, β, variant)`.
/// The first failing cell aborts the table.
pub fn run_table(family: TableFamily, params: &[f64], levels: &[Levels], n: usize, seed: u64) -> Result<Vec<BacktestReport>> {
    let mut reports = Vec::with_capacity(params.len() * levels.len() * 2);
    let mut index = 0u64;
    for &p in params {
        let model = family.model(p)?;
        for &l in levels {
            for variant in [Variant::Eq, Variant::Geq] {
                let cell = BacktestCell::new(model, l, variant, n, cell_seed(seed, index))?;
                reports.push(run_cell(family.name(), p, &cell)?);
                index += 1;
            }
        }
    }
    reports.sort_by(|a, b| {
        a.param
            .total_cmp(&b.param)
            .then(a.alpha.total_cmp(&b.alpha))
            .then(a.beta.total_cmp(&b.beta))
            .then(a.variant.cmp(&b.variant))
    });
    Ok(reports)
}

/// `x` with 6 significant digits in the style of C's `%g`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Output encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// `# key: value` metadata lines for CSV outputs.
pub fn metadata_header(seed: Option<u64>, config: &str) -> String {
    let mut s = format!("# tool: {TOOL_VERSION}\n# rng: {RNG_ALGORITHM}\n");
    if let Some(seed) = seed {
        s.push_str(&format!("# seed: {seed}\n"));
    }
    s.push_str(&format!("# config: {config}\n"));
    s
}

pub const CSV_HEADER: &str =
    "family,param,alpha,beta,variant,n,seed,conditioning_count,joint_count,violation_rate,std_error";

/// Table as CSV with a metadata block.
pub fn reports_to_csv(reports: &[BacktestReport], seed: u64, config: &str) -> String {
    let mut out = metadata_header(Some(seed), config);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.family,
            sig6(r.param),
            sig6(r.alpha),
            sig6(r.beta),
            r.variant,
            r.n,
            r.seed,
            r.conditioning_count,
            r.joint_count,
            sig6(r.violation_rate),
            sig6(r.std_error),
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    family: &'a str,
    param: f64,
    alpha: f64,
    beta: f64,
    variant: Variant,
    n: usize,
    seed: u64,
    conditioning_count: u64,
    joint_count: u64,
    violation_rate: f64,
    std_error: f64,
    rng_algorithm: &'a str,
    tool: &'a str,
}

fn rounded(x: f64) -> f64 {
    sig6(x).parse().unwrap_or(x)
}

/// Table as a JSON array of flat records, values rounded as in the CSV.
pub fn reports_to_json(reports: &[BacktestReport]) -> String {
    let records: Vec<JsonRecord> = reports
        .iter()
        .map(|r| JsonRecord {
            family: &r.family,
            param: rounded(r.param),
            alpha: rounded(r.alpha),
            beta: rounded(r.beta),
            variant: r.variant,
            n: r.n,
            seed: r.seed,
            conditioning_count: r.conditioning_count,
            joint_count: r.joint_count,
            violation_rate: rounded(r.violation_rate),
            std_error: rounded(r.std_error),
            rng_algorithm: r.rng_algorithm,
            tool: TOOL_VERSION,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&records).expect("serializable");
    s.push('\n');
    s
}

/// Write `contents` to `path`, attaching the path to I/O errors.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| CovarError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)
}

/// A sample cloud with the three threshold lines of the stress picture.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<(f64, f64)>,
    pub var_alpha_x: f64,
    pub covar_eq: f64,
    pub covar_geq: f64,
}

impl SampleCloud {
    pub fn new(m: &BivariateModel, n: usize, levels: Levels, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(CovarError::domain("n", 0.0, "n ≥ 1"));
        }
        Ok(SampleCloud {
            var_alpha_x: m.marginal_x.value_at_risk(levels.alpha)?,
            covar_eq: covar_eq(m, levels)?,
            covar_geq: covar_geq(m, levels)?,
            points: sample_model(m, n, seed),
        })
    }

    pub fn to_csv(&self, seed: u64, config: &str) -> String {
        let mut out = metadata_header(Some(seed), config);
        out.push_str(&format!(
            "# var_alpha_x: {}\n# covar_eq: {}\n# covar_geq: {}\nx,y\n",
            self.var_alpha_x, self.covar_eq, self.covar_geq
        ));
        for (x, y) in &self.points {
            out.push_str(&format!("{},{}\n", sig6(*x), sig6(*y)));
        }
        out
    }
}

/// Write a sample cloud CSV to `path`.
pub fn sample_cloud_export(m: &BivariateModel, n: usize, levels: Levels, seed: u64, path: &Path) -> Result<SampleCloud> {
    let cloud = SampleCloud::new(m, n, levels, seed)?;
    write_file(path, &cloud.to_csv(seed, &format!("n={n} levels={levels}")))?;
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(0.05), "0.05");
        assert_eq!(sig6(0.252049), "0.252049");
        assert_eq!(sig6(0.2520494), "0.252049");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.000012345678), "1.23457e-5");
        assert_eq!(sig6(9.9999996), "10");
        assert_eq!(sig6(-2.5), "-2.5");
        assert_eq!(sig6(1000000.0), "1e6");
    }

    #[test]
    fn exact_rates() {
        let l = Levels::equal(0.95).unwrap();
        let m = TableFamily::T3.model(0.7).unwrap();
        assert!((model_violation_rate(&m, l, Variant::Geq).unwrap() - 0.05).abs() < 1e-9);
        let g = TableFamily::Gaussian.model(0.9).unwrap();
        assert!((model_violation_rate(&g, l, Variant::Eq).unwrap() - 0.2519).abs() < 1e-4);
    }

    #[test]
    fn independence_rates() {
        let m = TableFamily::GumbelT3.model(1.0).unwrap();
        let l = Levels::equal(0.95).unwrap();
        for variant in [Variant::Eq, Variant::Geq] {
            let cell = BacktestCell::new(m, l, variant, 200_000, 3).unwrap();
            let r = run_cell("gumbel_t3", 1.0, &cell).unwrap();
            assert!((r.violation_rate - 0.05).abs() < 4.0 * r.std_error);
        }
    }

    #[test]
    fn zero_n_and_tiny_n() {
        let m = TableFamily::Gaussian.model(0.5).unwrap();
        let l = Levels::equal(0.99).unwrap();
        let mut cell = BacktestCell::new(m, l, Variant::Geq, 1, 1).unwrap();
        cell.n = 0;
        assert!(violation_rate(&cell).is_err());
        // a handful of draws usually misses the 1% tail
        let misses = (0..20u64)
            .filter(|&s| {
                let c = BacktestCell { n: 3, seed: s, ..cell };
                matches!(violation_rate(&c), Err(CovarError::NoConditioningEvents { .. }))
            })
            .count();
        assert!(misses > 0);
    }

    #[test]
    fn table_is_sorted_and_reproducible() {
        let lv = [Levels::new(0.99, 0.95).unwrap(), Levels::equal(0.95).unwrap()];
        let a = run_table(TableFamily::T3, &[0.5, 0.2], &lv, 2000, 9).unwrap();
        let b = run_table(TableFamily::T3, &[0.5, 0.2], &lv, 2000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        assert_eq!(a[0].param, 0.2);
        assert_eq!((a[0].alpha, a[0].variant), (0.95, Variant::Eq));
        assert_eq!(a[1].variant, Variant::Geq);
        let csv = reports_to_csv(&a, 9, "test");
        assert!(csv.lines().any(|l| l == CSV_HEADER));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 9);
        let json: serde_json::Value = serde_json::from_str(&reports_to_json(&a)).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 8);
    }

    #[test]
    fn cloud_thresholds() {
        let m = TableFamily::Gaussian.model(0.5).unwrap();
        let c = SampleCloud::new(&m, 1, Levels::equal(0.95).unwrap(), 1).unwrap();
        assert_eq!(c.points.len(), 1);
        assert!(c.covar_eq < c.covar_geq);
        let csv = c.to_csv(1, "x");
        assert!(csv.contains("# covar_geq: "));
    }
}
