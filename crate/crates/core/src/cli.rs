//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for domain or configuration errors (including
//! a failed `verify` check), 2 for numerical non-convergence.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::backtest::{
    metadata_header, reports_to_csv, reports_to_json, run_table, sig6, write_file, SampleCloud, TableFamily,
};
use crate::error::{CovarError, Result};
use crate::marginals::Marginal;
use crate::measures::{BivariateModel, Levels, Measure};
use crate::copulas::Copula;
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "covar", version, about = "CoVaR, CoES and violation-rate backtests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one measure and print a JSON record.
    Measure(MeasureArgs),
    /// Evaluate measures along a parameter grid.
    Sweep(SweepArgs),
    /// Monte Carlo violation rates for a table of cells.
    Backtest(BacktestArgs),
    /// Run the analytic verification checks.
    Verify,
    /// Export a sample cloud with threshold lines.
    Cloud(CloudArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gaussian,
    T3,
    #[value(name = "gumbel_t3")]
    GumbelT3,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Location of Y.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    mu: f64,
    /// Scale of Y.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Degrees of freedom of the t margins (and t copula).
    #[arg(long, default_value_t = 3.0)]
    nu: f64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    alpha: f64,
    /// Defaults to alpha.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    measure: String,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Values or ranges `start:stop:step`, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Level pairs `alpha:beta`, comma separated.
    #[arg(long)]
    levels: Option<String>,
    /// Measure names, comma separated.
    #[arg(long)]
    measure: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct BacktestArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long, default_value = "0.95:0.95,0.99:0.99,0.95:0.99,0.99:0.95")]
    levels: String,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    /// Use n = 10^7 samples per cell.
    #[arg(long, conflicts_with = "n")]
    full: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CloudArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Parse `argv` (including the program name), run the command and return
/// the process exit code. Output goes to stdout or the requested file;
/// diagnostics go to stderr.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Measure(a) => run_measure(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Backtest(a) => run_backtest(a),
        Command::Verify => run_verify(),
        Command::Cloud(a) => run_cloud(a),
    }
}

fn family_name(f: FamilyArg) -> &'static str {
    match f {
        FamilyArg::Gaussian => "gaussian",
        FamilyArg::T3 => "t3",
        FamilyArg::GumbelT3 => "gumbel_t3",
    }
}

fn param_flag(f: FamilyArg) -> &'static str {
    match f {
        FamilyArg::GumbelT3 => "--theta",
        _ => "--rho",
    }
}

/// Pick the parameter flag that belongs to the family and reject the other.
fn pick<T>(f: FamilyArg, rho: Option<T>, theta: Option<T>) -> Result<T> {
    let (want, other) = match f {
        FamilyArg::GumbelT3 => (theta, rho.map(|_| "--rho")),
        _ => (rho, theta.map(|_| "--theta")),
    };
    if let Some(flag) = other {
        return Err(CovarError::config(flag, format!("not a parameter of family {}", family_name(f))));
    }
    want.ok_or_else(|| CovarError::config(param_flag(f), "required for this family"))
}

fn build_model(m: &ModelArgs, param: f64) -> Result<BivariateModel> {
    let y = |kind_t: bool| -> Result<Marginal> {
        if kind_t {
            Marginal::student_t(m.nu, m.mu, m.sigma)
        } else {
            Marginal::normal(m.mu, m.sigma)
        }
    };
    match m.family {
        FamilyArg::Gaussian => Ok(BivariateModel::new(
            Marginal::standard_normal(),
            y(false)?,
            Copula::gaussian(param)?,
        )),
        FamilyArg::T3 => Ok(BivariateModel::new(
            Marginal::student_t(m.nu, 0.0, 1.0)?,
            y(true)?,
            Copula::student_t(param, m.nu)?,
        )),
        FamilyArg::GumbelT3 => Ok(BivariateModel::new(
            Marginal::student_t(m.nu, 0.0, 1.0)?,
            y(true)?,
            Copula::gumbel(param)?,
        )),
    }
}

fn parse_f64(token: &str) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CovarError::config(token, "not a finite number"))
}

/// Comma-separated values and inclusive ranges `start:stop:step`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in spec.split(',') {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse_f64(x)?),
            [a, b, h] => {
                let (a, b, h) = (parse_f64(a)?, parse_f64(b)?, parse_f64(h)?);
                if h <= 0.0 || b < a {
                    return Err(CovarError::config(item, "range needs start ≤ stop and step > 0"));
                }
                let steps = ((b - a) / h + 1e-12).floor() as usize;
                if steps > 10_000_000 {
                    return Err(CovarError::config(item, "range has too many points"));
                }
                for i in 0..=steps {
                    let x = a + i as f64 * h;
                    // snap near-grid values so published points are hit exactly
                    let rounded = (x * 1e12).round() / 1e12;
                    out.push(if (rounded - x).abs() <= 1e-12 { rounded } else { x });
                }
            }
            _ => return Err(CovarError::config(item, "expected a number or start:stop:step")),
        }
    }
    if out.is_empty() {
        return Err(CovarError::config(spec, "empty grid"));
    }
    Ok(out)
}

/// Comma-separated `alpha:beta` pairs.
pub fn parse_levels(spec: &str) -> Result<Vec<Levels>> {
    spec.split(',')
        .map(|item| {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| CovarError::config(item, "expected alpha:beta"))?;
            Levels::new(parse_f64(a)?, parse_f64(b)?).map_err(|e| CovarError::config(item, e.to_string()))
        })
        .collect()
}

fn parse_measures(spec: &str) -> Result<Vec<Measure>> {
    spec.split(',')
        .map(|s| {
            Measure::parse(s.trim()).ok_or_else(|| {
                let names: Vec<&str> = Measure::ALL.iter().map(|m| m.name()).collect();
                CovarError::config(s, format!("unknown measure; expected one of {}", names.join(", ")))
            })
        })
        .collect()
}

fn levels_from(alpha: f64, beta: Option<f64>) -> Result<Levels> {
    Levels::new(alpha, beta.unwrap_or(alpha))
}

fn emit(path: Option<&PathBuf>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(|source| CovarError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn config_echo(parts: &[(&str, String)]) -> String {
    parts
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_measure(a: MeasureArgs) -> Result<i32> {
    let param = pick(a.model.family, a.rho, a.theta)?;
    let model = build_model(&a.model, param)?;
    let levels = levels_from(a.alpha, a.beta)?;
    let measure = parse_measures(&a.measure)?;
    let [measure] = measure.as_slice() else {
        return Err(CovarError::config(&a.measure, "exactly one measure expected"));
    };
    let value = measure.evaluate(&model, levels)?;
    let record = json!({
        "family": family_name(a.model.family),
        "param": param,
        "mu": a.model.mu,
        "sigma": a.model.sigma,
        "nu": a.model.nu,
        "alpha": levels.alpha,
        "beta": levels.beta,
        "measure": measure.name(),
        "value": value,
    });
    emit(None, &format!("{record}\n"))?;
    Ok(0)
}

fn run_sweep(a: SweepArgs) -> Result<i32> {
    let grid = parse_grid(&pick(a.model.family, a.rho.clone(), a.theta.clone())?)?;
    let levels = match (&a.levels, a.alpha) {
        (Some(spec), None) => parse_levels(spec)?,
        (None, Some(alpha)) => vec![levels_from(alpha, a.beta)?],
        (Some(_), Some(_)) => return Err(CovarError::config("--levels", "use either --levels or --alpha/--beta")),
        (None, None) => return Err(CovarError::config("--alpha", "levels are required")),
    };
    let measures = parse_measures(&a.measure)?;
    let pname = &param_flag(a.model.family)[2..];

    let mut rows = Vec::new();
    for &l in &levels {
        for &p in &grid {
            let model = build_model(&a.model, p)?;
            let values = measures
                .iter()
                .map(|m| m.evaluate(&model, l))
                .collect::<Result<Vec<f64>>>()?;
            rows.push((p, l, values));
        }
    }

    let contents = match a.out.format {
        FormatArg::Csv => {
            let config = config_echo(&[
                ("command", "sweep".into()),
                ("family", family_name(a.model.family).into()),
                (pname, a.rho.clone().or(a.theta.clone()).unwrap_or_default()),
                ("mu", a.model.mu.to_string()),
                ("sigma", a.model.sigma.to_string()),
                ("nu", a.model.nu.to_string()),
                ("measure", a.measure.clone()),
            ]);
            let mut s = metadata_header(None, &config);
            s.push_str(&format!("family,{pname},alpha,beta"));
            for m in &measures {
                s.push(',');
                s.push_str(m.name());
            }
            s.push('\n');
            for (p, l, values) in &rows {
                s.push_str(&format!("{},{},{},{}", family_name(a.model.family), sig6(*p), sig6(l.alpha), sig6(l.beta)));
                for v in values {
                    s.push_str(&format!(",{v}"));
                }
                s.push('\n');
            }
            s
        }
        FormatArg::Json => {
            let records: Vec<serde_json::Value> = rows
                .iter()
                .map(|(p, l, values)| {
                    let mut rec = serde_json::Map::new();
                    rec.insert("family".into(), json!(family_name(a.model.family)));
                    rec.insert(pname.into(), json!(p));
                    rec.insert("alpha".into(), json!(l.alpha));
                    rec.insert("beta".into(), json!(l.beta));
                    for (m, v) in measures.iter().zip(values) {
                        rec.insert(m.name().into(), json!(v));
                    }
                    serde_json::Value::Object(rec)
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&records).expect("serializable"))
        }
    };
    emit(a.out.output.as_ref(), &contents)?;
    Ok(0)
}

fn run_backtest(a: BacktestArgs) -> Result<i32> {
    let spec = pick(a.family, a.rho.clone(), a.theta.clone())?;
    let params = parse_grid(&spec)?;
    let levels = parse_levels(&a.levels)?;
    let n = if a.full { 10_000_000 } else { a.n };
    if n == 0 {
        return Err(CovarError::config("--n", "must be at least 1"));
    }
    let family = TableFamily::parse(family_name(a.family)).expect("known family");
    let reports = run_table(family, &params, &levels, n, a.seed)?;
    let contents = match a.out.format {
        FormatArg::Csv => {
            let config = config_echo(&[
                ("command", "backtest".into()),
                ("family", family.name().into()),
                (family.param_name(), spec),
                ("levels", a.levels.clone()),
                ("n", n.to_string()),
            ]);
            reports_to_csv(&reports, a.seed, &config)
        }
        FormatArg::Json => reports_to_json(&reports),
    };
    emit(a.out.output.as_ref(), &contents)?;
    Ok(0)
}

fn run_verify() -> Result<i32> {
    let outcomes = verify::run_all();
    let mut out = String::new();
    for o in &outcomes {
        out.push_str(&format!("{} {}: {}\n", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail));
    }
    emit(None, &out)?;
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
}

fn run_cloud(a: CloudArgs) -> Result<i32> {
    let param = pick(a.model.family, a.rho, a.theta)?;
    let model = build_model(&a.model, param)?;
    let levels = levels_from(a.alpha, a.beta)?;
    if a.n == 0 {
        return Err(CovarError::config("--n", "must be at least 1"));
    }
    let cloud = SampleCloud::new(&model, a.n, levels, a.seed)?;
    let config = config_echo(&[
        ("command", "cloud".into()),
        ("family", family_name(a.model.family).into()),
        (&param_flag(a.model.family)[2..], param.to_string()),
        ("mu", a.model.mu.to_string()),
        ("sigma", a.model.sigma.to_string()),
        ("nu", a.model.nu.to_string()),
        ("alpha", levels.alpha.to_string()),
        ("beta", levels.beta.to_string()),
        ("n", a.n.to_string()),
    ]);
    emit(a.output.as_ref(), &cloud.to_csv(a.seed, &config))?;
    Ok(0)
}
