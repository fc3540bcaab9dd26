//! Monte Carlo violation rates next to the exact model rates.
//!
//! `cargo run --release --example backtest_tables -- [n] [seed]`

use covar::backtest::{model_violation_rate, run_table, TableFamily};
use covar::measures::Levels;

fn main() -> covar::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let levels = [Levels::equal(0.95)?, Levels::equal(0.99)?];
    for (family, params) in [
        (TableFamily::Gaussian, vec![0.0, 0.5, 0.9]),
        (TableFamily::T3, vec![0.0, 0.5, 0.9]),
        (TableFamily::GumbelT3, vec![1.0, 1.5, 3.0]),
    ] {
        println!("{family} (n = {n}, seed = {seed})");
        println!("  {:>5}  level         variant  simulated  exact", family.param_name());
        for r in run_table(family, &params, &levels, n, seed)? {
            let exact = model_violation_rate(&family.model(r.param)?, Levels::new(r.alpha, r.beta)?, r.variant)?;
            println!(
                "  {:>5}  ({:.2}, {:.2})  {:<7}  {:.4}     {:.4}",
                r.param, r.alpha, r.beta, r.variant.as_str(), r.violation_rate, exact
            );
        }
    }
    Ok(())
}
