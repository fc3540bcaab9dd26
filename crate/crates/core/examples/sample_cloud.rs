//! Draw a sample from a t3 model and write it with the VaR and CoVaR lines.
//!
//! `cargo run --example sample_cloud -- out.csv`

use std::path::PathBuf;

use covar::backtest::sample_cloud_export;
use covar::measures::{BivariateModel, Levels};

fn main() -> covar::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("cloud.csv"));
    let m = BivariateModel::student_t(0.7, 3.0)?;
    let cloud = sample_cloud_export(&m, 2000, Levels::equal(0.95)?, 42, &path)?;
    println!("wrote {} points to {}", cloud.points.len(), path.display());
    println!("VaR_0.95(X) = {:.4}", cloud.var_alpha_x);
    println!("CoVaR=      = {:.4}", cloud.covar_eq);
    println!("CoVaR≥      = {:.4}", cloud.covar_geq);
    Ok(())
}
