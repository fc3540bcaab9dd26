//! Gumbel copula with t3 margins: CoVaR, ΔCoVaR and Δ-med-CoVaR along θ.

use covar::measures::{covar_eq, covar_geq, dcovar, dmedcovar, BivariateModel, Levels};
use covar::ordering::beta0;

fn main() -> covar::Result<()> {
    let levels = Levels::new(0.99, 0.95)?;
    println!("theta  covar_eq  covar_geq   dcovar  dmedcovar  beta0");
    for theta in [1.0, 1.1, 1.2, 1.5, 2.0, 2.5, 3.0, 4.0] {
        let m = BivariateModel::gumbel_t(theta, 3.0)?;
        println!(
            "{theta:<5}  {:8.4}  {:9.4}  {:7.4}  {:9.4}  {:.4}",
            covar_eq(&m, levels)?,
            covar_geq(&m, levels)?,
            dcovar(&m, levels)?,
            dmedcovar(&m, levels)?,
            beta0(&m.copula, levels.alpha)?
        );
    }
    Ok(())
}
