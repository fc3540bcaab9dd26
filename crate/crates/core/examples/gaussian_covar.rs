//! Both CoVaR notions in the bivariate normal model, the closed form, and
//! the correlation at which `CoVaR=` turns down.

use covar::measures::{covar_eq, covar_eq_gaussian_analytic, covar_geq, rho_critical, BivariateModel, Levels};

fn main() -> covar::Result<()> {
    let levels = Levels::equal(0.95)?;
    let (mu, sigma) = (0.0, 1.0);
    println!("rho    covar_eq  closed_form  covar_geq");
    for rho in [0.0, 0.2, 0.4, 0.6, 0.7, 0.8, 0.9, 0.95] {
        let m = BivariateModel::gaussian(rho, mu, sigma)?;
        println!(
            "{rho:<5}  {:8.5}  {:11.5}  {:9.5}",
            covar_eq(&m, levels)?,
            covar_eq_gaussian_analytic(mu, sigma, rho, levels)?,
            covar_geq(&m, levels)?
        );
    }
    println!("CoVaR= peaks at rho = {:.6}", rho_critical(levels)?);
    Ok(())
}
