//! Concordance ordering on a grid and what it implies for CoVaR≥.

use covar::measures::{covar_geq, BivariateModel, Levels};
use covar::ordering::{concordance_leq, Concordance};
use covar::{Copula, Marginal};

fn main() -> covar::Result<()> {
    let pairs = [
        (Copula::gaussian(0.3)?, Copula::gaussian(0.7)?),
        (Copula::gumbel(2.0)?, Copula::gumbel(1.5)?),
        (Copula::gaussian(0.5)?, Copula::gumbel(1.5)?),
    ];
    let t3 = Marginal::student_t(3.0, 0.0, 1.0)?;
    let levels = Levels::equal(0.95)?;
    for (c1, c2) in pairs {
        match concordance_leq(&c1, &c2, 50, 1e-12) {
            Concordance::Ordered => println!("{c1} ≤ {c2} on the grid"),
            Concordance::Violated { u, v, gap } => {
                println!("{c1} ≰ {c2}: C1 - C2 = {gap:.2e} at ({u:.3}, {v:.3})")
            }
        }
        let a = covar_geq(&BivariateModel::new(t3, t3, c1), levels)?;
        let b = covar_geq(&BivariateModel::new(t3, t3, c2), levels)?;
        println!("  covar_geq: {a:.4} vs {b:.4}");
    }
    Ok(())
}
