//! Expected-shortfall style measures: CoES, MES, SII and a weighted CoES
//! across several stress sources.

use covar::measures::*;
use covar::Copula;

fn main() -> covar::Result<()> {
    let levels = Levels::equal(0.95)?;
    let m = BivariateModel::student_t(0.6, 3.0)?;
    println!("covar_geq {:.4}", covar_geq(&m, levels)?);
    println!("coes_geq  {:.4}", coes_geq(&m, levels)?);
    println!("coes_eq   {:.4}", coes_eq(&m, levels)?);
    println!("mes       {:.4}", mes(&m, levels.alpha)?);
    println!("es_y      {:.4}", m.marginal_y.expected_shortfall(levels.beta)?);

    // pairwise copulas between one institution and three others
    let pairs = [Copula::gaussian(0.3)?, Copula::student_t(0.5, 4.0)?, Copula::gumbel(1.8)?];
    println!("sii       {:.4}", sii(&pairs, 0.99)?);

    let components = [(0.3, 0.5), (0.6, 0.3), (0.9, 0.2)]
        .iter()
        .map(|&(rho, weight)| {
            Ok(StressComponent { model: BivariateModel::student_t(rho, 3.0)?, weight, alpha: 0.95 })
        })
        .collect::<covar::Result<Vec<_>>>()?;
    let agg = StressAggregate { components, beta: 0.95 };
    println!("weighted  {:.4} (coherent weights: {})", weighted_coes(&agg)?, agg.is_coherent());
    Ok(())
}
