use covar::measures::*;
use covar::ordering::{beta0, concordance_leq, gaussian_derivative_sign, monotonicity_sweep, Sign};
use covar::special::norm_quantile;
use covar::{Copula, CovarError, Marginal};

fn lv(a: f64, b: f64) -> Levels {
    Levels::new(a, b).unwrap()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn t3_geq_ratio_increases_with_level() {
    let m = BivariateModel::student_t(0.5, 3.0).unwrap();
    let mut last = f64::NEG_INFINITY;
    for i in 0..10 {
        let a = 0.90 + 0.01 * i as f64;
        let r = covar_ratio(&m, lv(a, a), Variant::Geq).unwrap();
        assert!(r > last, "alpha={a}: {r} <= {last}");
        last = r;
    }
}

#[test]
fn gaussian_eq_ratio_is_constant_in_level() {
    let m = BivariateModel::gaussian(0.6, 0.0, 1.0).unwrap();
    let base = covar_ratio(&m, lv(0.9, 0.9), Variant::Eq).unwrap();
    for a in [0.92, 0.95, 0.975, 0.99] {
        assert!((covar_ratio(&m, lv(a, a), Variant::Eq).unwrap() - base).abs() < 1e-9);
    }
}

#[test]
fn coes_eq_t3_is_not_monotone() {
    let l = lv(0.95, 0.95);
    let sweep = monotonicity_sweep(&grid(0.05, 0.95, 25), |r| BivariateModel::student_t(r, 3.0), Measure::CoesEq, l).unwrap();
    assert!(!sweep.is_monotone());
    let sweep = monotonicity_sweep(&grid(0.05, 0.95, 25), |r| BivariateModel::gaussian(r, 0.0, 1.0), Measure::CoesGeq, l).unwrap();
    assert!(sweep.is_monotone());
}

#[test]
fn zero_correlation_reductions() {
    let m = BivariateModel::gaussian(0.0, 1.0, 2.0).unwrap();
    let l = lv(0.95, 0.9);
    assert!(dcovar(&m, l).unwrap().abs() < 1e-9);
    assert!(dmedcovar(&m, l).unwrap().abs() < 1e-9);
    let es = m.marginal_y.expected_shortfall(0.9).unwrap();
    assert!((coes_eq(&m, l).unwrap() - es).abs() < 1e-8);
    assert!((coes_geq(&m, l).unwrap() - es).abs() < 1e-8);
}

#[test]
fn weighted_coes_three_gaussian_components() {
    let comps: Vec<StressComponent> = [0.2, 0.5, 0.8]
        .iter()
        .map(|&r| StressComponent {
            model: BivariateModel::gaussian(r, 0.0, 1.0).unwrap(),
            weight: 1.0 / 3.0,
            alpha: 0.95,
        })
        .collect();
    let mean = comps
        .iter()
        .map(|c| coes_geq(&c.model, lv(0.95, 0.95)).unwrap())
        .sum::<f64>()
        / 3.0;
    let agg = StressAggregate { components: comps, beta: 0.95 };
    assert!(agg.is_coherent());
    assert!((weighted_coes(&agg).unwrap() - mean).abs() < 1e-12);
}

#[test]
fn ratio_with_zero_var_is_an_error() {
    let m = BivariateModel::gaussian(0.3, 0.0, 1.0).unwrap();
    assert!(matches!(covar_ratio(&m, lv(0.5, 0.9), Variant::Geq), Err(CovarError::DivisionByZero(_))));
}

#[test]
fn derivative_sign_special_points() {
    let l = lv(0.95, 0.95);
    assert_eq!(gaussian_derivative_sign(0.5, l), Sign::Positive);
    let at_critical = gaussian_covar_eq_derivative(1.0, std::f64::consts::FRAC_1_SQRT_2, l);
    assert!(at_critical.abs() < 1e-12);
    assert_eq!(gaussian_derivative_sign(-0.9, lv(0.95, 0.3)), Sign::Positive);
}

#[test]
fn four_sign_cases() {
    // (α, β) quadrant -> (sign just below the stationary point, just above)
    let cases = [
        (0.95, 0.9, 1.0, Sign::Positive, Sign::Negative),
        (0.95, 0.2, -1.0, Sign::Negative, Sign::Positive),
        (0.1, 0.9, -1.0, Sign::Positive, Sign::Negative),
        (0.1, 0.2, 1.0, Sign::Negative, Sign::Positive),
    ];
    for (a, b, side, below, above) in cases {
        let l = lv(a, b);
        let r0 = side * rho_critical(l).unwrap();
        assert_eq!(gaussian_derivative_sign(r0 - 0.02, l), below, "({a}, {b})");
        assert_eq!(gaussian_derivative_sign(r0 + 0.02, l), above, "({a}, {b})");
    }
}

#[test]
fn beta0_decreases_with_dependence() {
    let mut last = f64::INFINITY;
    for r in grid(0.0, 0.95, 20) {
        let b = beta0(&Copula::gaussian(r).unwrap(), 0.95).unwrap();
        assert!(b <= last + 1e-12 && b <= 0.5 + 1e-12);
        last = b;
    }
    let mut last = f64::INFINITY;
    for t in grid(1.0, 4.0, 16) {
        let b = beta0(&Copula::gumbel(t).unwrap(), 0.95).unwrap();
        assert!(b <= last + 1e-12);
        last = b;
    }
}

#[test]
fn scale_and_dependence_ordering_above_beta0() {
    // σ_Y < σ'_Y and ρ ≤ ρ': CoVaR ordering holds once β ≥ β₀
    let (m1, m2) = (
        BivariateModel::gaussian(0.3, 0.0, 1.0).unwrap(),
        BivariateModel::gaussian(0.6, 0.0, 1.5).unwrap(),
    );
    for alpha in [0.9, 0.95, 0.99] {
        let b0 = beta0(&m1.copula, alpha).unwrap().max(beta0(&m2.copula, alpha).unwrap());
        for beta in grid(b0.max(1e-3), 0.999, 30) {
            let l = lv(alpha, beta);
            assert!(covar_geq(&m1, l).unwrap() <= covar_geq(&m2, l).unwrap() + 1e-10);
        }
    }
    // below β₀ the larger scale pushes the quantile further down
    let l = lv(0.5, 0.05);
    assert!(covar_geq(&m1, l).unwrap() > covar_geq(&m2, l).unwrap());
}

#[test]
fn geq_ordering_agrees_with_concordance() {
    let levels: Vec<Levels> = [0.9, 0.95, 0.99]
        .iter()
        .flat_map(|&a| [0.1, 0.5, 0.9, 0.95, 0.99].map(|b| lv(a, b)))
        .collect();
    let t = Marginal::student_t(3.0, 0.0, 1.0).unwrap();
    let model = |c: Copula| BivariateModel::new(t, t, c);
    let pairs = [
        (Copula::gaussian(0.2).unwrap(), Copula::gaussian(0.6).unwrap()),
        (Copula::gaussian(0.6).unwrap(), Copula::gaussian(0.2).unwrap()),
        (Copula::gumbel(1.5).unwrap(), Copula::gumbel(2.5).unwrap()),
        (Copula::gumbel(2.5).unwrap(), Copula::gumbel(1.5).unwrap()),
    ];
    for (c1, c2) in pairs {
        let covar_ordered = levels
            .iter()
            .all(|&l| covar_geq(&model(c1), l).unwrap() <= covar_geq(&model(c2), l).unwrap() + 1e-10);
        let concordant = concordance_leq(&c1, &c2, 50, 1e-12).is_ordered();
        assert_eq!(covar_ordered, concordant, "{c1} vs {c2}");
    }
}

#[test]
fn gaussian_dmedcovar_is_linear() {
    let l = lv(0.95, 0.95);
    let za = norm_quantile(0.95);
    for r in grid(0.05, 0.95, 25) {
        let m = BivariateModel::gaussian(r, 0.0, 1.0).unwrap();
        assert!((dmedcovar(&m, l).unwrap() - za * r).abs() < 1e-6);
    }
}

#[test]
fn comonotone_coes_eq_is_unsupported() {
    let m = BivariateModel::new(Marginal::standard_normal(), Marginal::standard_normal(), Copula::comonotone());
    assert!(matches!(coes_eq(&m, lv(0.9, 0.9)), Err(CovarError::Unsupported { .. })));
}

#[test]
fn measure_names_round_trip() {
    for m in Measure::ALL {
        assert_eq!(Measure::parse(m.name()), Some(m));
    }
    assert_eq!(Measure::parse("nope"), None);
}
