//! Bivariate copulas and the conditional laws of `V` given `{U = α}` and
//! `{U ≥ α}`.
//!
//! Elliptical copulas (Gaussian, Student-t) are evaluated through their
//! conditional structure: with scores `a = G⁻¹(u)`, `b = G⁻¹(v)` for the
//! univariate score law `G`,
//!
//! ```text
//! C(u, v) = ∫_{-∞}^{a} g(s) H(b | s) ds,
//! ```
//!
//! where `H(· | s)` is the exact conditional CDF of the second score given the
//! first (normal for the Gaussian copula, scaled t with ν+1 degrees of
//! freedom for the t copula). The one-dimensional integral is computed by
//! adaptive Gauss–Legendre quadrature. For `a > 0` the complementary mass
//! `P(U > u, V ≤ v)` is integrated instead, which keeps tail quantities such
//! as `v - C(α, v)` free of cancellation.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Open01, StandardNormal};

use crate::error::{check_probability_open, CovarError, Result};
use crate::quad;
use crate::rng::{rng_from_seed, McRng};
use crate::roots::{solve_increasing, VALUE_TOLERANCE};
use crate::special::{norm_cdf, norm_pdf, norm_quantile, StdT};

const CDF_TOLERANCE: f64 = 1e-14;

/// Parameters of a [`Copula`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CopulaFamily {
    Gaussian { rho: f64 },
    StudentT { rho: f64, nu: f64 },
    Gumbel { theta: f64 },
    Independence,
    Comonotone,
}

impl CopulaFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CopulaFamily::Gaussian { .. } => "Gaussian",
            CopulaFamily::StudentT { .. } => "Student-t",
            CopulaFamily::Gumbel { .. } => "Gumbel",
            CopulaFamily::Independence => "independence",
            CopulaFamily::Comonotone => "comonotone",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Score {
    Normal,
    T { nu: f64, t: StdT, t1: StdT },
}

/// Gaussian or t copula in score coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Elliptical {
    rho: f64,
    /// √(1 - ρ²)
    s: f64,
    score: Score,
}

impl Elliptical {
    fn score_cdf(&self, x: f64) -> f64 {
        match &self.score {
            Score::Normal => norm_cdf(x),
            Score::T { t, .. } => t.cdf(x),
        }
    }

    fn score_pdf(&self, x: f64) -> f64 {
        match &self.score {
            Score::Normal => norm_pdf(x),
            Score::T { t, .. } => t.pdf(x),
        }
    }

    fn score_quantile(&self, p: f64) -> f64 {
        match &self.score {
            Score::Normal => norm_quantile(p),
            Score::T { t, .. } => t.quantile(p),
        }
    }

    /// Scale of the second score given the first equals `a`.
    fn cond_scale(&self, a: f64) -> f64 {
        match &self.score {
            Score::Normal => self.s,
            Score::T { nu, .. } => self.s * ((nu + a * a) / (nu + 1.0)).sqrt(),
        }
    }

    /// `P(second score ≤ b | first score = a)`.
    fn h(&self, b: f64, a: f64) -> f64 {
        if b == f64::INFINITY {
            return 1.0;
        }
        if b == f64::NEG_INFINITY {
            return 0.0;
        }
        let z = (b - self.rho * a) / self.cond_scale(a);
        match &self.score {
            Score::Normal => norm_cdf(z),
            Score::T { t1, .. } => t1.cdf(z),
        }
    }

    /// Inverse of [`Self::h`] in `b`, in closed form.
    fn h_inverse(&self, p: f64, a: f64) -> f64 {
        let z = match &self.score {
            Score::Normal => norm_quantile(p),
            Score::T { t1, .. } => t1.quantile(p),
        };
        self.rho * a + self.cond_scale(a) * z
    }

    /// `P(first ≤ a, second ≤ b)`.
    fn lower_mass(&self, a: f64, b: f64) -> f64 {
        quad::adaptive_lower(|s| self.score_pdf(s) * self.h(b, s), a, 1.0, CDF_TOLERANCE)
            .expect("integrand is bounded and smooth")
    }

    /// `P(first > a, second ≤ b)`.
    fn upper_mass(&self, a: f64, b: f64) -> f64 {
        quad::adaptive_upper(|s| self.score_pdf(s) * self.h(b, s), a, 1.0, CDF_TOLERANCE)
            .expect("integrand is bounded and smooth")
    }

    fn density_scores(&self, a: f64, b: f64) -> f64 {
        let (rho, s2) = (self.rho, self.s * self.s);
        match &self.score {
            // exponent of φ₂(a, b)/(φ(a) φ(b))
            Score::Normal => (-rho * (rho * a * a - 2.0 * a * b + rho * b * b) / (2.0 * s2)).exp() / self.s,
            Score::T { nu, t, .. } => {
                // quadratic form scaled by m² to survive scores near 1e200
                let m = a.abs().max(b.abs()).max(1.0);
                let (x, y) = (a / m, b / m);
                let q = (x * x - 2.0 * rho * x * y + y * y) / s2;
                let ln_q = 2.0 * m.ln() + (1.0 / (m * m) + q / nu).ln();
                let ln_joint = -(nu + 2.0) / 2.0 * ln_q - (2.0 * PI * self.s).ln();
                (ln_joint - t.ln_pdf(a) - t.ln_pdf(b)).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Elliptical(Elliptical),
    Gumbel(f64),
    Independence,
    Comonotone,
}

/// A bivariate copula `C(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Copula {
    family: CopulaFamily,
    kind: Kind,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > -1.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(CovarError::domain("rho", rho, "open interval (-1, 1); use Comonotone for ρ = 1"))
    }
}

impl Copula {
    pub fn gaussian(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Copula {
            family: CopulaFamily::Gaussian { rho },
            kind: Kind::Elliptical(Elliptical {
                rho,
                s: (1.0 - rho * rho).sqrt(),
                score: Score::Normal,
            }),
        })
    }

    pub fn student_t(rho: f64, nu: f64) -> Result<Self> {
        check_rho(rho)?;
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(CovarError::domain("nu", nu, "ν > 0"));
        }
        Ok(Copula {
            family: CopulaFamily::StudentT { rho, nu },
            kind: Kind::Elliptical(Elliptical {
                rho,
                s: (1.0 - rho * rho).sqrt(),
                score: Score::T {
                    nu,
                    t: StdT::new(nu),
                    t1: StdT::new(nu + 1.0),
                },
            }),
        })
    }

    /// Gumbel copula, `θ ∈ [1, ∞)`; `θ = 1` is the independence copula.
    pub fn gumbel(theta: f64) -> Result<Self> {
        if !(theta >= 1.0 && theta.is_finite()) {
            return Err(CovarError::domain(
                "theta",
                theta,
                "[1, ∞); use Comonotone for θ = ∞",
            ));
        }
        Ok(Copula {
            family: CopulaFamily::Gumbel { theta },
            kind: if theta == 1.0 {
                Kind::Independence
            } else {
                Kind::Gumbel(theta)
            },
        })
    }

    pub fn independence() -> Self {
        Copula {
            family: CopulaFamily::Independence,
            kind: Kind::Independence,
        }
    }

    pub fn comonotone() -> Self {
        Copula {
            family: CopulaFamily::Comonotone,
            kind: Kind::Comonotone,
        }
    }

    pub fn from_family(family: CopulaFamily) -> Result<Self> {
        match family {
            CopulaFamily::Gaussian { rho } => Copula::gaussian(rho),
            CopulaFamily::StudentT { rho, nu } => Copula::student_t(rho, nu),
            CopulaFamily::Gumbel { theta } => Copula::gumbel(theta),
            CopulaFamily::Independence => Ok(Copula::independence()),
            CopulaFamily::Comonotone => Ok(Copula::comonotone()),
        }
    }

    pub fn family(&self) -> CopulaFamily {
        self.family
    }

    /// `C(u, v)`; arguments are clamped to `[0, 1]`.
    pub fn cdf(&self, u: f64, v: f64) -> f64 {
        let (u, v) = (u.clamp(0.0, 1.0), v.clamp(0.0, 1.0));
        if u == 0.0 || v == 0.0 {
            return 0.0;
        }
        if u == 1.0 {
            return v;
        }
        if v == 1.0 {
            return u;
        }
        match &self.kind {
            Kind::Independence => u * v,
            Kind::Comonotone => u.min(v),
            Kind::Gumbel(theta) => {
                let (x, y) = (-u.ln(), -v.ln());
                (-(x.powf(*theta) + y.powf(*theta)).powf(1.0 / theta)).exp()
            }
            Kind::Elliptical(e) => {
                let (a, b) = (e.score_quantile(u), e.score_quantile(v));
                if a <= 0.0 {
                    e.lower_mass(a, b)
                } else {
                    v - e.upper_mass(a, b)
                }
            }
        }
    }

    /// `v - C(u, v) = P(U > u, V ≤ v)`, evaluated without cancellation.
    pub fn exceed_mass(&self, u: f64, v: f64) -> f64 {
        let (u, v) = (u.clamp(0.0, 1.0), v.clamp(0.0, 1.0));
        if u == 0.0 || v == 0.0 || u == 1.0 {
            return v - self.cdf(u, v);
        }
        if v == 1.0 {
            return 1.0 - u;
        }
        match &self.kind {
            Kind::Independence => v * (1.0 - u),
            Kind::Comonotone => (v - u).max(0.0),
            Kind::Gumbel(theta) => {
                // v - C = v (1 - exp(-(A - y))), A - y = y ((1 + (x/y)^θ)^{1/θ} - 1)
                let (x, y) = (-u.ln(), -v.ln());
                let r = (x / y).powf(*theta);
                let gap = y * (r.ln_1p() / theta).exp_m1();
                -v * (-gap).exp_m1()
            }
            Kind::Elliptical(e) => {
                let (a, b) = (e.score_quantile(u), e.score_quantile(v));
                if a <= 0.0 {
                    v - e.lower_mass(a, b)
                } else {
                    e.upper_mass(a, b)
                }
            }
        }
    }

    /// Joint survival `P(U > u, V > v) = 1 - u - v + C(u, v)`.
    pub fn joint_survival(&self, u: f64, v: f64) -> f64 {
        (1.0 - u.clamp(0.0, 1.0)) - self.exceed_mass(u, v)
    }

    /// `F_{V|U≥α}(v) = (v - C(α, v))/(1 - α)`.
    pub fn cond_exceed_cdf(&self, alpha: f64, v: f64) -> f64 {
        (self.exceed_mass(alpha, v) / (1.0 - alpha)).clamp(0.0, 1.0)
    }

    /// `F_{V|U=α}(v) = ∂C/∂u (α, v)`.
    pub fn cond_equal_cdf(&self, alpha: f64, v: f64) -> Result<f64> {
        let v = v.clamp(0.0, 1.0);
        if let Kind::Comonotone = self.kind {
            return Err(CovarError::Unsupported {
                operation: "conditioning on U = α",
                copula: "comonotone",
            });
        }
        if v == 0.0 || v == 1.0 {
            return Ok(v);
        }
        Ok(match &self.kind {
            Kind::Independence => v,
            Kind::Gumbel(theta) => gumbel_partial(*theta, alpha, v),
            Kind::Elliptical(e) => e.h(e.score_quantile(v), e.score_quantile(alpha)),
            Kind::Comonotone => unreachable!(),
        })
    }

    /// `∂C/∂v (u, v)`: the law of `U` given `V = v`, evaluated at `u`.
    pub(crate) fn partial_v(&self, u: f64, v: f64) -> Result<f64> {
        // all supported families are exchangeable
        self.cond_equal_cdf(v, u)
    }

    /// `∂C/∂v (u, v)` given `ln v` as well, which keeps the Gumbel
    /// generator accurate when `v` rounds to 1.
    pub(crate) fn partial_v_ln(&self, u: f64, v: f64, ln_v: f64) -> Result<f64> {
        match &self.kind {
            Kind::Gumbel(theta) if v > 0.0 && v < 1.0 => Ok(gumbel_partial_ln(*theta, ln_v, u.ln())),
            _ => self.partial_v(u, v),
        }
    }

    /// Copula density `c(u, v)` on the open unit square.
    pub fn density(&self, u: f64, v: f64) -> Result<f64> {
        Ok(match &self.kind {
            Kind::Independence => 1.0,
            Kind::Comonotone => {
                return Err(CovarError::Unsupported {
                    operation: "copula density",
                    copula: "comonotone",
                })
            }
            Kind::Gumbel(theta) => {
                let (x, y) = (-u.ln(), -v.ln());
                let sum = x.powf(*theta) + y.powf(*theta);
                let a = sum.powf(1.0 / theta);
                (-a).exp() / (u * v) * (x * y).powf(theta - 1.0) * a.powf(1.0 - 2.0 * theta) * (a + theta - 1.0)
            }
            Kind::Elliptical(e) => e.density_scores(e.score_quantile(u), e.score_quantile(v)),
        })
    }

    /// The `β`-quantile of `V` given `U ≥ α`.
    pub fn cond_exceed_quantile(&self, alpha: f64, beta: f64) -> Result<f64> {
        check_probability_open("alpha", alpha)?;
        check_probability_open("beta", beta)?;
        match &self.kind {
            Kind::Independence => Ok(beta),
            Kind::Comonotone => Ok(alpha + (1.0 - alpha) * beta),
            _ => solve_increasing(
                |v| self.cond_exceed_cdf(alpha, v) - beta,
                0.0,
                1.0,
                VALUE_TOLERANCE,
            ),
        }
    }

    /// The `β`-quantile of `V` given `U = α`.
    pub fn cond_equal_quantile(&self, alpha: f64, beta: f64) -> Result<f64> {
        check_probability_open("alpha", alpha)?;
        check_probability_open("beta", beta)?;
        match &self.kind {
            Kind::Independence => Ok(beta),
            Kind::Comonotone => Err(CovarError::Unsupported {
                operation: "conditioning on U = α",
                copula: "comonotone",
            }),
            _ => solve_increasing(
                |v| self.cond_equal_cdf(alpha, v).expect("supported") - beta,
                0.0,
                1.0,
                VALUE_TOLERANCE,
            ),
        }
    }

    /// Closed-form inverse of `cond_equal_cdf` where one exists (Gaussian, t,
    /// independence). Used to cross-check the root finder.
    pub fn cond_equal_quantile_closed_form(&self, alpha: f64, beta: f64) -> Option<f64> {
        match &self.kind {
            Kind::Independence => Some(beta),
            Kind::Elliptical(e) => {
                let a = e.score_quantile(alpha);
                Some(e.score_cdf(e.h_inverse(beta, a)))
            }
            _ => None,
        }
    }

    /// Population Kendall's tau.
    pub fn kendall_tau(&self) -> f64 {
        match self.family {
            CopulaFamily::Gaussian { rho } | CopulaFamily::StudentT { rho, .. } => 2.0 / PI * rho.asin(),
            CopulaFamily::Gumbel { theta } => 1.0 - 1.0 / theta,
            CopulaFamily::Independence => 0.0,
            CopulaFamily::Comonotone => 1.0,
        }
    }

    /// `n` i.i.d. draws `(u, v)`, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = rng_from_seed(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }

    /// One draw from the copula.
    pub fn draw(&self, rng: &mut McRng) -> (f64, f64) {
        match &self.kind {
            Kind::Independence => (rng.sample(Open01), rng.sample(Open01)),
            Kind::Comonotone => {
                let u: f64 = rng.sample(Open01);
                (u, u)
            }
            Kind::Gumbel(theta) => draw_gumbel(*theta, rng),
            Kind::Elliptical(e) => {
                let (x, y) = self.draw_scores(rng).expect("elliptical");
                (e.score_cdf(x), e.score_cdf(y))
            }
        }
    }

    /// For elliptical copulas, one draw in score coordinates: a standard
    /// bivariate normal (or t) pair with correlation ρ. `None` otherwise.
    pub fn draw_scores(&self, rng: &mut McRng) -> Option<(f64, f64)> {
        let Kind::Elliptical(e) = &self.kind else {
            return None;
        };
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let (x, y) = (z1, e.rho * z1 + e.s * z2);
        match &e.score {
            Score::Normal => Some((x, y)),
            Score::T { nu, .. } => {
                let w: f64 = ChiSquared::new(*nu).expect("ν > 0").sample(rng);
                let m = (nu / w).sqrt();
                Some((m * x, m * y))
            }
        }
    }
}

fn gumbel_partial(theta: f64, u: f64, v: f64) -> f64 {
    gumbel_partial_ln(theta, u.ln(), v.ln())
}

/// `∂C/∂u` from `ln u` and `ln v`.
fn gumbel_partial_ln(theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    let (x, y) = (-ln_u, -ln_v);
    let a = (x.powf(theta) + y.powf(theta)).powf(1.0 / theta);
    // C · A^{1-θ} · x^{θ-1} / u, with C = exp(-A)
    ((-a) + (1.0 - theta) * a.ln() + (theta - 1.0) * x.ln() - ln_u).exp()
}

/// Marshall–Olkin draw: positive stable frailty with Laplace transform
/// `exp(-t^{1/θ})` (Kanter / Chambers–Mallows–Stuck), then
/// `Uᵢ = exp(-(Eᵢ/S)^{1/θ})`.
fn draw_gumbel(theta: f64, rng: &mut McRng) -> (f64, f64) {
    let a = 1.0 / theta;
    let w: f64 = PI * rng.sample::<f64, _>(Open01);
    let e0: f64 = rng.sample(Exp1);
    let s = (a * w).sin() / w.sin().powf(1.0 / a) * (((1.0 - a) * w).sin() / e0).powf((1.0 - a) / a);
    let e1: f64 = rng.sample(Exp1);
    let e2: f64 = rng.sample(Exp1);
    ((-(e1 / s).powf(a)).exp(), (-(e2 / s).powf(a)).exp())
}

impl fmt::Display for Copula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            CopulaFamily::Gaussian { rho } => write!(f, "Gaussian(ρ={rho})"),
            CopulaFamily::StudentT { rho, nu } => write!(f, "t(ρ={rho}, ν={nu})"),
            CopulaFamily::Gumbel { theta } => write!(f, "Gumbel(θ={theta})"),
            CopulaFamily::Independence => write!(f, "Independence"),
            CopulaFamily::Comonotone => write!(f, "Comonotone"),
        }
    }
}
