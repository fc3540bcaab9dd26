//! Conditional Value-at-Risk under Gaussian, Student-t and Gumbel dependence.

pub mod backtest;
pub mod cli;
pub mod copulas;
pub mod empirical;
pub mod error;
pub mod marginals;
pub mod measures;
pub mod ordering;
pub mod quad;
pub mod rng;
pub mod roots;
pub mod special;
pub mod verify;

pub use copulas::{Copula, CopulaFamily};
pub use error::{CovarError, Result};
pub use marginals::{Marginal, MarginalKind};
pub use measures::{BivariateModel, Levels, Measure, Variant};
