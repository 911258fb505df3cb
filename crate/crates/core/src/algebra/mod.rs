//! Exact arithmetic: rationals, multivariate polynomials, truncated power
//! series, exact linear algebra and the implicit-function solver.

mod implicit;
mod matrix;
mod monomial;
mod poly;
mod rational;
mod series;

pub use implicit::implicit_solve;
pub use matrix::{ExactMatrix, RowReducer, SparseRow};
pub use monomial::MultiIndex;
pub use poly::{unify_contexts, Ctx, Polynomial, VarContext};
pub use rational::{parse_rational, rat, random_rational, Rational};
pub use series::TruncatedSeries;
