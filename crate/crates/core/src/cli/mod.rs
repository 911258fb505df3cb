//! Command layer shared by the binary and the tests: input grammar, canonical
//! printers, reports and the command dispatcher.

pub mod parse;
pub mod print;
pub mod report;
mod run;

pub use parse::{parse_expression, parse_source, to_polynomial, Expr, SourceSystem};
pub use print::print_source;
pub use run::{run, Command, Outcome, EXIT_FAILURE, EXIT_INPUT, EXIT_OK, EXIT_UNDECIDED};

use crate::algebra::Rational;
use crate::lieeq::DEFAULT_SEED;
use crate::lintype::DEFAULT_RMAX;

/// Options common to all subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// Overrides the cap from the input header.
    pub cap: Option<u32>,
    pub seed: u64,
    pub rmax: u32,
    /// Evaluation point for ranks and symbols; the origin when absent.
    pub point: Option<Vec<Rational>>,
    pub epsilon: Vec<Rational>,
    pub oracle_degree: Option<u32>,
}

impl Default for Config {
    fn default() -> Self {
        Config { cap: None, seed: DEFAULT_SEED, rmax: DEFAULT_RMAX, point: None, epsilon: Vec::new(), oracle_degree: None }
    }
}
