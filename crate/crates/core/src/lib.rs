//! Exact symbolic engine for infinitesimal symmetries of second-order PDE
//! systems with first-order relations, and for the systems attached to
//! Segre families of real-analytic generic submanifolds.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod fields;
pub mod jets;
pub mod lieeq;
pub mod lintype;
pub mod segre;
pub mod systems;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/jets.md")]
    mod jets {}
    #[doc = include_str!("../../../book/src/lie-equations.md")]
    mod lie_equations {}
    #[doc = include_str!("../../../book/src/finite-type.md")]
    mod finite_type {}
    #[doc = include_str!("../../../book/src/segre.md")]
    mod segre {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
