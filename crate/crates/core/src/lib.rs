//! Exact differential computers.
//!
//! Boolean functions are encoded as *additive listings*: polynomials whose monomial
//! support is the set of YES instances, with roots of unity as coefficients. A
//! function is executed by differentiating its listing along the input bits,
//! evaluating at the origin and raising the result to the `m`-th power. The
//! [`chow`] module treats Chow decompositions of listings as the complexity measure
//! of such programs.

pub mod chow;
pub mod cli;
pub mod cyclotomic;
pub mod engine;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod listings;
pub mod multipoly;

pub use cyclotomic::CycloRational;
pub use error::{Error, Result};
pub use multipoly::{Monomial, MultiPoly, VarTable};
