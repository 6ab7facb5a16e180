//! Hierarchical (L-) and periodic (1-FPN) succinct specifications of graphs
//! and Boolean formulas, with partial-expansion approximation schemes whose
//! running time depends on the size of the succinct input, not on the size of
//! the expanded object.
//!
//! The usual pipeline is: parse a document ([`spec`]), optionally expand it
//! ([`expansion`]), run a scheme ([`schemes`]) and access the result through
//! [`solution`] (size, membership query, streaming, solution specification).

pub mod error;
pub mod expansion;
pub mod generate;
pub mod graph;
pub mod hier;
pub mod partial;
pub mod schemes;
pub mod solution;
pub mod solvers;
pub mod spec;

pub use error::{Error, Result};
