//! Exact lattice point counting in rational polytopes.
//!
//! Polytopes are decomposed into signed sums of simplicial cones of bounded
//! index whose short rational generating functions are then specialized to
//! a count.

pub mod arith;
pub mod cone;
pub mod decompose;
pub mod engine;
pub mod error;
pub mod genfun;
pub mod irrational;

pub use error::{Error, Result};
pub mod lp;
pub mod polytope;
