//! Exact evaluation of exponential integrals and exponential lattice sums
//! over rational polytopes, including the degenerate cases where the
//! classical vertex-cone expansion has singular terms.
//!
//! The crate keeps all geometry in exact rational arithmetic and carries
//! meromorphic values as truncated Laurent series along generic complex
//! lines, at configurable floating precision (MPFR-backed).

pub mod brion;
pub mod corpus;
pub mod decompose;
pub mod error;
pub mod euler;
pub mod eval;
pub mod hull;
pub mod inner;
pub mod lattice;
pub mod levi;
pub mod matrix;
pub mod normal_forms;
pub mod numeric;
pub mod oracle;
pub mod polytope;
pub mod rat;
pub mod series;
pub mod xi;

pub use error::{Error, Result};
pub use inner::InnerProduct;
pub use lattice::Lattice;
pub use matrix::{QMatrix, QVector};
pub use rat::Rat;
