//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subspace is not rational with respect to the lattice")]
    NonRationalSubspace,
    #[error("sublattice does not have finite index")]
    NotFiniteIndex,
    #[error("subspaces or cones are not orthogonal")]
    NotOrthogonal,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polyhedron is empty")]
    Empty,
    #[error("face is not xi-constant")]
    NotXiConstant,
    #[error("cone is not pointed")]
    NotPointed,
    #[error("cone is not rational with respect to the lattice")]
    NotRational,
    #[error("line is not generic: {0}")]
    NonGenericLine(String),
    #[error("no generic direction found after {0} draws")]
    ExhaustedRetries(usize),
    #[error("series truncation too shallow: order {order} with truncation {trunc}")]
    TruncationTooShallow { order: i64, trunc: i64 },
    #[error("restriction of xi to a flag face vanishes")]
    ZeroRestriction,
    #[error("a Levi value failed the holomorphy check (margin {0:.3e})")]
    HolomorphyViolation(f64),
    #[error("quadrature tolerance not reached")]
    ToleranceNotReached,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
