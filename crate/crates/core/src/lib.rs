//! Ferrers-diagram rank-metric codes.
//!
//! The crate builds linear codes of `m x n` matrices over `F_q` whose
//! codewords vanish outside a Ferrers diagram, and checks them against the
//! Singleton-like dimension bound by exhaustive (or sampled) enumeration.
//!
//! * [`algebra`]: `F_q`, `F_{q^m}` and matrices over both.
//! * [`ferrers`]: diagrams, profiles, the dimension bound, proper combinations.
//! * [`rankcode`]: codes, the `Psi` map, Gabidulin/MDS generators, certificates.
//! * [`constructions`]: every construction, from a diagram to a code.
//! * [`cli`]: text formats and the command implementations behind `fdrm`.

pub mod algebra;
pub mod cli;
pub mod constructions;
pub mod ferrers;
pub mod rankcode;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field too large: {0}")]
    FieldTooLarge(String),
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    ContextMismatch,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid diagram: {0}")]
    Diagram(String),
    #[error("invalid cell map: {0}")]
    CellMap(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
