use thiserror::Error;

/// Errors raised by the library.
///
/// The variants fall into four families that the command line maps to
/// distinct exit codes: malformed input, unmet preconditions, resource
/// guards, and internal consistency failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gram matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("gram matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("gram matrix is singular")]
    Singular,

    #[error("empty lattice")]
    Empty,

    #[error("scale must be nonzero")]
    ZeroScale,

    #[error("rank {rank} exceeds the supported maximum {max}")]
    RankTooLarge { rank: usize, max: usize },

    #[error("gram entry {entry} exceeds the supported magnitude 2^63")]
    EntryTooLarge { entry: String },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("lattice is odd; {0} requires an even lattice")]
    OddLattice(&'static str),

    #[error("guard exceeded: {what} (estimated cost {estimate}, limit {limit})")]
    Guard {
        what: String,
        estimate: String,
        limit: String,
    },

    #[error("p-adic precision exhausted at p = {prime} with {precision} digits")]
    PrecisionExhausted { prime: u64, precision: u32 },

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
