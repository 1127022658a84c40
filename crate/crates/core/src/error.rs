use thiserror::Error;

/// Crate-wide error type. Mathematical impossibilities (violated invariants)
/// are kept separate from resource exhaustion so callers can distinguish
/// "wrong" from "gave up".
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u64),

    #[error("element of Q(zeta_{0}) does not lie in the requested field")]
    NotInField(u64),

    #[error("{0} is not a subfield of {1}")]
    NotSubfield(String, String),

    #[error("squareness undecided for element of Q(zeta_{modulus}) within bounds (certificate primes tried: {primes_tried}, recognition precision: {max_precision} limbs)")]
    Undecided {
        modulus: u64,
        primes_tried: usize,
        max_precision: u32,
    },

    #[error("numeric precision exhausted at {0} bits")]
    PrecisionExhausted(u32),

    #[error("group enumeration exceeded cap of {0} elements")]
    EnumerationCap(usize),

    #[error("group of order {0} is not a p-group")]
    NotPGroup(u64),

    #[error("group is not solvable; decision procedures are unavailable")]
    NotSolvable,

    #[error("character is not orthogonally stable")]
    NotStable,

    #[error("character table construction failed: {0}")]
    TableConstruction(String),

    #[error("invalid table data: {0}")]
    InvalidTable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("oracle has no representation within bounds: {0}")]
    OracleUnavailable(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for invariant violations in internal consistency checks.
pub fn invariant(msg: impl Into<String>) -> Error {
    Error::Invariant(msg.into())
}
