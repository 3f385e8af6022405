use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown lattice `{0}` (expected one of: chain-nn, chain-nn-finite, chain-nnn, triangular, bcc, honeycomb, diamond)")]
    UnknownLattice(String),

    #[error("periodic ring size must be at least 3, got {0}")]
    RingTooSmall(usize),

    #[error("chain-nn-finite needs a ring size")]
    MissingRingSize,

    #[error("hopping label {label} out of range 1..={count}")]
    UnknownLabel { label: usize, count: usize },

    #[error("invalid lattice description: {0}")]
    InvalidLattice(String),

    #[error("walk length {n} exceeds the enumeration bound {bound} for dimension {dimension}")]
    OracleBound { n: u32, bound: u32, dimension: usize },

    #[error("quadrature grid of {nodes} nodes exceeds the limit of {limit}")]
    GridTooLarge { nodes: u128, limit: u128 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operation requires a two-sublattice lattice, `{0}` has one")]
    NotTwoSublattice(String),

    #[error("operation requires an even ring size, got {0}")]
    OddRing(usize),

    #[error("multi-index has {got} entries, lattice has {expected} hopping labels")]
    IndexArity { got: usize, expected: usize },

    #[error("label assignment: {0}")]
    InvalidAssignment(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
