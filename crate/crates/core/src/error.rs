use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice side length {0}: must be even and at least 4")]
    InvalidLattice(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("no antiparallel pair exists in a fully polarized configuration")]
    NoAntiparallelPair,
    #[error("empty chain")]
    EmptyChain,
    #[error("no sample has zero magnetization")]
    EmptySector,
    #[error("lag {lag} out of range for series of length {len}")]
    LagOutOfRange { lag: usize, len: usize },
    #[error("series has zero variance (stuck chain)")]
    StuckChain,
    #[error("series of length {0} too short for a self-consistent autocorrelation window")]
    ChainTooShort(usize),
    #[error("need at least {needed} usable chains, have {have}")]
    TooFewChains { needed: usize, have: usize },
    #[error("{excluded} of {total} chains excluded as stuck")]
    ExclusionThreshold { excluded: usize, total: usize },
    #[error("need at least {needed} points, have {have}")]
    TooFewPoints { needed: usize, have: usize },
    #[error("baseline energy is zero")]
    ZeroBaseline,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("iterative eigensolver did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("enumeration over {0} spins exceeds the size guard")]
    SizeGuard(usize),
    #[error("sampling interval search failed: {0}")]
    IntervalSearch(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
