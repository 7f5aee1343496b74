//! Error type shared across the crate.

use crate::fractional::FractionalMatching;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: u32, n: u32 },

    #[error("self-loop at vertex {0} rejected")]
    SelfLoop(u32),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("compact dictionary capacity {capacity} exceeded")]
    DictCapacityExceeded { capacity: usize },

    #[error("refinement overflow: exceptional class would exceed {limit} vertices (have {have})")]
    RefinementOverflow { limit: usize, have: usize },

    #[error("left and right sides overlap at vertex {0}")]
    SidesOverlap(u32),

    #[error("consolidation failed after {retries} resampling attempts; best attempt attached")]
    ConsolidateRetriesExceeded {
        retries: u32,
        best: Box<FractionalMatching>,
    },

    #[error("single-pass violated: stream already consumed")]
    SinglePassViolated,

    #[error("cascade flush would reach level {level} past the top buffer (t = {top}); cover subroutine exceeded its size bound")]
    CascadeOverflow { level: usize, top: usize },

    #[error("cascade flush-count bound violated at level {level}: k_{level} = {count} > k/2^{}", level - 1)]
    FlushBoundViolated { level: usize, count: u64 },

    #[error("cover subroutine returned {got} edges, above its declared bound {bound}")]
    CoverSizeExceeded { got: usize, bound: u64 },

    #[error("super-edge ({0},{1}) has no usable preimage edge")]
    MissingPreimage(u32, u32),

    #[error("work budget {budget} too small to finish phase `{phase}` within its window")]
    PhaseBudgetExceeded { phase: &'static str, budget: u64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
