use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {element} lies outside the metric horizon {horizon}; rebuild with --horizon {suggested} or more")]
    OutOfHorizon {
        element: String,
        horizon: u32,
        suggested: u32,
    },

    #[error("breadth-first search exceeded the element budget ({budget} keys) while building layer {layer}; lower the horizon or raise --budget")]
    BudgetExceeded { budget: usize, layer: u32 },

    #[error("the identity element has no curvature")]
    IdentityElement,

    #[error("transport curvature needs two distinct points")]
    EqualPoints,

    #[error("{element} is not a dead end")]
    NotDeadEnd { element: String },

    #[error("{element} has no finite depth within {max_depth} steps")]
    DepthExceeded { element: String, max_depth: u32 },

    #[error("the empty word is not a valid argument here")]
    EmptyWord,

    #[error("{0} is not cyclically reduced")]
    NotCyclicallyReduced(String),

    #[error("lamp state at index {index} is the identity of the lamp group")]
    IdentityState { index: i64 },

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("({a}, {b}, {c}) is outside the sector A > B > 0, C >= 0 covered by the closed-form length")]
    OutOfSector { a: i64, b: i64, c: i64 },

    #[error("no sector element of length <= {k} exists for radius {r}")]
    EmptySector { k: u64, r: u32 },

    #[error("word-length sources disagree on {element}: breadth-first {bfs}, closed form {closed}")]
    Disagreement { element: String, bfs: u64, closed: u64 },

    #[error("invalid group description: {0}")]
    InvalidGroup(String),

    #[error("cache file: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
