use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid algebra definition: {0}")]
    InvalidAlgebra(String),

    #[error("the algebra has no sl2 triple configured")]
    NoSl2Triple,

    #[error("Killing form restricted to the frame is degenerate (|det| = {0:e})")]
    DegenerateKilling(f64),

    #[error("bracket closure would exceed the cap of {cap} elements")]
    ClosureCap { cap: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("no convergence after {iterations} iterations (closure defect {defect:e})")]
    NonConvergence { iterations: usize, defect: f64 },

    #[error("lattice rank {rank} exceeds the enumeration cap {cap}")]
    RankCap { rank: usize, cap: usize },

    #[error("radius {radius} exceeds the cap {cap}")]
    RadiusCap { radius: f64, cap: f64 },

    #[error("singular input: {0}")]
    Singular(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("enumeration needs {needed} candidates, cap is {cap}")]
    EnumerationCap { needed: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
