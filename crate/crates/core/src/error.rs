use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("leg {leg} of tensor {tensor} is paired more than once")]
    LegPairedTwice { tensor: char, leg: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gate is not unitary: max |U^dag U - I| = {residual:.3e} exceeds {tol:.1e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("isometry condition violated: residual {residual:.3e} exceeds {tol:.1e}")]
    NotIsometric { residual: f64, tol: f64 },

    #[error("coordinate outside lattice: {0}")]
    OutOfLattice(String),

    #[error("memory cap exceeded: {required} amplitudes requested, cap is {cap}")]
    MemoryCap { required: u128, cap: usize },

    #[error("plaquette positions must be pairwise distinct (v_mu != v_nu for mu != nu); {0:?} repeats")]
    DuplicatePosition(Vec<usize>),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
