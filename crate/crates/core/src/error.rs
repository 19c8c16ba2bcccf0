use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {residual:e} > {bound:e})")]
    NotHermitian { residual: f64, bound: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("window of {d_w} states is invalid for dimension {d}")]
    InvalidWindow { d_w: usize, d: usize },

    #[error("k = {0} non-resonance scan refused (k must be 1..=4 unless overridden)")]
    ResonanceOrder(usize),

    #[error("spectrum is resonant: {count} coincidences at k = {k}")]
    Resonant { k: usize, count: usize },

    #[error("frequency group {omega:e} mixes diagonal and off-diagonal pairs")]
    ResonanceConflict { omega: f64 },

    #[error("operator has zero norm{0}")]
    ZeroNorm(&'static str),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("Rényi order {0} is below 1")]
    RenyiOrder(f64),

    #[error("Weingarten table needs d >= n (n = {n}, d = {d})")]
    SingularGram { n: usize, d: usize },

    #[error("invalid tensor network: {0}")]
    InvalidNetwork(String),

    #[error("linear system is singular")]
    Singular,

    #[error("weight derivation left an unrepresentable residual")]
    Unrepresentable,

    #[error("logarithm argument {0} is not positive")]
    Domain(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
