use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation too small: discarded mass {discarded:.3e} exceeds tolerance {tolerance:.3e}")]
    TruncationTooSmall { discarded: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("instrument is incomplete: |sum Pi_k - 1|_max = {deviation:.3e}")]
    IncompleteInstrument { deviation: f64 },

    #[error("outcome {outcome} has probability {probability:.3e}, too small to condition on")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },

    #[error("measurement is destructive: no post-measurement state exists")]
    DestructiveMeasurement,

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("accessible information {i_acc:.3e} is zero; E/R/D fractions are undefined")]
    ZeroAccessibleInfo { i_acc: f64 },

    #[error("operator is not unitary: |U^dag U - 1|_max = {deviation:.3e}")]
    NonUnitary { deviation: f64 },

    #[error("quadrature did not converge: estimated error {estimate:.3e} > tolerance {tolerance:.3e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("accessible-information oracle failed: {0}")]
    OracleFailure(String),

    #[error("ensemble support dimension {dim} exceeds the optimizer limit {max}")]
    EnsembleTooLarge { dim: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
