use thiserror::Error;

/// Errors produced by state construction, measurement channels, and
/// experiment configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Amplitude vector too small to normalize (norm < 1e-14).
    #[error("cannot normalize amplitude vector with norm {norm:.3e}")]
    ZeroVector { norm: f64 },

    #[error("matrix is not Hermitian (max |H - H'| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Conditioning on a measurement outcome whose Born probability is
    /// below the zero threshold (1e-14).
    #[error("outcome group {group} has probability {probability:.3e}; cannot condition on it")]
    ZeroProbabilityOutcome { group: usize, probability: f64 },

    #[error("basis is not orthonormal (max Gram deviation {deviation:.3e})")]
    BasisNotOrthonormal { deviation: f64 },

    #[error("angle {alpha} lies outside [0, pi/2]")]
    AngleOutOfRange { alpha: f64 },

    /// The two hypotheses predict plus-rates closer than 1e-6; no
    /// threshold test can separate them.
    #[error("hypotheses are statistically indistinguishable (rate gap {gap:.3e})")]
    IndistinguishableHypotheses { gap: f64 },

    #[error("matrix trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("state vector is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("group index {index} out of range for {groups} outcome groups")]
    GroupIndexOutOfRange { index: usize, groups: usize },

    #[error("invalid eigensystem: {0}")]
    InvalidEigensystem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
