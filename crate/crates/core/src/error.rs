use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("operator is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("operator does not have unit trace (trace {trace})")]
    NotUnitTrace { trace: f64 },
    #[error("invalid exponent p = {0} (need p >= 1)")]
    InvalidExponent(f64),
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("RK4 grid refinement hit the cap of {steps} steps (residual {residual:e})")]
    ConvergenceCap { steps: usize, residual: f64 },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("unknown scenario id `{0}`")]
    UnknownScenario(String),
    #[error("zero denominator with nonzero numerator {numerator:e}")]
    ZeroDenominator { numerator: f64 },
    #[error("quadrature under-resolved (relative residual {residual:e})")]
    UnderResolved { residual: f64 },
    #[error("observable spectrum is degenerate (gap {gap:e})")]
    DegenerateSpectrum { gap: f64 },
    #[error("configuration error: {0}")]
    Config(String),
}

impl QslError {
    /// Failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QslError::ConvergenceCap { .. }
                | QslError::NonFinite(_)
                | QslError::ZeroDenominator { .. }
                | QslError::UnderResolved { .. }
        )
    }
}

pub type Result<T, E = QslError> = std::result::Result<T, E>;
