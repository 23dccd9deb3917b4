use thiserror::Error;

/// Errors raised by the constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not hermitian (asymmetry {asymmetry:e} > threshold {threshold:e})")]
    NotHermitian { asymmetry: f64, threshold: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("element is not positive (eigenvalue {eigenvalue:e} in block {block})")]
    NotPositive { eigenvalue: f64, block: usize },
    #[error("left action is not a *-representation: {0}")]
    NotRepresentation(String),
    #[error("left action is degenerate (unit acts with residual {0:e})")]
    NotNondegenerate(f64),
    #[error("multiplicities do not add up to the ambient dimension: {0}")]
    NonIntegralMultiplicity(String),
    #[error("middle algebras do not match")]
    MiddleAlgebraMismatch,
    #[error("kernels differ (gram residual {0:e})")]
    KernelMismatch(f64),
    #[error("kernel is not hermitian (residual {0:e})")]
    NotHermitianKernel(f64),
    #[error("kernel is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPd { eigenvalue: f64 },
    #[error("map is not completely positive (eigenvalue {eigenvalue:e})")]
    NotCp { eigenvalue: f64 },
    #[error("kernel is not completely positive definite (eigenvalue {eigenvalue:e})")]
    NotCpd { eigenvalue: f64 },
    #[error("point sets differ")]
    PointSetMismatch,
    #[error("map is not a phi-map (residual {0:e})")]
    NotPhiMap(f64),
    #[error("generator is not conditionally positive definite (eigenvalue {eigenvalue:e})")]
    NotCondPd { eigenvalue: f64 },
    #[error("normalized generator is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NormalizationNotPsd { eigenvalue: f64 },
    #[error("Fock truncation insufficient: {0}")]
    TruncationInsufficient(String),
    #[error("semigroup is not completely positive at t = {time}")]
    NotCpAtTime { time: f64 },
    #[error("semigroup kernel is not completely positive definite at t = {time}")]
    NotCpdAtTime { time: f64 },
    #[error("functional {index} is not positive (eigenvalue {eigenvalue:e})")]
    NotPositiveFunctional { index: usize, eigenvalue: f64 },
    #[error("kernel sums are not S-positive (eigenvalue {eigenvalue:e} for functional {functional})")]
    NotSPositiveKernel { eigenvalue: f64, functional: usize },
    #[error("element is not S-positive: {0}")]
    NotSPositive(String),
    #[error("invalid *-algebra: {0}")]
    InvalidAlgebra(String),
    #[error("{what} exceeds configured cap {cap}")]
    CapExceeded { what: String, cap: usize },
    #[error("validation failed: {0}")]
    Validation(String),
}

impl Error {
    /// Malformed or oversized input, as opposed to a failed mathematical
    /// check on well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ShapeMismatch(_)
                | Error::NotHermitian { .. }
                | Error::NonFinite
                | Error::NotRepresentation(_)
                | Error::NotNondegenerate(_)
                | Error::NonIntegralMultiplicity(_)
                | Error::MiddleAlgebraMismatch
                | Error::NotHermitianKernel(_)
                | Error::PointSetMismatch
                | Error::TruncationInsufficient(_)
                | Error::NotPositiveFunctional { .. }
                | Error::InvalidAlgebra(_)
                | Error::CapExceeded { .. }
                | Error::Validation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
