//! Error type shared by every numerical module.

use thiserror::Error;

/// Typed failure of a numerical operation. Poles, domain violations, and
/// divergent inputs are reported here instead of leaking NaN or infinity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MathError {
    /// Hurwitz zeta at its unique pole s = 1.
    #[error("hurwitz zeta has a pole at s = 1")]
    PoleAtOne,
    /// Argument outside the implemented domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation at a pole of the target function.
    #[error("pole: {0}")]
    Pole(String),
    /// A series or infinite product that does not converge for the input.
    #[error("divergent: {0}")]
    Divergence(String),
    /// A spectrum descriptor that admits no regularized determinant
    /// (zero mode, wrong half-plane, or a gamma pole in the closed form).
    #[error("invalid spectrum: {0}")]
    Spectrum(String),
    /// Matrix with a (numerically) zero eigenvalue where invertibility is required.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),
    /// Size limits or mismatched dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// A vanishing Euler factor 1 - alpha p^{-s}.
    #[error("zero euler factor: {0}")]
    ZeroDivisor(String),
    /// Matrix input that is not normal within the documented tolerance.
    #[error("matrix is not normal (residual {0:.3e})")]
    NonNormalMatrix(f64),
    /// An intermediate or final value overflowed to infinity or NaN.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, MathError>;
