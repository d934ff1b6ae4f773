use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `I + mu*T` is singular or too ill-conditioned to solve against.
    #[error("singular pencil: reciprocal condition estimate {rcond:.3e}")]
    SingularPencil { rcond: f64 },

    #[error("no convergence after {iterations} iterations (last estimate {last_estimate})")]
    ConvergenceFailure { iterations: usize, last_estimate: f64 },

    #[error("outside supported range: {0}")]
    Range(String),

    #[error("random matrix generation failed after {attempts} attempts")]
    GenerationFailure { attempts: usize },

    /// lambda == mu: the Möbius transform is the identity and the support
    /// function would be evaluated at 0.
    #[error("degenerate parameters: lambda == mu")]
    DegenerateParameters,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
