use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at s = {0}")]
    Pole(f64),

    /// The explicit spectrum stops before the cutoff a computation needs.
    #[error("insufficient spectrum: needed cutoff {needed}, trustworthy only up to {max_cutoff}")]
    InsufficientSpectrum { needed: f64, max_cutoff: f64 },

    #[error("heat data required for explicit cross-section")]
    HeatDataRequired,

    #[error("heat coefficient a_{index} is required but missing")]
    MissingHeatCoefficient { index: usize },

    #[error("singular shift: eigenvalue {eigenvalue} of sqrt(Delta_Y) + alpha vanishes")]
    SingularShift { eigenvalue: f64 },

    #[error("singular Robin parameter alpha = {alpha}: collides with eigenvalue {eigenvalue} ({operator})")]
    SingularRobin {
        alpha: f64,
        eigenvalue: f64,
        operator: &'static str,
    },

    #[error("singular series term at mu = {mu}")]
    SingularSeriesTerm { mu: f64 },

    #[error("analytic continuation unsupported at s = {s}: {reason}")]
    ContinuationUnsupported { s: f64, reason: String },

    #[error("no convergence: {what} (achieved {achieved:e})")]
    NonConvergence { what: String, achieved: f64 },

    #[error("unsupported boundary pair {0}")]
    UnsupportedBoundaryPair(String),

    #[error("root bracketing failed on [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Domain(_)
            | Error::HeatDataRequired
            | Error::MissingHeatCoefficient { .. }
            | Error::UnsupportedBoundaryPair(_)
            | Error::ContinuationUnsupported { .. } => 2,
            Error::NonConvergence { .. }
            | Error::InsufficientSpectrum { .. }
            | Error::Bracketing { .. } => 3,
            Error::Pole(_)
            | Error::SingularShift { .. }
            | Error::SingularRobin { .. }
            | Error::SingularSeriesTerm { .. } => 4,
        }
    }
}
