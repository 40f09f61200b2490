use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A state component exceeded the overflow guard during integration,
    /// signalling an unstable time step rather than propagating NaNs.
    #[error("integration diverged at t = {t}: component magnitude exceeded {guard:e}")]
    Divergence { t: f64, guard: f64 },

    /// Two time grids that must nest exactly do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The innovation variance `Gamma + H C H*` is not positive.
    #[error("innovation variance must be positive, got {0}")]
    SingularInnovation(f64),

    /// `M(tau) >= 1` everywhere on the search grid: no contraction
    /// certificate exists for this inflation ratio.
    #[error("no contraction certificate: M(tau) >= 1 on (0, {h_max}]")]
    NoContraction { h_max: f64 },

    /// Parameters outside the supported range (`alpha, b > 1`, `r > 0`).
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    /// A CSV file lacks a required column.
    #[error("missing column `{0}` in CSV header")]
    MissingColumn(String),

    /// A configuration value failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI: 2 for configuration or usage
    /// problems, 3 for numerical divergence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } => 3,
            Error::GridMismatch(_)
            | Error::SingularInnovation(_)
            | Error::NoContraction { .. }
            | Error::DegenerateParams(_)
            | Error::MissingColumn(_)
            | Error::InvalidConfig(_) => 2,
            Error::Io(_) => 1,
        }
    }
}
