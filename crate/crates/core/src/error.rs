use thiserror::Error;

/// Errors raised by the engine. Each variant maps onto one CLI exit code
/// class (see [`GlmeError::is_input_error`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GlmeError {
    /// Inconsistent dimensions or a malformed matrix.
    #[error("structural error in {what}: {detail}")]
    Structural { what: String, detail: String },

    /// Decoherence matrix (or assembled block) fails positivity.
    #[error("positivity violated: minimum eigenvalue {min_eigenvalue:e} below -{tol:e} ({detail})")]
    Positivity {
        min_eigenvalue: f64,
        tol: f64,
        detail: String,
    },

    /// Dynamics builders refuse a non-Hermitian decoherence matrix.
    #[error("decoherence matrix is not Hermitian (defect {defect:e}); split it with split_non_hermitian and fold the anti-Hermitian part into the Hamiltonian")]
    NonHermitian { defect: f64 },

    /// Steady state requested for a drift matrix that is not Hurwitz.
    #[error("drift matrix is not Hurwitz: spectral abscissa {abscissa:e} >= -{tol:e}")]
    Stability { abscissa: f64, tol: f64 },

    /// Covariance input violates the uncertainty/positivity bound.
    #[error("unphysical input: {detail}")]
    Unphysical { detail: String },

    /// Fermionic covariance too close to a pure mode for a Gibbs kernel.
    #[error("boundary error: |lambda| = {lambda} reaches 1 - {tol:e}; the Gibbs kernel diverges")]
    Boundary { lambda: f64, tol: f64 },

    /// Numerical procedure failed (quadrature budget, singular matrix, ...).
    #[error("numerical failure in {what}: {detail}")]
    Numerical { what: String, detail: String },

    /// Spectral function could not be evaluated at a required frequency.
    #[error("spectral function for channel {channel} cannot be evaluated at frequency {frequency}")]
    SpectralEvaluation { channel: usize, frequency: f64 },

    /// Parity-odd or otherwise invalid dense input.
    #[error("domain error: {0}")]
    Domain(String),

    /// Dense oracle truncation diagnostic exceeded its threshold.
    #[error("Fock truncation too coarse: top-level population {population:e} exceeds {threshold:e}")]
    Truncation { population: f64, threshold: f64 },

    /// File could not be read or parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl GlmeError {
    pub fn structural(what: impl Into<String>, detail: impl Into<String>) -> Self {
        GlmeError::Structural {
            what: what.into(),
            detail: detail.into(),
        }
    }

    pub fn numerical(what: impl Into<String>, detail: impl Into<String>) -> Self {
        GlmeError::Numerical {
            what: what.into(),
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            GlmeError::Structural { .. } => "structural",
            GlmeError::Positivity { .. } => "positivity",
            GlmeError::NonHermitian { .. } => "non_hermitian",
            GlmeError::Stability { .. } => "stability",
            GlmeError::Unphysical { .. } => "unphysical",
            GlmeError::Boundary { .. } => "boundary",
            GlmeError::Numerical { .. } => "numerical",
            GlmeError::SpectralEvaluation { .. } => "spectral_evaluation",
            GlmeError::Domain(_) => "domain",
            GlmeError::Truncation { .. } => "truncation",
            GlmeError::Parse(_) => "parse",
            GlmeError::Io(_) => "io",
        }
    }

    /// Input/parse failures exit with code 2, everything else with 1.
    pub fn is_input_error(&self) -> bool {
        matches!(self, GlmeError::Parse(_) | GlmeError::Io(_))
    }
}

impl From<std::io::Error> for GlmeError {
    fn from(e: std::io::Error) -> Self {
        GlmeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GlmeError>;
