use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Everything that can stop a run. Each variant has its own stable code and
/// process exit status.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("config is not valid TOML: {0}")]
    Syntax(String),

    #[error("config schema violation: {0}")]
    Schema(String),

    #[error("coupling matrix {name} is not Hermitian (deviation {deviation:.3e}); make it equal to its conjugate transpose")]
    NotHermitian { name: String, deviation: f64 },

    #[error("coupling matrix A is singular (condition number {condition:.3e}); this task needs an invertible A")]
    SingularNeumannBlock { condition: f64 },

    #[error("natural coupling needs rho > 0, got {0}")]
    NonPositiveRho(f64),

    #[error("grid `{0}` is empty")]
    EmptyGrid(String),

    #[error("grid `{0}` must be strictly monotone and finite")]
    NonMonotoneGrid(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("computation failed: {0}")]
    Compute(#[from] hybrid_plane::Error),

    #[error("{0} diagnostic suite(s) failed")]
    DiagnosticsFailed(usize),
}

impl CliError {
    pub fn code(&self) -> String {
        match self {
            CliError::Syntax(_) => "config_syntax".into(),
            CliError::Schema(_) => "config_schema".into(),
            CliError::NotHermitian { .. } => "not_hermitian".into(),
            CliError::SingularNeumannBlock { .. } => "singular_a".into(),
            CliError::NonPositiveRho(_) => "nonpositive_rho".into(),
            CliError::EmptyGrid(_) => "empty_grid".into(),
            CliError::NonMonotoneGrid(_) => "non_monotone_grid".into(),
            CliError::Io(_) => "io".into(),
            CliError::Compute(e) => format!("compute.{}", e.code()),
            CliError::DiagnosticsFailed(_) => "diagnostics_failed".into(),
        }
    }

    /// Process exit status; clap keeps 2 for usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax(_) => 10,
            CliError::Schema(_) => 11,
            CliError::NotHermitian { .. } => 12,
            CliError::SingularNeumannBlock { .. } => 13,
            CliError::NonPositiveRho(_) => 14,
            CliError::EmptyGrid(_) => 15,
            CliError::NonMonotoneGrid(_) => 16,
            CliError::Io(_) => 17,
            CliError::Compute(_) => 20,
            CliError::DiagnosticsFailed(_) => 30,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
