use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Solver(#[from] hyperscatter::Error),

    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    /// Process exit status for this failure class.
    pub fn exit_code(&self) -> i32 {
        use hyperscatter::Error as E;
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(e) => match e {
                E::Domain { .. } | E::InvalidParameter(_) => 2,
                E::NonConvergence { .. } | E::Breakdown(_) => 3,
                E::Resonance(_) => 4,
                E::ExtractionUnstable(_) => 5,
            },
            CliError::Verify(_) => 6,
        }
    }
}
