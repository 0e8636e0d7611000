use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Core(#[from] dkg_core::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl LabError {
    /// 2 for configuration problems (including arguments the core rejects), 3
    /// for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) => 2,
            LabError::Core(dkg_core::Error::InvalidGrid(_) | dkg_core::Error::InvalidArgument(_)) => 2,
            LabError::Numerical(_) | LabError::Core(dkg_core::Error::NumericalFailure { .. }) => 3,
            _ => 1,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        LabError::Io {
            context: context.into(),
            source,
        }
    }
}
