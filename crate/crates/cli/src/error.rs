use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("unphysical input: {0}")]
    Unphysical(String),

    #[error("oracle check failed: {0}")]
    OracleFailure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Unphysical(_) => 3,
            CliError::OracleFailure(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<pauliflow::Error> for CliError {
    fn from(e: pauliflow::Error) -> Self {
        use pauliflow::Error as E;
        match e {
            E::NonUnitTrace(_) | E::NotHermitian(_) | E::InvalidTensor(_) | E::UnphysicalBloch(_) => {
                CliError::Unphysical(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}
