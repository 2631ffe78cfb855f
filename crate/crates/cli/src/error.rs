use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("degenerate output: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Core(#[from] pvsusy::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use pvsusy::Error as E;
        match self {
            CliError::Invalid(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Core(E::DegenerateOutput(_)) => 3,
            CliError::Core(
                E::InvalidSpec(_)
                | E::InvalidLabel(_)
                | E::BranchDegeneracy { .. }
                | E::ParameterPole { .. }
                | E::GammaPole { .. }
                | E::ChainAnnihilation { .. },
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}
