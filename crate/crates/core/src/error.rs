use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter pole: b = {b} is a non-positive integer")]
    ParameterPole { b: String },
    #[error("series did not converge within {terms} terms")]
    NoConvergence { terms: usize },
    #[error("gamma pole at z = {z}")]
    GammaPole { z: String },
    #[error("branch degeneracy: l = {ell} is half-odd and both mixture coefficients are nonzero")]
    BranchDegeneracy { ell: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid seed specification: {0}")]
    InvalidSpec(String),
    #[error("seed chain annihilated at member {index}")]
    ChainAnnihilation { index: usize },
    #[error("singular evaluation at x = {x}")]
    SingularEvaluation { x: f64 },
    #[error("jet order exceeded: need {needed}, have {available}")]
    JetOrderExceeded { needed: usize, available: usize },
    #[error("operator chain is not type-correct: {0}")]
    ChainType(String),
    #[error("invalid ordering label {0:?}")]
    InvalidLabel(String),
    #[error("equation singularity: w = {w}")]
    EquationSingularity { w: String },
    #[error("degenerate output: {0}")]
    DegenerateOutput(String),
    #[error("closed form not available for {0}")]
    NotAvailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
