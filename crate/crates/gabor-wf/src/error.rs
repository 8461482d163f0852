use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("invalid generator: {0}")]
    Generator(#[from] GeneratorError),
    #[error("lagrangian is not positive: min eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("window error: {0}")]
    Window(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("config error: {0}")]
    Config(String),
}

/// Violations of the Gaussian generator conditions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("P is not symmetric (defect {0:e})")]
    NotSymmetric(f64),
    #[error("Im P is not positive semidefinite (min eigenvalue {0:e})")]
    ImPartNotPsd(f64),
    #[error("theta rows [P_tx P_tt] are dependent (smallest singular value {0:e})")]
    ThetaRowsDependent(f64),
    #[error("P has shape {0}x{1}, expected {2}x{2}")]
    Shape(usize, usize, usize),
}
