use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),
    #[error("degenerate testpoint pair: theta = {theta:e}, theta' = {theta_prime:e}")]
    DegeneratePair { theta: f64, theta_prime: f64 },
    #[error("partition error: {0}")]
    Partition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("threshold {name} not bracketed by the SNR grid: {reason}")]
    Range { name: &'static str, reason: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable kind, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Resource(_) => "resource",
            Error::DegenerateSignal(_) => "degenerate_signal",
            Error::DegeneratePair { .. } => "degenerate_pair",
            Error::Partition(_) => "partition",
            Error::Numerical(_) => "numerical",
            Error::Range { .. } => "range",
            Error::Io(_) => "io",
        }
    }
}
