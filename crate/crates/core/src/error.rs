use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("degenerate link: {0}")]
    DegenerateLink(&'static str),
    #[error("empty user set")]
    EmptyUsers,
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("rate of user {user} is not strictly positive ({rate})")]
    NonPositiveRate { user: usize, rate: f64 },
    #[error("infeasible point: {0}")]
    Infeasible(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
