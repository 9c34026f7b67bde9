use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),

    #[error("invalid sweep spec: {0}")]
    InvalidSweep(String),

    #[error("instance too large for exhaustive enumeration: {combinations} combinations exceeds cap {cap}")]
    InstanceTooLarge { combinations: f64, cap: u64 },

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
