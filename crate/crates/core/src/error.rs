use thiserror::Error;

/// Errors raised by the swarm-shaping toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate region: area {area:e} is below tolerance")]
    DegenerateRegion { area: f64 },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("region too thin for rejection sampling: acceptance rate {rate:e}")]
    RegionTooThin { rate: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid robot state: {0}")]
    State(String),

    #[error("invalid positioning task: {0}")]
    Task(String),

    #[error("infeasible zones: {0}")]
    Zone(String),

    #[error("simulation parameter out of range: {0}")]
    Param(String),

    #[error("statistics unavailable: {0}")]
    Stats(String),

    #[error("unreachable covariance goal: {0}")]
    Goal(String),

    #[error("plan parse error on line {line}: {msg}")]
    PlanParse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
