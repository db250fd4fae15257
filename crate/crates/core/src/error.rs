use std::path::PathBuf;

/// Errors raised by the analysis, simulation and experiment layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain: {bound}")]
    Domain { name: &'static str, value: f64, bound: &'static str },

    #[error("degenerate variance: mean {mean}, second moment {second_moment}")]
    DegenerateVariance { mean: f64, second_moment: f64 },

    #[error("infeasible operating point: {0}")]
    Infeasible(String),

    #[error("no element count up to {limit} reaches outage target {target}")]
    SearchExhausted { limit: u64, target: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("grid point {index}: {source}")]
    GridPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, bound: &'static str) -> Self {
        Error::Domain { name, value, bound }
    }

    /// Strips grid-point annotations to get at the underlying cause.
    pub fn root(&self) -> &Error {
        match self {
            Error::GridPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
