use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("weaker entrusted user has zero VLC gain")]
    InfeasibleChannel,

    /// The message powers needed for the QoS targets leave no room under the
    /// DC-bias headroom.
    #[error("QoS infeasible: required amplitude {required:.6e} A exceeds available {available:.6e} A")]
    QosInfeasible { required: f64, available: f64 },

    #[error("destination QoS of {r_th_d} bits/s/Hz is unreachable with the harvested power")]
    DestinationQosUnreachable { r_th_d: f64 },

    #[error("solver failure at bisection iteration {iteration}: {reason}")]
    Solver { iteration: usize, reason: String },

    #[error("config error at line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("config: {0}")]
    ConfigValue(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("sweep point {variable}={value}: {failed} of {trials} trials failed")]
    SweepFailure {
        variable: String,
        value: f64,
        failed: usize,
        trials: usize,
    },

    #[error("cannot render an empty table")]
    EmptyTable,

    #[error("csv parse error at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Errors that come from a bad input file rather than from the solvers.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Config { .. }
                | Error::ConfigValue(_)
                | Error::Io { .. }
                | Error::Csv { .. }
        )
    }
}
