use thiserror::Error;

/// Failures of a CLI invocation, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Compute(srf_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

impl From<srf_core::Error> for CliError {
    fn from(e: srf_core::Error) -> Self {
        use srf_core::Error as E;
        match e {
            E::Domain(_)
            | E::InvalidSupport(_)
            | E::InvalidArgument(_)
            | E::SupportNotContained { .. }
            | E::SpanTooSmall { .. }
            | E::Pole
            | E::OnArc { .. } => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) | CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => EXIT_COMPUTE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(srf_core::Error::Domain("0.6".into())).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::from(srf_core::Error::PrecisionCap { bits: 8192 }).exit_code(), EXIT_COMPUTE);
        let infeasible = srf_core::Error::Infeasible { k_cap: 1, sigma: "1e-3".into() };
        assert_eq!(CliError::from(infeasible).exit_code(), EXIT_COMPUTE);
        assert_eq!(CliError::from(srf_core::Error::Budget { count: 2, budget: 1 }).exit_code(), EXIT_COMPUTE);
    }
}
