// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI invocation, each mapped to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, configuration or parameter values.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed.
    #[error("{0}")]
    Failed(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// `validate` found failing invariants.
    #[error("{0} validation check(s) failed")]
    ValidationFailed(usize),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) | CliError::Io { .. } | CliError::ValidationFailed(_) => 1,
        }
    }
}

impl From<qbo_core::Error> for CliError {
    fn from(e: qbo_core::Error) -> Self {
        use qbo_core::Error as E;
        match e {
            E::NonPositiveMass { .. }
            | E::NegativeParameter { .. }
            | E::NonFinite { .. }
            | E::MissingParameter { .. }
            | E::UnknownParameter(_)
            | E::CovarianceBound { .. }
            | E::NegativeFourthMoment { .. }
            | E::NegativeTime(_)
            | E::ZeroFrequency
            | E::ZeroDamping
            | E::InvalidGrid(_)
            | E::InvalidOption(_)
            | E::InvalidEnsemble(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
