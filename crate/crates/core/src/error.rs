// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the moment-dynamics engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{field}` must be strictly positive (got {value})")]
    NonPositiveMass { field: &'static str, value: f64 },
    #[error("parameter `{field}` must be non-negative (got {value})")]
    NegativeParameter { field: &'static str, value: f64 },
    #[error("parameter `{field}` must be finite (got {value})")]
    NonFinite { field: &'static str, value: f64 },
    #[error("missing parameter `{field}`")]
    MissingParameter { field: &'static str },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("covariance bound violated: |sigma| = {sigma_abs} > 2 sqrt(var_x var_p) = {bound}")]
    CovarianceBound { sigma_abs: f64, bound: f64 },
    #[error("fourth moment `{field}` must be non-negative (got {value})")]
    NegativeFourthMoment { field: &'static str, value: f64 },
    #[error("time must be non-negative (got {0})")]
    NegativeTime(f64),
    #[error("omega = 0 makes this formula singular; use the free-particle variance instead")]
    ZeroFrequency,
    #[error("gamma = 0 makes the free-particle formula singular")]
    ZeroDamping,
    #[error("moment order {0} is not supported (expected 1, 2 or 4)")]
    UnsupportedOrder(u32),
    #[error("moment closure violated: {0}")]
    ClosureViolation(String),
    #[error(
        "step size underflow at t = {t} (h = {h}); the system is too stiff for the \
         adaptive integrator, try the semianalytic method"
    )]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("quadrature did not converge on [{a}, {b}] within the refinement budget")]
    QuadratureNonConvergence { a: f64, b: f64 },
    #[error("variance {0} is too small to define a kurtosis")]
    DegenerateDistribution(f64),
    #[error("Monte Carlo trajectory {trajectory} blew up at t = {t} (dt = {dt}); reduce dt")]
    UnstableStep { trajectory: usize, t: f64, dt: f64 },
    #[error("invalid ensemble specification: {0}")]
    InvalidEnsemble(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
