// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Agreement thresholds shared by the self-validation command and the test
//! suites, each with the reasoning that fixes its size.

/// Closed-form variance vs. the integrated second-moment system.
///
/// The integrator runs at `rel_tol = 1e-12`; a 1e-8 gap leaves four digits of
/// headroom for the accumulated global error over `t ≤ 10`.
pub const CLOSED_FORM_VS_ODE: f64 = 1e-8;

/// Closed-form variance with zero initial data vs. the classical formula.
/// Both are the same expression up to rounding.
pub const CLASSICAL_REDUCTION: f64 = 1e-12;

/// Equipartition reached at `γt = 50`: the transient is `e^{-50} ≈ 2e-22`
/// times the stationary value in the underdamped case.
pub const EQUIPARTITION: f64 = 1e-6;

/// Adaptive Runge–Kutta vs. the variation-of-constants propagator.
pub const METHOD_AGREEMENT: f64 = 1e-7;

/// `|κ − 3|` for Gaussian initial data: the dynamics preserves Gaussianity
/// exactly, so only integration error remains.
pub const WICK_CLOSURE: f64 = 1e-6;

/// Slope of the decoherence-limit variance vs. `2γkBT/(mω²)`. The bounded
/// oscillating term contributes `O(1/(ω³ ΔT))` to a least-squares slope.
pub const DECOHERENCE_SLOPE: f64 = 1e-6;

/// Number of standard errors tolerated between a Monte Carlo estimate and its
/// exact value.
pub const MONTE_CARLO_SIGMAS: f64 = 4.0;

/// Relative band for the soft Table-1 comparison.
pub const TABLE1_BAND: f64 = 0.15;

/// Largest `|κ − 3|` accepted at `t = 150` for the Figure-3 harmonic run.
pub const FIGURE3_NEAR_GAUSSIAN: f64 = 0.3;

/// Threshold below which a variance is treated as zero by the kurtosis.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;
