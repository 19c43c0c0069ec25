// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Moment dynamics of the quantum Brownian oscillator.
//!
//! A particle of mass `m` in a harmonic well of frequency `ω`, coupled to a
//! high-temperature bath with damping `γ` and thermal energy `kBT`, obeys the
//! Caldeira–Leggett master equation. Its moments up to fourth order form a
//! closed linear system; this crate
//!
//! * evaluates the analytic position variances ([`closed_form`]),
//! * derives the moment equations symbolically from the commutator identity
//!   ([`algebra`]),
//! * propagates the moment vector by adaptive Runge–Kutta or by the
//!   variation-of-constants formula ([`dynamics`]),
//! * samples the classical Langevin counterpart ([`stochastic`]), and
//! * packages the standard sweeps and kurtosis runs as datasets
//!   ([`experiments`]).
//!
//! ```
//! use qbo_core::closed_form::classical_variance;
//! use qbo_core::model::OscillatorParams;
//!
//! let params = OscillatorParams::new(10.0, 1.0, 1.0, 0.1, 1.0)?;
//! let v = classical_variance(&params, 1e3)?;
//! assert!((v - 0.01).abs() < 1e-15);
//! # Ok::<(), qbo_core::Error>(())
//! ```

pub mod algebra;
pub mod closed_form;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod quadrature;
pub mod stochastic;
pub mod tolerances;

pub use error::{Error, Result};
