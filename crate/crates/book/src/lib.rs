// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! The chapters of the guide in `book/src`, included verbatim so that every
//! Rust snippet in them is compiled and run by `cargo test`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/closed-form.md")]
pub mod closed_form {}

#[doc = include_str!("../../../book/src/operator-algebra.md")]
pub mod operator_algebra {}

#[doc = include_str!("../../../book/src/moment-dynamics.md")]
pub mod moment_dynamics {}

#[doc = include_str!("../../../book/src/monte-carlo.md")]
pub mod monte_carlo {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
