// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact operator algebra and the symbolic moment equations derived with it.
//!
//! ```
//! use qbo_core::algebra::{PolyOperator, derive_symbolic};
//!
//! // [x, p] = iħ
//! let c = PolyOperator::x().commutator(&PolyOperator::p());
//! assert_eq!(c.to_string(), "i·ħ");
//!
//! // d<x^2>/dt = (1/m) <xp+px>
//! let second = derive_symbolic(2)?;
//! assert_eq!(second.to_string().lines().next(), Some("d<x^2>/dt = (m^-1) <xp+px>"));
//! # Ok::<(), qbo_core::Error>(())
//! ```

mod derive;
mod param;
mod poly;

pub use derive::{
    coefficient, derive_moment_ode, derive_symbolic, moment_derivative, MomentODESystem,
    SymbolicSystem,
};
pub use param::{Exponents, ParamPoly};
pub use poly::{
    expand_symmetrized, format_coeff, frac, imag_unit, int, Coeff, Letter, Monomial, PolyOperator,
    Rational, SymMonomial,
};
