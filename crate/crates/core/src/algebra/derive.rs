// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Mechanical derivation of the moment equations.
//!
//! For an observable `A` the Caldeira–Leggett master equation gives
//!
//! ```text
//! d⟨A⟩/dt = (−i/ħ)⟨[A, H]⟩ − (iγ/ħ)⟨{[A, x], p}⟩ − (2mγkBT/ħ²)⟨[x, [x, A]]⟩,
//! H = p²/(2m) + mω²x²/2.
//! ```
//!
//! Each right-hand side is computed exactly in [`PolyOperator`] arithmetic,
//! re-expanded over symmetrized monomials, and multiplied by its parameter
//! prefactor. The parameters stay symbolic until [`SymbolicSystem::evaluate`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::param::{Exponents, ParamPoly};
use super::poly::{expand_symmetrized, frac, imag_unit, int, Coeff, PolyOperator, SymMonomial};
use crate::error::{Error, Result};
use crate::model::OscillatorParams;

/// Moment equations of one order in exact symbolic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSystem {
    pub order: u32,
    /// Observables whose expectations form the state of this block.
    pub basis: Vec<SymMonomial>,
    /// Lower-order observables the block is driven by (`1` first).
    pub lower: Vec<SymMonomial>,
    /// `generator[i][j]`: coefficient of `⟨basis[j]⟩` in `d⟨basis[i]⟩/dt`.
    pub generator: Vec<Vec<ParamPoly>>,
    /// `forcing[i][k]`: coefficient of `⟨lower[k]⟩` in `d⟨basis[i]⟩/dt`.
    pub forcing: Vec<Vec<ParamPoly>>,
}

/// Moment equations evaluated at concrete parameters:
/// `dX/dt = generator · X + forcing · L`, with `L` the values of `lower`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentODESystem {
    pub order: u32,
    pub basis: Vec<SymMonomial>,
    pub lower: Vec<SymMonomial>,
    pub generator: DMatrix<f64>,
    pub forcing: DMatrix<f64>,
}

impl MomentODESystem {
    /// `forcing · L` for lower-order values given in the order of `lower`
    /// (the constant entry is 1).
    pub fn forcing_at(&self, lower_values: &[f64]) -> DVector<f64> {
        assert_eq!(lower_values.len(), self.lower.len(), "lower-moment count");
        &self.forcing * DVector::from_column_slice(lower_values)
    }
}

fn exps(m: i32, g: i32, w: i32, k: i32, h: i32) -> Exponents {
    [m, g, w, k, h]
}

/// The four pieces of the right-hand side for observable `a`, each with its
/// parameter prefactor.
fn right_hand_side(a: &PolyOperator) -> Vec<(ParamPoly, PolyOperator)> {
    let x = PolyOperator::x();
    let p = PolyOperator::p();
    let x2 = PolyOperator::monomial(2, 0);
    let p2 = PolyOperator::monomial(0, 2);
    let minus_half_i = imag_unit() * frac(-1, 2);
    vec![
        // (−i/ħ)[A, p²/2m]
        (ParamPoly::term(minus_half_i, exps(-1, 0, 0, 0, -1)), a.commutator(&p2)),
        // (−i/ħ)[A, mω²x²/2]
        (ParamPoly::term(minus_half_i, exps(1, 0, 2, 0, -1)), a.commutator(&x2)),
        // −(iγ/ħ){[A, x], p}
        (
            ParamPoly::term(-imag_unit(), exps(0, 1, 0, 0, -1)),
            a.commutator(&x).anticommutator(&p),
        ),
        // −(2mγkBT/ħ²)[x, [x, A]]
        (ParamPoly::term(int(-2), exps(1, 1, 0, 1, -2)), x.commutator(&x.commutator(a))),
    ]
}

/// `d⟨A⟩/dt` as a map from symmetrized monomial to symbolic coefficient.
pub fn moment_derivative(a: SymMonomial) -> BTreeMap<SymMonomial, ParamPoly> {
    let mut row: BTreeMap<SymMonomial, ParamPoly> = BTreeMap::new();
    for (prefactor, op) in right_hand_side(&a.operator()) {
        for (s, by_hbar) in expand_symmetrized(&op) {
            let mut coeff = ParamPoly::zero();
            for (k, c) in by_hbar {
                coeff = &coeff + &ParamPoly::term(c, exps(0, 0, 0, 0, k as i32));
            }
            let slot = row.entry(s).or_default();
            *slot = &*slot + &(&coeff * &prefactor);
        }
    }
    row.retain(|_, v| !v.is_zero());
    row
}

/// Derives the moment block of the given order symbolically.
///
/// Fails with [`Error::ClosureViolation`] if any equation couples to moments
/// outside the tracked set (orders above `order`, or third-order moments),
/// or produces a non-real coefficient.
pub fn derive_symbolic(order: u32) -> Result<SymbolicSystem> {
    if !matches!(order, 1 | 2 | 4) {
        return Err(Error::UnsupportedOrder(order));
    }
    let basis = SymMonomial::of_degree(order);
    let mut rows = Vec::with_capacity(basis.len());
    let mut lower_set: BTreeMap<(u32, std::cmp::Reverse<u32>), SymMonomial> = BTreeMap::new();
    for a in &basis {
        let row = moment_derivative(*a);
        for (s, c) in &row {
            if !c.is_real() {
                return Err(Error::ClosureViolation(format!(
                    "d<{a}>/dt has a non-real coefficient {c} on <{s}>"
                )));
            }
            let d = s.degree();
            if d > order {
                return Err(Error::ClosureViolation(format!(
                    "d<{a}>/dt couples to the order-{d} moment <{s}>"
                )));
            }
            if d < order {
                if d > 2 {
                    return Err(Error::ClosureViolation(format!(
                        "d<{a}>/dt couples to the untracked moment <{s}>"
                    )));
                }
                lower_set.insert((d, std::cmp::Reverse(s.a)), *s);
            }
        }
        rows.push(row);
    }
    let lower: Vec<SymMonomial> = lower_set.into_values().collect();
    let pick = |row: &BTreeMap<SymMonomial, ParamPoly>, s: &SymMonomial| {
        row.get(s).cloned().unwrap_or_default()
    };
    let generator = rows
        .iter()
        .map(|r| basis.iter().map(|s| pick(r, s)).collect())
        .collect();
    let forcing = rows
        .iter()
        .map(|r| lower.iter().map(|s| pick(r, s)).collect())
        .collect();
    Ok(SymbolicSystem {
        order,
        basis,
        lower,
        generator,
        forcing,
    })
}

fn cached(order: u32) -> Result<&'static SymbolicSystem> {
    static CACHE: [OnceLock<SymbolicSystem>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let slot = match order {
        1 => &CACHE[0],
        2 => &CACHE[1],
        4 => &CACHE[2],
        other => return Err(Error::UnsupportedOrder(other)),
    };
    if let Some(sys) = slot.get() {
        return Ok(sys);
    }
    let sys = derive_symbolic(order)?;
    Ok(slot.get_or_init(|| sys))
}

impl SymbolicSystem {
    /// Substitutes numerical parameters.
    pub fn evaluate(&self, params: &OscillatorParams) -> MomentODESystem {
        let n = self.basis.len();
        let generator = DMatrix::from_fn(n, n, |i, j| self.generator[i][j].evaluate(params));
        let forcing = DMatrix::from_fn(n, self.lower.len(), |i, k| {
            self.forcing[i][k].evaluate(params)
        });
        MomentODESystem {
            order: self.order,
            basis: self.basis.clone(),
            lower: self.lower.clone(),
            generator,
            forcing,
        }
    }
}

/// Derives (or fetches the cached derivation of) the moment block of the
/// given order and evaluates it at `params`.
pub fn derive_moment_ode(order: u32, params: &OscillatorParams) -> Result<MomentODESystem> {
    Ok(cached(order)?.evaluate(params))
}

impl fmt::Display for SymbolicSystem {
    /// One line per basis element, e.g.
    /// `d<x^2>/dt = m^-1 <xp+px>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.basis.iter().enumerate() {
            let mut parts = Vec::new();
            let cols = self.basis.iter().zip(&self.generator[i]);
            let lows = self.lower.iter().zip(&self.forcing[i]);
            for (s, c) in cols.chain(lows) {
                if c.is_zero() {
                    continue;
                }
                if s.degree() == 0 {
                    parts.push(format!("({c})"));
                } else {
                    parts.push(format!("({c}) <{s}>"));
                }
            }
            let rhs = if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            };
            writeln!(f, "d<{a}>/dt = {rhs}")?;
        }
        Ok(())
    }
}

/// Exact coefficient helper for tests and docs: `c · m^a γ^b ω^c kBT^d ħ^e`.
pub fn coefficient(c: Coeff, e: Exponents) -> ParamPoly {
    ParamPoly::term(c, e)
}
