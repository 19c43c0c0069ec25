// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Laurent polynomials in the physical parameters `(m, γ, ω, kBT, ħ)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_traits::{ToPrimitive, Zero};

use super::poly::{format_coeff, Coeff};
use crate::model::OscillatorParams;

/// Exponents of `(m, γ, ω, kBT, ħ)`.
pub type Exponents = [i32; 5];

const NAMES: [&str; 5] = ["m", "γ", "ω", "kBT", "ħ"];

/// Exact symbolic coefficient `Σ c · m^a γ^b ω^c kBT^d ħ^e`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamPoly {
    terms: BTreeMap<Exponents, Coeff>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// A single term `c · m^e[0] γ^e[1] ω^e[2] kBT^e[3] ħ^e[4]`.
    pub fn term(c: Coeff, e: Exponents) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    fn add_term(&mut self, e: Exponents, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Coeff::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Coeff)> {
        self.terms.iter()
    }

    /// True when every coefficient has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }

    /// Numerical value at the given parameters (real part; see [`is_real`]).
    ///
    /// [`is_real`]: ParamPoly::is_real
    pub fn evaluate(&self, params: &OscillatorParams) -> f64 {
        let vals = [
            params.mass(),
            params.gamma(),
            params.omega(),
            params.kbt(),
            params.hbar(),
        ];
        self.terms
            .iter()
            .map(|(e, c)| {
                let coeff = c.re.numer().to_f64().unwrap_or(f64::NAN)
                    / c.re.denom().to_f64().unwrap_or(f64::NAN);
                vals.iter()
                    .zip(e)
                    .fold(coeff, |acc, (v, k)| if *k == 0 { acc } else { acc * v.powi(*k) })
            })
            .sum()
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for k in 0..5 {
                    e[k] += eb[k];
                }
                out.add_term(e, *ca * *cb);
            }
        }
        out
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (name, k) in NAMES.iter().zip(e) {
                match k {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{k}")),
                }
            }
            let cs = format_coeff(c);
            if factors.is_empty() {
                write!(f, "{cs}")?;
            } else if cs == "1" {
                write!(f, "{}", factors.join("·"))?;
            } else if cs == "-1" {
                write!(f, "-{}", factors.join("·"))?;
            } else {
                write!(f, "{cs}·{}", factors.join("·"))?;
            }
        }
        Ok(())
    }
}
