// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Polynomials in `x` and `p` with `[x, p] = iħ`, kept in x-before-p order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// Exact rational number.
pub type Rational = Ratio<i128>;
/// Exact complex rational coefficient.
pub type Coeff = Complex<Rational>;

/// `re + 0i` from an integer.
pub fn int(n: i128) -> Coeff {
    Complex::new(Rational::from_integer(n), Rational::zero())
}

/// `num/den + 0i`.
pub fn frac(num: i128, den: i128) -> Coeff {
    Complex::new(Rational::new(num, den), Rational::zero())
}

/// The imaginary unit.
pub fn imag_unit() -> Coeff {
    Complex::new(Rational::zero(), Rational::one())
}

/// `x^x p^p ħ^hbar` in canonical (x-left) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: u32,
    pub p: u32,
    pub hbar: u32,
}

impl Monomial {
    pub const fn new(x: u32, p: u32, hbar: u32) -> Self {
        Self { x, p, hbar }
    }

    /// Operator degree `x + p` (the ħ grading is not counted).
    pub fn degree(&self) -> u32 {
        self.x + self.p
    }
}

/// A letter of an unordered operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    X,
    P,
}

/// Noncommutative polynomial in canonical normal form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyOperator {
    terms: BTreeMap<Monomial, Coeff>,
}

fn binomial(n: u32, k: u32) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

fn factorial(n: u32) -> i128 {
    (1..=n as i128).product()
}

/// `(−i)^j`.
fn minus_i_pow(j: u32) -> Coeff {
    let one = Rational::one();
    let zero = Rational::zero();
    match j % 4 {
        0 => Complex::new(one, zero),
        1 => Complex::new(zero, -one),
        2 => Complex::new(-one, zero),
        _ => Complex::new(zero, one),
    }
}

impl PolyOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(int(1), Monomial::new(0, 0, 0))
    }

    pub fn x() -> Self {
        Self::term(int(1), Monomial::new(1, 0, 0))
    }

    pub fn p() -> Self {
        Self::term(int(1), Monomial::new(0, 1, 0))
    }

    /// A single canonical term `c · x^a p^b ħ^h`.
    pub fn term(c: Coeff, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    /// `x^a p^b` in canonical order.
    pub fn monomial(a: u32, b: u32) -> Self {
        Self::term(int(1), Monomial::new(a, b, 0))
    }

    /// Canonical form of a sum of arbitrary words, e.g. `p·x → x·p − iħ`.
    pub fn canonicalize(words: &[(Coeff, Vec<Letter>)]) -> Self {
        let mut acc = Self::zero();
        for (c, word) in words {
            let mut prod = Self::term(*c, Monomial::new(0, 0, 0));
            for l in word {
                prod = &prod
                    * &match l {
                        Letter::X => Self::x(),
                        Letter::P => Self::p(),
                    };
            }
            acc = &acc + &prod;
        }
        acc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Coeff {
        self.terms.get(&m).copied().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest operator degree present (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Coeff::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: Coeff) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(*m, *v * c);
        }
        out
    }

    /// Multiplies by `ħ^k`.
    pub fn times_hbar(&self, k: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.x, m.p, m.hbar + k), *c))
                .collect(),
        }
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }
}

impl Add for &PolyOperator {
    type Output = PolyOperator;
    fn add(self, rhs: &PolyOperator) -> PolyOperator {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, *c);
        }
        out
    }
}

impl Sub for &PolyOperator {
    type Output = PolyOperator;
    fn sub(self, rhs: &PolyOperator) -> PolyOperator {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -*c);
        }
        out
    }
}

impl Neg for &PolyOperator {
    type Output = PolyOperator;
    fn neg(self) -> PolyOperator {
        self.scale(int(-1))
    }
}

impl Mul for &PolyOperator {
    type Output = PolyOperator;
    /// `(x^a p^b)(x^c p^d) = Σ_j j! C(b,j) C(c,j) (−iħ)^j x^{a+c−j} p^{b+d−j}`.
    fn mul(self, rhs: &PolyOperator) -> PolyOperator {
        let mut out = PolyOperator::zero();
        for (l, cl) in &self.terms {
            for (r, cr) in &rhs.terms {
                let base = *cl * *cr;
                for j in 0..=l.p.min(r.x) {
                    let n = factorial(j) * binomial(l.p, j) * binomial(r.x, j);
                    let c = base * int(n) * minus_i_pow(j);
                    out.add_term(
                        Monomial::new(l.x + r.x - j, l.p + r.p - j, l.hbar + r.hbar + j),
                        c,
                    );
                }
            }
        }
        out
    }
}

/// Formats a coefficient compactly, e.g. `3`, `-1/2`, `2i`, `(1+3i)`.
pub fn format_coeff(c: &Coeff) -> String {
    let r = |q: &Rational| {
        if q.is_integer() {
            format!("{}", q.numer())
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    };
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => r(&c.re),
        (true, false) => {
            if c.im == Rational::one() {
                "i".to_string()
            } else if c.im == -Rational::one() {
                "-i".to_string()
            } else {
                format!("{}i", r(&c.im))
            }
        }
        (false, false) => {
            let im = r(&c.im);
            let sep = if im.starts_with('-') { "" } else { "+" };
            format!("({}{}{}i)", r(&c.re), sep, im)
        }
    }
}

fn power(name: &str, k: u32) -> String {
    match k {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{k}"),
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [power("ħ", self.hbar), power("x", self.x), power("p", self.p)]
            .into_iter()
            .filter(|s| !s.is_empty())
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

impl fmt::Display for PolyOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest degree first.
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        for (i, (m, c)) in items.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let cs = format_coeff(c);
            let is_unit = m.x == 0 && m.p == 0 && m.hbar == 0;
            match (cs.as_str(), is_unit) {
                (_, true) => write!(f, "{cs}")?,
                ("1", false) => write!(f, "{m}")?,
                ("-1", false) => write!(f, "-{m}")?,
                _ => write!(f, "{cs}·{m}")?,
            }
        }
        Ok(())
    }
}

/// Hermitian symmetrized monomial: `x^a` / `p^b` when pure, otherwise
/// `x^a p^b + p^b x^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymMonomial {
    pub a: u32,
    pub b: u32,
}

impl SymMonomial {
    pub const fn new(a: u32, b: u32) -> Self {
        Self { a, b }
    }

    pub fn degree(&self) -> u32 {
        self.a + self.b
    }

    pub fn is_mixed(&self) -> bool {
        self.a > 0 && self.b > 0
    }

    /// Canonical operator.
    pub fn operator(&self) -> PolyOperator {
        if self.is_mixed() {
            let xa = PolyOperator::monomial(self.a, 0);
            let pb = PolyOperator::monomial(0, self.b);
            xa.anticommutator(&pb)
        } else {
            PolyOperator::monomial(self.a, self.b)
        }
    }

    /// Coefficient of `x^a p^b` in [`SymMonomial::operator`].
    pub fn leading(&self) -> i128 {
        if self.is_mixed() {
            2
        } else {
            1
        }
    }

    /// Symmetrized monomials of degree `n`, ordered by decreasing power of `x`
    /// (`x^n` first, `p^n` last).
    pub fn of_degree(n: u32) -> Vec<Self> {
        (0..=n).rev().map(|a| Self::new(a, n - a)).collect()
    }
}

impl fmt::Display for SymMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs = power("x", self.a);
        let ps = power("p", self.b);
        match (self.a, self.b) {
            (0, 0) => write!(f, "1"),
            (_, 0) => write!(f, "{xs}"),
            (0, _) => write!(f, "{ps}"),
            _ => write!(f, "{xs}{ps}+{ps}{xs}"),
        }
    }
}

/// Writes `op` as `Σ_j (polynomial in ħ)_j · S_j` over symmetrized monomials.
///
/// Returns, for every symmetrized monomial, a map `ħ power → coefficient`.
/// The expansion peels off the highest-degree canonical term at each step;
/// each subtraction only introduces terms of strictly lower degree, so the
/// loop terminates.
pub fn expand_symmetrized(op: &PolyOperator) -> BTreeMap<SymMonomial, BTreeMap<u32, Coeff>> {
    let mut rest = op.clone();
    let mut out: BTreeMap<SymMonomial, BTreeMap<u32, Coeff>> = BTreeMap::new();
    while let Some((m, c)) = rest
        .terms
        .iter()
        .max_by(|a, b| a.0.degree().cmp(&b.0.degree()).then(a.0.cmp(b.0)))
        .map(|(m, c)| (*m, *c))
    {
        let s = SymMonomial::new(m.x, m.p);
        let k = c / int(s.leading());
        let piece = s.operator().scale(k).times_hbar(m.hbar);
        rest = &rest - &piece;
        let slot = out.entry(s).or_default().entry(m.hbar).or_insert_with(Coeff::zero);
        *slot += k;
    }
    for v in out.values_mut() {
        v.retain(|_, c| !c.is_zero());
    }
    out.retain(|_, v| !v.is_empty());
    out
}
