// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parameters, moment containers and damping-regime classification.
//!
//! All moments stored here are *central* moments: `var_x = ⟨(x-⟨x⟩)²⟩`,
//! `sigma = ⟨δxδp + δpδx⟩` and the fourth-order block of
//! [`FourthMomentVector`] is built from `δx = x - ⟨x⟩`, `δp = p - ⟨p⟩`. The
//! Caldeira–Leggett generator is quadratic in `x` and `p`, so the central
//! moments obey exactly the same closed equations as raw moments of a
//! zero-mean state while the means follow the damped classical orbit.

use std::collections::BTreeMap;

use nalgebra::{Matrix4, SMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative half-width of the critical band around `gamma == omega`.
pub const CRITICAL_REL_EPS: f64 = 1e-9;
/// Absolute floor for the critical band (keeps `gamma = omega = 0` critical).
pub const CRITICAL_ABS_EPS: f64 = 1e-300;

/// Physical (market) parameters of the Brownian oscillator.
///
/// `omega == 0` selects the free Brownian particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    mass: f64,
    gamma: f64,
    omega: f64,
    kbt: f64,
    hbar: f64,
}

impl OscillatorParams {
    /// Validates and builds a parameter set. Nothing is clamped.
    pub fn new(mass: f64, gamma: f64, omega: f64, kbt: f64, hbar: f64) -> Result<Self> {
        for (field, value) in [
            ("m", mass),
            ("gamma", gamma),
            ("omega", omega),
            ("kbt", kbt),
            ("hbar", hbar),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { field, value });
            }
        }
        for (field, value) in [("m", mass), ("hbar", hbar)] {
            if value <= 0.0 {
                return Err(Error::NonPositiveMass { field, value });
            }
        }
        for (field, value) in [("gamma", gamma), ("omega", omega), ("kbt", kbt)] {
            if value < 0.0 {
                return Err(Error::NegativeParameter { field, value });
            }
        }
        Ok(Self {
            mass,
            gamma,
            omega,
            kbt,
            hbar,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kbt(&self) -> f64 {
        self.kbt
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Same parameters with a different frequency (`0` gives the free particle).
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.mass, self.gamma, omega, self.kbt, self.hbar)
    }

    /// Returns a copy with one named parameter replaced.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let mut map = self.to_map();
        let key = canonical_name(name).ok_or_else(|| Error::UnknownParameter(name.to_owned()))?;
        map.insert(key, value);
        validate_params(map)
    }

    /// Flat `name -> value` view, the inverse of [`validate_params`].
    pub fn to_map(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([
            ("m", self.mass),
            ("gamma", self.gamma),
            ("omega", self.omega),
            ("kbt", self.kbt),
            ("hbar", self.hbar),
        ])
    }

    /// `gamma² - omega²`, computed as a product to avoid cancellation.
    pub fn discriminant(&self) -> f64 {
        (self.gamma - self.omega) * (self.gamma + self.omega)
    }

    pub fn is_free(&self) -> bool {
        self.omega == 0.0
    }
}

fn canonical_name(name: &str) -> Option<&'static str> {
    match name {
        "m" | "mass" => Some("m"),
        "gamma" => Some("gamma"),
        "omega" => Some("omega"),
        "kbt" | "kBT" | "kT" => Some("kbt"),
        "hbar" => Some("hbar"),
        _ => None,
    }
}

/// Builds [`OscillatorParams`] from a `name -> value` map.
///
/// Accepted names are `m` (or `mass`), `gamma`, `omega`, `kbt` (or `kBT`) and
/// `hbar`, which defaults to 1.
pub fn validate_params<K, I>(raw: I) -> Result<OscillatorParams>
where
    K: AsRef<str>,
    I: IntoIterator<Item = (K, f64)>,
{
    let mut seen: BTreeMap<&'static str, f64> = BTreeMap::new();
    for (name, value) in raw {
        let name = name.as_ref();
        let key = canonical_name(name).ok_or_else(|| Error::UnknownParameter(name.to_owned()))?;
        seen.insert(key, value);
    }
    let get = |field: &'static str| seen.get(field).copied().ok_or(Error::MissingParameter { field });
    OscillatorParams::new(
        get("m")?,
        get("gamma")?,
        get("omega")?,
        get("kbt")?,
        seen.get("hbar").copied().unwrap_or(1.0),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingRegime {
    Underdamped,
    Critical,
    Overdamped,
}

/// Damping regime together with the discriminant `d = gamma² - omega²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub kind: DampingRegime,
    pub discriminant: f64,
}

impl Regime {
    /// Half-width of the critical band for the given parameters.
    pub fn critical_band(params: &OscillatorParams) -> f64 {
        let g2 = params.gamma * params.gamma;
        let w2 = params.omega * params.omega;
        CRITICAL_REL_EPS * g2.max(w2).max(CRITICAL_ABS_EPS)
    }
}

pub fn classify_regime(params: &OscillatorParams) -> Regime {
    let d = params.discriminant();
    let band = Regime::critical_band(params);
    let kind = if d > band {
        DampingRegime::Overdamped
    } else if d < -band {
        DampingRegime::Underdamped
    } else {
        DampingRegime::Critical
    };
    Regime {
        kind,
        discriminant: d,
    }
}

/// How strictly a [`QuadraticState`] is checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateMode {
    /// Warns when `var_x var_p - sigma²/4 < hbar²/4`.
    Quantum { hbar: f64 },
    /// Degenerate (point-mass) states are fine.
    Classical,
}

/// First and central second moments at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticState {
    mean_x: f64,
    mean_p: f64,
    var_x: f64,
    var_p: f64,
    sigma: f64,
}

impl QuadraticState {
    pub fn new(
        mean_x: f64,
        mean_p: f64,
        var_x: f64,
        var_p: f64,
        sigma: f64,
        mode: StateMode,
    ) -> Result<Self> {
        for (field, value) in [
            ("mean_x", mean_x),
            ("mean_p", mean_p),
            ("var_x", var_x),
            ("var_p", var_p),
            ("sigma", sigma),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { field, value });
            }
        }
        if var_x < 0.0 {
            return Err(Error::NegativeParameter {
                field: "var_x",
                value: var_x,
            });
        }
        if var_p < 0.0 {
            return Err(Error::NegativeParameter {
                field: "var_p",
                value: var_p,
            });
        }
        let bound = 2.0 * (var_x * var_p).sqrt();
        if sigma.abs() > bound * (1.0 + 1e-12) {
            return Err(Error::CovarianceBound {
                sigma_abs: sigma.abs(),
                bound,
            });
        }
        let state = Self {
            mean_x,
            mean_p,
            var_x,
            var_p,
            sigma,
        };
        if let StateMode::Quantum { hbar } = mode {
            let floor = 0.25 * hbar * hbar;
            if state.uncertainty_product() < floor * (1.0 - 1e-12) {
                log::warn!(
                    "initial state violates the uncertainty relation: \
                     var_x var_p - sigma^2/4 = {} < hbar^2/4 = {}",
                    state.uncertainty_product(),
                    floor
                );
            }
        }
        Ok(state)
    }

    /// Zero-mean state.
    pub fn centered(var_x: f64, var_p: f64, sigma: f64, mode: StateMode) -> Result<Self> {
        Self::new(0.0, 0.0, var_x, var_p, sigma, mode)
    }

    /// The point mass at the phase-space origin.
    pub fn zero() -> Self {
        Self {
            mean_x: 0.0,
            mean_p: 0.0,
            var_x: 0.0,
            var_p: 0.0,
            sigma: 0.0,
        }
    }

    /// Integrators produce these; the covariance bound is not re-checked.
    pub(crate) fn from_raw(mean_x: f64, mean_p: f64, var_x: f64, var_p: f64, sigma: f64) -> Self {
        Self {
            mean_x,
            mean_p,
            var_x,
            var_p,
            sigma,
        }
    }

    pub fn mean_x(&self) -> f64 {
        self.mean_x
    }

    pub fn mean_p(&self) -> f64 {
        self.mean_p
    }

    pub fn var_x(&self) -> f64 {
        self.var_x
    }

    pub fn var_p(&self) -> f64 {
        self.var_p
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Determinant of the covariance matrix, `var_x var_p - sigma²/4`.
    pub fn uncertainty_product(&self) -> f64 {
        self.var_x * self.var_p - 0.25 * self.sigma * self.sigma
    }

    /// `(var_x, sigma, var_p)`, the order used by the second-moment system.
    pub fn second_moments(&self) -> [f64; 3] {
        [self.var_x, self.sigma, self.var_p]
    }
}

/// Symmetric-ordered central fourth moments
/// `(⟨x⁴⟩, ⟨x³p+px³⟩, ⟨x²p²+p²x²⟩, ⟨xp³+p³x⟩, ⟨p⁴⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourthMomentVector {
    x4: f64,
    x3p: f64,
    x2p2: f64,
    xp3: f64,
    p4: f64,
}

impl FourthMomentVector {
    pub fn new(x4: f64, x3p: f64, x2p2: f64, xp3: f64, p4: f64) -> Result<Self> {
        for (field, value) in [
            ("x4", x4),
            ("x3p", x3p),
            ("x2p2", x2p2),
            ("xp3", xp3),
            ("p4", p4),
        ] {
            if !value.is_finite() {
                return Err(Error::NonFinite { field, value });
            }
        }
        if x4 < 0.0 {
            return Err(Error::NegativeFourthMoment {
                field: "x4",
                value: x4,
            });
        }
        if p4 < 0.0 {
            return Err(Error::NegativeFourthMoment {
                field: "p4",
                value: p4,
            });
        }
        Ok(Self {
            x4,
            x3p,
            x2p2,
            xp3,
            p4,
        })
    }

    pub fn from_array(values: [f64; 5]) -> Result<Self> {
        let [x4, x3p, x2p2, xp3, p4] = values;
        Self::new(x4, x3p, x2p2, xp3, p4)
    }

    pub(crate) fn from_array_unchecked(values: [f64; 5]) -> Self {
        let [x4, x3p, x2p2, xp3, p4] = values;
        Self {
            x4,
            x3p,
            x2p2,
            xp3,
            p4,
        }
    }

    pub fn x4(&self) -> f64 {
        self.x4
    }

    pub fn x3p(&self) -> f64 {
        self.x3p
    }

    pub fn x2p2(&self) -> f64 {
        self.x2p2
    }

    pub fn xp3(&self) -> f64 {
        self.xp3
    }

    pub fn p4(&self) -> f64 {
        self.p4
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.x4, self.x3p, self.x2p2, self.xp3, self.p4]
    }

    /// Smallest eigenvalue of the Gram matrix `G_ij = ⟨A_i† A_j⟩` over
    /// `A = (1, δx², δxδp, δp²)`.
    ///
    /// Every entry follows from the stored second and fourth moments through
    /// `[x, p] = iħ`, so a negative value proves that no density matrix has
    /// these moments. The converse does not hold.
    pub fn gram_min_eigenvalue(&self, quad: &QuadraticState, hbar: f64) -> f64 {
        let g = gram_matrix(quad, self, hbar);
        // Real embedding [[Re, -Im], [Im, Re]] doubles every eigenvalue's multiplicity.
        let mut real = SMatrix::<f64, 8, 8>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let z = g[(i, j)];
                real[(i, j)] = z.re;
                real[(i + 4, j + 4)] = z.re;
                real[(i, j + 4)] = -z.im;
                real[(i + 4, j)] = z.im;
            }
        }
        SymmetricEigen::new(real).eigenvalues.min()
    }

    /// Necessary conditions for the moments to come from a quantum state,
    /// with a relative slack scaled by the largest Gram entry.
    pub fn is_admissible(&self, quad: &QuadraticState, hbar: f64) -> bool {
        let scale = 1.0f64.max(self.x4).max(self.p4).max(self.x2p2.abs());
        self.x4 >= quad.var_x() * quad.var_x()
            && self.p4 >= quad.var_p() * quad.var_p()
            && self.gram_min_eigenvalue(quad, hbar) >= -1e-9 * scale
    }
}

fn gram_matrix(quad: &QuadraticState, f: &FourthMomentVector, hbar: f64) -> Matrix4<Complex64> {
    let (u, s, w) = (quad.var_x(), quad.sigma(), quad.var_p());
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let xp = c(0.5 * s, 0.5 * hbar);
    let x3p = c(0.5 * f.x3p, 1.5 * hbar * u);
    let x2p2 = c(0.5 * f.x2p2, hbar * s);
    let pxxp = c(0.5 * f.x2p2 + hbar * hbar, 0.0);
    let pxpp = c(0.5 * f.xp3, 0.5 * hbar * w);
    let one = c(1.0, 0.0);
    let (u, w) = (c(u, 0.0), c(w, 0.0));
    Matrix4::new(
        one, u, xp, w,
        u, c(f.x4, 0.0), x3p, x2p2,
        xp.conj(), x3p.conj(), pxxp, pxpp,
        w, x2p2.conj(), pxpp.conj(), c(f.p4, 0.0),
    )
}

/// Fourth moments of the Gaussian state with the given second moments.
///
/// Isserlis' theorem for the Wigner function gives the Weyl-ordered moments;
/// converting `x²p² + p²x²` to Weyl order costs `-ħ²`, the other four
/// symmetric combinations coincide with their Weyl forms.
pub fn gaussian_fourth_moments(quad: &QuadraticState, hbar: f64) -> FourthMomentVector {
    let (u, s, w) = (quad.var_x(), quad.sigma(), quad.var_p());
    FourthMomentVector::from_array_unchecked([
        3.0 * u * u,
        3.0 * u * s,
        2.0 * u * w + s * s - hbar * hbar,
        3.0 * w * s,
        3.0 * w * w,
    ])
}

/// Full moment state at time `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub time: f64,
    pub quad: QuadraticState,
    pub fourth: FourthMomentVector,
}

impl MomentState {
    pub fn new(time: f64, quad: QuadraticState, fourth: FourthMomentVector) -> Self {
        Self { time, quad, fourth }
    }

    /// Gaussian state with the given second moments.
    pub fn gaussian(time: f64, quad: QuadraticState, hbar: f64) -> Self {
        Self::new(time, quad, gaussian_fourth_moments(&quad, hbar))
    }

    /// Layout used by the integrators:
    /// `[⟨x⟩, ⟨p⟩, var_x, sigma, var_p, x4, x3p, x2p2, xp3, p4]`.
    pub fn to_vector(&self) -> [f64; 10] {
        let q = &self.quad;
        let f = self.fourth.to_array();
        [
            q.mean_x(),
            q.mean_p(),
            q.var_x(),
            q.sigma(),
            q.var_p(),
            f[0],
            f[1],
            f[2],
            f[3],
            f[4],
        ]
    }

    pub(crate) fn from_vector(time: f64, v: &[f64; 10]) -> Self {
        Self {
            time,
            quad: QuadraticState::from_raw(v[0], v[1], v[2], v[4], v[3]),
            fourth: FourthMomentVector::from_array_unchecked([v[5], v[6], v[7], v[8], v[9]]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(m: f64, gamma: f64, omega: f64, kbt: f64) -> Result<OscillatorParams> {
        validate_params([("m", m), ("gamma", gamma), ("omega", omega), ("kbt", kbt)])
    }

    #[test]
    fn figure3_parameters_are_valid() {
        let p = params(20.0, 0.001, 0.018, 0.38).unwrap();
        assert_eq!(p.hbar(), 1.0);
        assert_eq!(p.mass(), 20.0);
    }

    #[test]
    fn closed_system_is_allowed() {
        let p = params(1.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(p.gamma(), 0.0);
        assert_eq!(p.kbt(), 0.0);
    }

    #[test]
    fn zero_mass_is_rejected() {
        assert_eq!(
            params(0.0, 1.0, 1.0, 1.0),
            Err(Error::NonPositiveMass {
                field: "m",
                value: 0.0
            })
        );
    }

    #[test]
    fn errors_name_the_field() {
        assert!(matches!(
            params(1.0, -1.0, 1.0, 1.0),
            Err(Error::NegativeParameter { field: "gamma", .. })
        ));
        assert!(matches!(
            params(1.0, 1.0, f64::NAN, 1.0),
            Err(Error::NonFinite { field: "omega", .. })
        ));
        assert!(matches!(
            validate_params([("m", 1.0), ("gamma", 1.0), ("omega", 1.0)]),
            Err(Error::MissingParameter { field: "kbt" })
        ));
        assert!(matches!(
            validate_params([("m", 1.0), ("gamma", 1.0), ("omega", 1.0), ("kbt", 1.0), ("hbar", 0.0)]),
            Err(Error::NonPositiveMass { field: "hbar", .. })
        ));
        assert!(matches!(
            validate_params([("m", 1.0), ("beta", 1.0)]),
            Err(Error::UnknownParameter(_))
        ));
    }

    #[test]
    fn regimes() {
        let over = classify_regime(&params(1.0, 10.0, 0.1, 1.0).unwrap());
        assert_eq!(over.kind, DampingRegime::Overdamped);
        assert!((over.discriminant - 99.99).abs() < 1e-12);

        let under = classify_regime(&params(20.0, 0.001, 0.018, 0.38).unwrap());
        assert_eq!(under.kind, DampingRegime::Underdamped);
        assert!((under.discriminant - (-3.23e-4)).abs() < 1e-18);

        let crit = classify_regime(&params(1.0, 1.0, 1.0, 1.0).unwrap());
        assert_eq!(crit.kind, DampingRegime::Critical);
        assert_eq!(crit.discriminant, 0.0);

        let still = classify_regime(&params(1.0, 0.0, 0.0, 1.0).unwrap());
        assert_eq!(still.kind, DampingRegime::Critical);
    }

    #[test]
    fn covariance_bound_is_enforced() {
        let err = QuadraticState::centered(1.0, 1.0, 2.5, StateMode::Classical).unwrap_err();
        assert!(matches!(err, Error::CovarianceBound { .. }));
        // Degenerate point mass passes in both modes.
        QuadraticState::centered(0.0, 0.0, 0.0, StateMode::Classical).unwrap();
        QuadraticState::centered(0.0, 0.0, 0.0, StateMode::Quantum { hbar: 1.0 }).unwrap();
    }

    #[test]
    fn isserlis_completion() {
        let q = QuadraticState::centered(0.5, 0.5, 0.0, StateMode::Quantum { hbar: 1.0 }).unwrap();
        let f = gaussian_fourth_moments(&q, 1.0);
        assert_eq!(f.x4(), 0.75);
        assert_eq!(f.p4(), 0.75);
        assert_eq!(f.x3p(), 0.0);
        assert_eq!(f.xp3(), 0.0);
        // Vacuum value from the ladder-operator oracle (tests/operator_oracle.rs).
        assert_eq!(f.x2p2(), -0.5);

        let q = QuadraticState::centered(1.0, 1.0, 0.0, StateMode::Classical).unwrap();
        let f = gaussian_fourth_moments(&q, 1.0);
        assert_eq!((f.x4(), f.p4()), (3.0, 3.0));
    }

    #[test]
    fn vacuum_sits_on_the_admissibility_boundary() {
        let q = QuadraticState::centered(0.5, 0.5, 0.0, StateMode::Quantum { hbar: 1.0 }).unwrap();
        let f = gaussian_fourth_moments(&q, 1.0);
        let lam = f.gram_min_eigenvalue(&q, 1.0);
        assert!(lam.abs() < 1e-12, "{lam}");
        assert!(f.is_admissible(&q, 1.0));
        // ⟨px²p⟩ < 0 is impossible.
        let bad = FourthMomentVector::new(0.75, 0.0, -3.0, 0.0, 0.75).unwrap();
        assert!(!bad.is_admissible(&q, 1.0));
    }

    proptest! {
        #[test]
        fn params_round_trip(
            m in 1e-6f64..1e6, g in 0f64..1e7, w in 0f64..1e3, k in 0f64..1e7, h in 1e-3f64..10.0
        ) {
            let p = OscillatorParams::new(m, g, w, k, h).unwrap();
            let text: Vec<(String, f64)> = p
                .to_map()
                .into_iter()
                .map(|(k, v)| (k.to_string(), format!("{v}").parse::<f64>().unwrap()))
                .collect();
            let back = validate_params(text).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn gaussian_x4_identity(u in 0f64..1e6, w in 0f64..1e6, r in -1f64..1.0) {
            let s = 2.0 * r * (u * w).sqrt();
            let q = QuadraticState::centered(u, w, s, StateMode::Classical).unwrap();
            let f = gaussian_fourth_moments(&q, 1.0);
            prop_assert_eq!(f.x4(), 3.0 * u * u);
        }

        #[test]
        fn critical_band_is_never_skipped(
            g in 1e-3f64..1e3, frac in -4.0f64..4.0, delta in -0.25f64..0.25
        ) {
            // Two points whose discriminants differ by less than a quarter band.
            let p1 = params(1.0, g, g, 1.0).unwrap();
            let band = Regime::critical_band(&p1);
            let w1 = (g * g - frac * band).sqrt();
            let a = params(1.0, g, w1, 1.0).unwrap();
            let band_a = Regime::critical_band(&a);
            let w2 = (g * g - (a.discriminant() + delta * band_a)).max(0.0).sqrt();
            let b = params(1.0, g, w2, 1.0).unwrap();
            prop_assume!((a.discriminant() - b.discriminant()).abs() < band_a.min(Regime::critical_band(&b)) / 4.0);
            let (ka, kb) = (classify_regime(&a).kind, classify_regime(&b).kind);
            prop_assert!(!matches!(
                (ka, kb),
                (DampingRegime::Underdamped, DampingRegime::Overdamped)
                    | (DampingRegime::Overdamped, DampingRegime::Underdamped)
            ));
        }
    }
}
