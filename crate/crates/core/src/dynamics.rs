// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution of the ten tracked moments and the position kurtosis.
//!
//! Two independent routes are provided:
//!
//! * [`integrate`] solves the coupled linear system assembled from the
//!   symbolically derived moment equations with an adaptive Dormand–Prince
//!   5(4) integrator;
//! * [`propagate_semianalytic`] evaluates the variation-of-constants formula
//!   `X(t) = e^{𝓜t}X(0) + ∫₀ᵗ e^{𝓜(t−s)} F(s) ds` for the fourth moments,
//!   with the forcing built from the closed-form second moments, and takes
//!   means and second moments from [`closed_form::second_moments`].
//!
//! The routes share nothing except the parameter container, which is what
//! makes their agreement meaningful.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{derive_moment_ode, MomentODESystem, SymMonomial};
use crate::closed_form;
use crate::error::{Error, Result};
use crate::linalg::expm;
use crate::model::{MomentState, OscillatorParams, QuadraticState};
use crate::ode::{Dopri5, StepControl};
use crate::quadrature::{adaptive_panels, GaussLegendre};
use crate::tolerances::DEGENERATE_VARIANCE;

/// Propagation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Adaptive embedded Runge–Kutta 5(4) on the full ten-moment system.
    #[default]
    AdaptiveRK,
    /// Matrix exponential plus Gauss–Legendre quadrature of the forcing.
    Semianalytic,
}

/// Accuracy settings for a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub method: Method,
    /// Gauss–Legendre nodes per panel on the semianalytic route.
    pub quad_rule_order: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            method: Method::AdaptiveRK,
            quad_rule_order: 20,
        }
    }
}

impl TrajectoryOptions {
    pub fn with_method(self, method: Method) -> Self {
        Self { method, ..self }
    }

    pub fn with_tolerances(self, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-14 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidOption(format!(
                "rel_tol must be in [1e-14, inf) (got {})",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidOption(format!(
                "abs_tol must be positive (got {})",
                self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidOption(format!(
                "max_step must be positive (got {})",
                self.max_step
            )));
        }
        if self.quad_rule_order == 0 || self.quad_rule_order > 200 {
            return Err(Error::InvalidOption(format!(
                "quad_rule_order must be in 1..=200 (got {})",
                self.quad_rule_order
            )));
        }
        Ok(())
    }
}

/// Moments and kurtosis on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSeries {
    pub times: Vec<f64>,
    pub states: Vec<MomentState>,
    /// Position kurtosis; `NaN` where the variance is degenerate.
    pub kurtosis: Vec<f64>,
}

impl MomentSeries {
    fn from_states(states: Vec<MomentState>) -> Self {
        let times = states.iter().map(|s| s.time).collect();
        let kurtosis = states.iter().map(|s| kurtosis(s).unwrap_or(f64::NAN)).collect();
        Self {
            times,
            states,
            kurtosis,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Position kurtosis `κ = μ₄ / μ₂²` from central moments.
pub fn kurtosis(state: &MomentState) -> Result<f64> {
    let var = state.quad.var_x();
    if !(var > DEGENERATE_VARIANCE) {
        return Err(Error::DegenerateDistribution(var));
    }
    Ok(state.fourth.x4() / (var * var))
}

fn check_grid(start: f64, times: &[f64]) -> Result<()> {
    let Some(&first) = times.first() else {
        return Err(Error::InvalidGrid("the time grid is empty".into()));
    };
    if first != start {
        return Err(Error::InvalidGrid(format!(
            "the grid starts at {first} but the initial state is at {start}"
        )));
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::InvalidGrid(format!(
                "times must be finite and strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// The three moment blocks evaluated at concrete parameters.
struct Blocks {
    first: MomentODESystem,
    second: MomentODESystem,
    fourth: MomentODESystem,
}

impl Blocks {
    fn new(params: &OscillatorParams) -> Result<Self> {
        Ok(Self {
            first: derive_moment_ode(1, params)?,
            second: derive_moment_ode(2, params)?,
            fourth: derive_moment_ode(4, params)?,
        })
    }
}

/// Value of a lower-order symmetrized moment from the second-moment block.
fn lower_value(s: &SymMonomial, var_x: f64, sigma: f64, var_p: f64) -> f64 {
    match (s.a, s.b) {
        (0, 0) => 1.0,
        (2, 0) => var_x,
        (1, 1) => sigma,
        (0, 2) => var_p,
        _ => unreachable!("derivation only couples to constants and second moments"),
    }
}

fn rhs(b: &Blocks, y: &[f64; 10]) -> [f64; 10] {
    let mut dy = [0.0; 10];
    let g1 = &b.first.generator;
    for i in 0..2 {
        dy[i] = g1[(i, 0)] * y[0] + g1[(i, 1)] * y[1];
    }
    let g2 = &b.second.generator;
    let f2 = &b.second.forcing;
    for i in 0..3 {
        let mut acc = 0.0;
        for j in 0..3 {
            acc += g2[(i, j)] * y[2 + j];
        }
        for (k, s) in b.second.lower.iter().enumerate() {
            acc += f2[(i, k)] * lower_value(s, y[2], y[3], y[4]);
        }
        dy[2 + i] = acc;
    }
    let g4 = &b.fourth.generator;
    let f4 = &b.fourth.forcing;
    for i in 0..5 {
        let mut acc = 0.0;
        for j in 0..5 {
            acc += g4[(i, j)] * y[5 + j];
        }
        for (k, s) in b.fourth.lower.iter().enumerate() {
            acc += f4[(i, k)] * lower_value(s, y[2], y[3], y[4]);
        }
        dy[5 + i] = acc;
    }
    dy
}

/// Propagates `init` to every time in `times` (which must start at
/// `init.time`).
pub fn integrate(
    params: &OscillatorParams,
    init: &MomentState,
    times: &[f64],
    opts: &TrajectoryOptions,
) -> Result<MomentSeries> {
    opts.validate()?;
    check_grid(init.time, times)?;
    let states = match opts.method {
        Method::AdaptiveRK => {
            let blocks = Blocks::new(params)?;
            let solver = Dopri5::<10>::new(StepControl {
                rel_tol: opts.rel_tol,
                abs_tol: opts.abs_tol,
                max_step: opts.max_step,
                ..StepControl::default()
            });
            let ys = solver.solve(|_, y| rhs(&blocks, y), init.time, init.to_vector(), times)?;
            times
                .iter()
                .zip(&ys)
                .map(|(t, y)| MomentState::from_vector(*t, y))
                .collect()
        }
        Method::Semianalytic => times
            .iter()
            .map(|t| propagate_semianalytic(params, init, *t, opts.quad_rule_order))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(MomentSeries::from_states(states))
}

/// Fourth-moment forcing `F(s)` from closed-form second moments at elapsed
/// time `s`.
fn forcing(
    params: &OscillatorParams,
    sys: &MomentODESystem,
    init: &QuadraticState,
    s: f64,
) -> Result<DVector<f64>> {
    let q = closed_form::second_moments(params, init, s)?;
    let values: Vec<f64> = sys
        .lower
        .iter()
        .map(|l| lower_value(l, q.var_x(), q.sigma(), q.var_p()))
        .collect();
    Ok(sys.forcing_at(&values))
}

/// Evaluates the moments at time `t` by the variation-of-constants formula.
pub fn propagate_semianalytic(
    params: &OscillatorParams,
    init: &MomentState,
    t: f64,
    quad_rule_order: usize,
) -> Result<MomentState> {
    let tau = t - init.time;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::NegativeTime(tau));
    }
    if quad_rule_order == 0 {
        return Err(Error::InvalidOption("quad_rule_order must be positive".into()));
    }
    let quad = closed_form::second_moments(params, &init.quad, tau)?;
    if tau == 0.0 {
        return Ok(MomentState::new(t, quad, init.fourth));
    }
    let sys = derive_moment_ode(4, params)?;
    let m4: &DMatrix<f64> = &sys.generator;
    let x0 = DVector::from_column_slice(&init.fourth.to_array());
    let homogeneous = expm(&(m4 * tau)) * &x0;

    let (g, w) = (params.gamma(), params.omega());
    let natural = [
        if w > 0.0 { std::f64::consts::PI / (2.0 * w) } else { f64::INFINITY },
        if g > 0.0 { 1.0 / (2.0 * g) } else { f64::INFINITY },
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let max_panel = natural.min(tau).max(tau / 1e5);

    let rule = GaussLegendre::new(quad_rule_order);
    let mut failure: Option<Error> = None;
    let scale = homogeneous.amax().max(1.0);
    let integral = adaptive_panels::<5, _>(
        &rule,
        0.0,
        tau,
        max_panel,
        1e-13,
        1e-15 * scale,
        30,
        |s| match forcing(params, &sys, &init.quad, s) {
            Ok(f) => {
                let v = expm(&(m4 * (tau - s))) * f;
                [v[0], v[1], v[2], v[3], v[4]]
            }
            Err(e) => {
                failure.get_or_insert(e);
                [0.0; 5]
            }
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut x = [0.0; 5];
    for k in 0..5 {
        x[k] = homogeneous[k] + integral[k];
    }
    let mut v = [0.0; 10];
    v[0] = quad.mean_x();
    v[1] = quad.mean_p();
    v[2] = quad.var_x();
    v[3] = quad.sigma();
    v[4] = quad.var_p();
    v[5..].copy_from_slice(&x);
    Ok(MomentState::from_vector(t, &v))
}

/// Stationary moments for `γ > 0`, `ω > 0`: the fixed point of the affine
/// second- and fourth-order systems (means relax to zero).
pub fn stationary_state(params: &OscillatorParams) -> Result<MomentState> {
    if params.omega() <= 0.0 {
        return Err(Error::ZeroFrequency);
    }
    if params.gamma() <= 0.0 {
        return Err(Error::ZeroDamping);
    }
    let second = derive_moment_ode(2, params)?;
    let f2 = second.forcing_at(&[1.0]);
    let s = second
        .generator
        .clone()
        .lu()
        .solve(&(-f2))
        .ok_or_else(|| Error::ClosureViolation("singular second-moment generator".into()))?;
    let fourth = derive_moment_ode(4, params)?;
    let lower: Vec<f64> = fourth
        .lower
        .iter()
        .map(|l| lower_value(l, s[0], s[1], s[2]))
        .collect();
    let f4 = fourth.forcing_at(&lower);
    let x = fourth
        .generator
        .clone()
        .lu()
        .solve(&(-f4))
        .ok_or_else(|| Error::ClosureViolation("singular fourth-moment generator".into()))?;
    Ok(MomentState::from_vector(
        f64::INFINITY,
        &[0.0, 0.0, s[0], s[1], s[2], x[0], x[1], x[2], x[3], x[4]],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gaussian_fourth_moments, FourthMomentVector, StateMode};

    fn fig3() -> OscillatorParams {
        OscillatorParams::new(20.0, 0.001, 0.018, 0.38, 1.0).unwrap()
    }

    fn half_state(x4: f64) -> MomentState {
        let q = QuadraticState::centered(0.5, 0.5, 0.0, StateMode::Quantum { hbar: 1.0 }).unwrap();
        let g = gaussian_fourth_moments(&q, 1.0).to_array();
        let f = FourthMomentVector::new(x4, g[1], g[2], g[3], g[4]).unwrap();
        MomentState::new(0.0, q, f)
    }

    #[test]
    fn kurtosis_of_the_initial_fat_tail() {
        assert_eq!(kurtosis(&half_state(50.0)).unwrap(), 200.0);
        let z = MomentState::gaussian(0.0, QuadraticState::zero(), 1.0);
        assert!(matches!(kurtosis(&z), Err(Error::DegenerateDistribution(_))));
    }

    #[test]
    fn grid_must_start_at_the_initial_time_and_increase() {
        let opts = TrajectoryOptions::default();
        let s = half_state(50.0);
        assert!(matches!(
            integrate(&fig3(), &s, &[1.0, 2.0], &opts),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate(&fig3(), &s, &[0.0, 2.0, 2.0], &opts),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(integrate(&fig3(), &s, &[], &opts), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn options_are_validated() {
        let bad = TrajectoryOptions {
            rel_tol: 1e-16,
            ..TrajectoryOptions::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn unitary_oscillator_variance() {
        let params = OscillatorParams::new(2.0, 0.0, 1.3, 0.0, 1.0).unwrap();
        let q = QuadraticState::centered(0.7, 0.9, 0.2, StateMode::Classical).unwrap();
        let init = MomentState::gaussian(0.0, q, 1.0);
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let series = integrate(&params, &init, &times, &TrajectoryOptions::default()).unwrap();
        let (m, w) = (2.0, 1.3);
        for (t, s) in times.iter().zip(&series.states) {
            let (sn, cs) = (w * t).sin_cos();
            let want = 0.7 * cs * cs + 0.9 * sn * sn / (m * m * w * w)
                + 0.2 * (2.0 * w * t).sin() / (2.0 * m * w);
            assert!((s.quad.var_x() - want).abs() < 1e-9 * want.abs().max(1e-3));
        }
    }

    #[test]
    fn semianalytic_identity_at_zero() {
        let init = half_state(50.0);
        let s = propagate_semianalytic(&fig3(), &init, 0.0, 20).unwrap();
        assert_eq!(s, init);
    }

    #[test]
    fn routes_agree_on_the_fat_tailed_run() {
        let init = half_state(50.0);
        let rk = integrate(
            &fig3(),
            &init,
            &[0.0, 100.0],
            &TrajectoryOptions::default().with_tolerances(1e-12, 1e-14),
        )
        .unwrap();
        let sa = propagate_semianalytic(&fig3(), &init, 100.0, 20).unwrap();
        let a = rk.states[1].to_vector();
        let b = sa.to_vector();
        for k in 2..10 {
            assert!((a[k] - b[k]).abs() <= 1e-7 * b[k].abs().max(1e-3), "k={k}: {a:?} {b:?}");
        }
    }

    #[test]
    fn stationary_second_moments_are_classical() {
        let params = OscillatorParams::new(3.0, 0.4, 1.1, 0.25, 1.0).unwrap();
        let s = stationary_state(&params).unwrap();
        assert!((s.quad.var_p() - 3.0 * 0.25).abs() < 1e-14);
        assert!((s.quad.var_x() - 0.25 / (3.0 * 1.21)).abs() < 1e-14);
    }
}
