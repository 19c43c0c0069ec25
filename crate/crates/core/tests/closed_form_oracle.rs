// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form variances against independent references: complex-arithmetic
//! evaluation of the kernel, adaptive Runge–Kutta integration of the moment
//! equations, and values frozen from a 60-digit evaluation of the
//! hyperbolic formula.

use num_complex::Complex64;

use qbo_core::closed_form::{
    classical_variance, decoherence_variance, exact_variance, free_particle_variance, kernel,
    second_moments,
};
use qbo_core::dynamics::{integrate, TrajectoryOptions};
use qbo_core::experiments::{figure1_init, run_figure1, Panel};
use qbo_core::model::{MomentState, OscillatorParams, QuadraticState, StateMode};
use qbo_core::Error;

fn params(m: f64, g: f64, w: f64, k: f64) -> OscillatorParams {
    OscillatorParams::new(m, g, w, k, 1.0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Runge–Kutta oracle for the second moments at `t`.
fn ode_moments(p: &OscillatorParams, init: &QuadraticState, t: f64) -> QuadraticState {
    let opts = TrajectoryOptions::default().with_tolerances(1e-12, 1e-14);
    let start = MomentState::gaussian(0.0, *init, p.hbar());
    integrate(p, &start, &[0.0, t], &opts).unwrap().states[1].quad
}

#[test]
fn kernel_matches_complex_evaluation() {
    for (g, w, t) in [(10.0, 0.1, 10.0), (0.1, 2.0, 3.0), (0.5, 0.7, 40.0)] {
        let k = kernel(&params(1.0, g, w, 1.0), t).unwrap();
        let om = Complex64::new(g * g - w * w, 0.0).sqrt();
        let e = (-2.0 * g * t).exp();
        let want = [
            (2.0 * om * t).cosh() * e,
            (2.0 * om * t).sinh() / om * e,
            (om * t).cosh().powi(2) * e,
            (om * t).sinh().powi(2) / (om * om) * e,
        ];
        for (got, want) in [k.c2, k.s2, k.ch2, k.sh2].into_iter().zip(want) {
            assert!(want.im.abs() < 1e-12 * want.norm().max(1.0));
            assert!(rel(got, want.re) < 1e-12, "γ={g} ω={w}: {got} vs {}", want.re);
        }
    }
}

#[test]
fn squeezed_initial_state_matches_ode() {
    let p = params(10.0, 1.0, 1.0 + 1e-3, 0.1);
    let init = figure1_init();
    let got = exact_variance(&p, &init, 10.0).unwrap();
    let want = ode_moments(&p, &init, 10.0).var_x();
    assert!(rel(got, want) < 1e-8, "{got} vs {want}");
}

#[test]
fn critical_point_matches_ode() {
    let p = params(10.0, 1.0, 1.0, 0.1);
    let init = figure1_init();
    let got = exact_variance(&p, &init, 10.0).unwrap();
    let want = ode_moments(&p, &init, 10.0).var_x();
    assert!(rel(got, want) < 1e-8, "{got} vs {want}");
}

#[test]
fn regimes_join_continuously_across_the_critical_point() {
    let init = QuadraticState::centered(0.6, 0.7, 0.2, StateMode::Quantum { hbar: 1.0 }).unwrap();
    for g in [0.01, 1.0, 10.0] {
        for eps in [-1e-7, 0.0, 1e-7] {
            let p = params(1.0, g, g * (1.0 + eps), 0.5);
            for t in [0.1, 1.0, 10.0] {
                let got = exact_variance(&p, &init, t).unwrap();
                let want = ode_moments(&p, &init, t).var_x();
                assert!(rel(got, want) < 1e-8, "γ={g} ε={eps} t={t}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn companion_moments_match_ode() {
    let init = QuadraticState::new(0.3, -0.2, 0.6, 0.7, 0.2, StateMode::Quantum { hbar: 1.0 }).unwrap();
    for (g, w) in [(0.2, 1.5), (3.0, 0.5), (1.0, 1.0), (0.5, 0.0)] {
        let p = params(2.0, g, w, 0.8);
        for t in [0.5, 5.0] {
            let got = second_moments(&p, &init, t).unwrap();
            let want = ode_moments(&p, &init, t);
            for (a, b) in [
                (got.var_x(), want.var_x()),
                (got.var_p(), want.var_p()),
                (got.sigma(), want.sigma()),
            ] {
                assert!((a - b).abs() < 1e-8 * b.abs().max(1.0), "γ={g} ω={w} t={t}: {a} vs {b}");
            }
            assert!((got.mean_x() - want.mean_x()).abs() < 1e-9);
            assert!((got.mean_p() - want.mean_p()).abs() < 1e-9);
        }
    }
}

#[test]
fn free_particle_matches_ode_with_zero_frequency() {
    let p = params(20.0, 0.001, 0.0, 0.38);
    let init = QuadraticState::centered(0.5, 0.5, 0.0, StateMode::Quantum { hbar: 1.0 }).unwrap();
    let got = free_particle_variance(&p, &init, 40.0).unwrap();
    let want = ode_moments(&p, &init, 40.0).var_x();
    assert!(rel(got, want) < 1e-8, "{got} vs {want}");
}

/// The initial-correlation term as printed in the reference formula, with
/// coefficient `(1 − e^{−2γt})/2`.
fn printed_free_variance(p: &OscillatorParams, init: &QuadraticState, t: f64) -> f64 {
    let (m, g, k) = (p.mass(), p.gamma(), p.kbt());
    let e = (-2.0 * g * t).exp();
    init.var_x()
        + ((1.0 - e) / (2.0 * g)).powi(2) * init.var_p() / (m * m)
        + (1.0 - e) / 2.0 * init.sigma()
        + k / (m * g * g) * (g * t - (1.0 - e) + (1.0 - (-4.0 * g * t).exp()) / 4.0)
}

#[test]
fn printed_correlation_coefficient_disagrees_with_the_equations_of_motion() {
    let p = params(2.0, 0.3, 0.0, 0.5);
    let init = QuadraticState::centered(0.6, 0.7, 0.4, StateMode::Quantum { hbar: 1.0 }).unwrap();
    let t = 3.0;
    let want = ode_moments(&p, &init, t).var_x();
    let ours = free_particle_variance(&p, &init, t).unwrap();
    let printed = printed_free_variance(&p, &init, t);
    assert!(rel(ours, want) < 1e-10);
    assert!(rel(printed, want) > 1e-2, "printed form unexpectedly agrees: {printed} vs {want}");
    // With σ(0) = 0 the two forms coincide.
    let uncorrelated = QuadraticState::centered(0.6, 0.7, 0.0, StateMode::Quantum { hbar: 1.0 }).unwrap();
    let a = printed_free_variance(&p, &uncorrelated, t);
    let b = free_particle_variance(&p, &uncorrelated, t).unwrap();
    assert!(rel(a, b) < 1e-14);
}

/// `(m, γ, ω, kBT, quantum, classical)` at `t = 10` from the Figure-1 initial
/// state, evaluated independently in 60-digit arithmetic.
const REFERENCE: [(f64, f64, f64, f64, f64, f64); 10] = [
    (0.1, 10.0, 0.1, 1e-7, 2475371.5076628871, 9.8761532494283213e-7),
    (0.1, 10.0, 0.1, 1.0, 2475381.3838151489, 9.8761532494283218),
    (0.1, 10.0, 0.1, 1e7, 101236904.00194512, 98761532.494283218),
    (10.0, 1e-2, 10.0, 0.1, 209.96355378032941, 1.8198386259019065e-5),
    (10.0, 1.0, 10.0, 0.1, 0.00010153424734140333, 9.9999999809058335e-5),
    (10.0, 1e3, 10.0, 0.1, 0.0092611068177174571, 6.3210216336185478e-5),
    (10.0, 1e7, 10.0, 0.1, 1.1028947044320981e-7, 9.9994999416762499e-9),
    (10.0, 1.0, 0.01, 0.1, 24977.602478283577, 0.092459323869395078),
    (10.0, 1.0, 3.16, 0.1, 0.0010239899136392235, 0.0010014420742527254),
    (10.0, 1.0, 100.0, 0.1, 1.0131182166161935e-6, 9.9999999791875316e-7),
];

#[test]
fn figure1_points_match_high_precision_reference() {
    let init = figure1_init();
    for (m, g, w, k, q, c) in REFERENCE {
        let p = params(m, g, w, k);
        let got_q = exact_variance(&p, &init, 10.0).unwrap();
        let got_c = classical_variance(&p, 10.0).unwrap();
        assert!(rel(got_q, q) < 1e-12, "quantum at {m} {g} {w} {k}: {got_q} vs {q}");
        assert!(rel(got_c, c) < 1e-12, "classical at {m} {g} {w} {k}: {got_c} vs {c}");
    }
}

/// The quantum/classical gap at the hot end of the left panel settles at
/// about 2.5%: the squeezed initial momentum spread still contributes
/// `~⟨Δp²(0)⟩/(4m²γ²)` at `t = 10`.
#[test]
fn figure1_gap_at_the_top_of_the_sweeps() {
    let left = run_figure1(Panel::Left).unwrap();
    let q = left.column("var_quantum").unwrap();
    let c = left.column("var_classical").unwrap();
    let gap = (q.last().unwrap() - c.last().unwrap()) / c.last().unwrap();
    assert!((gap - 0.025064126134385224).abs() < 1e-10, "{gap}");
    // The gap shrinks monotonically over the top decade.
    let n = q.len();
    let gaps: Vec<f64> = (n - 20..n).map(|i| (q[i] - c[i]) / c[i]).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn decoherence_limit_grows_linearly_after_transients() {
    let p = params(1000.0, 1.0, 10.0, 0.1);
    let z = QuadraticState::zero();
    let slope = 2.0 * p.gamma() * p.kbt() / (p.mass() * p.omega().powi(2));
    // Over whole periods the oscillating part cancels exactly.
    let period = std::f64::consts::PI / p.omega();
    let t0 = 100.0 * period;
    let dv = decoherence_variance(&p, &z, t0 + 50.0 * period).unwrap() - decoherence_variance(&p, &z, t0).unwrap();
    assert!(rel(dv / (50.0 * period), slope) < 1e-10);
}

#[test]
fn domain_errors() {
    let free = params(1.0, 1.0, 0.0, 1.0);
    let z = QuadraticState::zero();
    assert_eq!(exact_variance(&free, &z, 1.0), Err(Error::ZeroFrequency));
    assert_eq!(classical_variance(&free, 1.0), Err(Error::ZeroFrequency));
    assert_eq!(
        free_particle_variance(&params(1.0, 0.0, 0.0, 1.0), &z, 1.0),
        Err(Error::ZeroDamping)
    );
    assert_eq!(exact_variance(&params(1.0, 1.0, 1.0, 1.0), &z, -1.0), Err(Error::NegativeTime(-1.0)));
}
