// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! The self-check behind `qbo validate`: independent routes to the same
//! quantities must agree.

use qbo_core::algebra::{coefficient, derive_symbolic, frac, ParamPoly, SymMonomial};
use qbo_core::closed_form::{classical_variance, exact_variance};
use qbo_core::dynamics::{integrate, Method, TrajectoryOptions};
use qbo_core::experiments::{run_kurtosis, FourthMomentInit, KurtosisRunConfig, Model, TABLE1_TIMES};
use qbo_core::model::{MomentState, OscillatorParams, QuadraticState, StateMode};
use qbo_core::stochastic::{simulate, EnsembleSpec};
use qbo_core::tolerances::{
    CLASSICAL_REDUCTION, CLOSED_FORM_VS_ODE, METHOD_AGREEMENT, MONTE_CARLO_SIGMAS, WICK_CLOSURE,
};

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String), qbo_core::Error>) -> Check {
    match outcome {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs every check in a fixed order.
pub fn run_suite() -> Vec<Check> {
    vec![
        check("fourth-order generator and forcing", symbolic()),
        check("closed-form variance vs. moment ODE", closed_form_vs_ode()),
        check("classical reduction of the exact variance", classical_reduction()),
        check("Gaussian closure on the Figure-3 run", wick()),
        check("semianalytic vs. Runge-Kutta fourth moments", routes()),
        check("Langevin ensemble vs. classical variance", monte_carlo()),
    ]
}

fn c(n: i128, e: [i32; 5]) -> ParamPoly {
    coefficient(frac(n, 1), e)
}

fn symbolic() -> qbo_core::Result<(bool, String)> {
    let sys = derive_symbolic(4)?;
    let z = ParamPoly::zero;
    // Exponents of (m, γ, ω, kBT, ħ).
    let (mi, g, mw2, mgk) = ([-1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [1, 0, 2, 0, 0], [1, 1, 0, 1, 0]);
    let generator = [
        [z(), c(2, mi), z(), z(), z()],
        [c(-2, mw2), c(-2, g), c(3, mi), z(), z()],
        [z(), c(-2, mw2), c(-4, g), c(2, mi), z()],
        [z(), z(), c(-3, mw2), c(-6, g), c(2, mi)],
        [z(), z(), z(), c(-2, mw2), c(-8, g)],
    ];
    let forcing = [
        [z(), z(), z(), z()],
        [c(3, [-1, 0, 0, 0, 2]), z(), z(), z()],
        [c(-4, [0, 1, 0, 0, 2]), c(8, mgk), z(), z()],
        [c(-3, [1, 0, 2, 0, 2]), z(), c(12, mgk), z()],
        [z(), z(), z(), c(24, mgk)],
    ];
    let basis: Vec<SymMonomial> = (0..=4).rev().map(|a| SymMonomial::new(a, 4 - a)).collect();
    let mut bad = usize::from(sys.basis != basis);
    for (got, want) in sys.generator.iter().zip(&generator) {
        bad += got.iter().zip(want).filter(|(a, b)| a != b).count();
    }
    for (got, want) in sys.forcing.iter().zip(&forcing) {
        bad += got.iter().zip(want).filter(|(a, b)| a != b).count();
    }
    Ok((bad == 0, format!("{bad} mismatched entries")))
}

fn grid() -> qbo_core::Result<Vec<OscillatorParams>> {
    let decades = [1e-2, 1e-1, 1.0, 10.0];
    let mut out = Vec::new();
    for m in [0.1, 1.0, 10.0] {
        for g in decades {
            for w in decades {
                for k in decades {
                    out.push(OscillatorParams::new(m, g, w, k, 1.0)?);
                }
            }
        }
    }
    Ok(out)
}

fn closed_form_vs_ode() -> qbo_core::Result<(bool, String)> {
    let quad = QuadraticState::centered(0.6, 0.7, 0.2, StateMode::Quantum { hbar: 1.0 })?;
    let opts = TrajectoryOptions::default().with_tolerances(1e-12, 1e-14);
    let times = [0.0, 0.1, 1.0, 10.0];
    let mut worst: f64 = 0.0;
    for p in grid()? {
        let series = integrate(&p, &MomentState::gaussian(0.0, quad, 1.0), &times, &opts)?;
        for s in &series.states[1..] {
            let exact = exact_variance(&p, &quad, s.time)?;
            worst = worst.max((s.quad.var_x() - exact).abs() / exact);
        }
    }
    Ok((worst < CLOSED_FORM_VS_ODE, format!("max rel. deviation {worst:.2e}")))
}

fn classical_reduction() -> qbo_core::Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for p in grid()? {
        for t in [0.1, 1.0, 10.0] {
            let q = exact_variance(&p, &QuadraticState::zero(), t)?;
            let c = classical_variance(&p, t)?;
            worst = worst.max((q - c).abs() / c);
        }
    }
    Ok((worst < CLASSICAL_REDUCTION, format!("max rel. deviation {worst:.2e}")))
}

fn wick() -> qbo_core::Result<(bool, String)> {
    let cfg = KurtosisRunConfig::figure3(Model::Harmonic, FourthMomentInit::Gaussian)?;
    let k = run_kurtosis(&cfg)?.kurtosis;
    let worst = k.iter().map(|k| (k - 3.0).abs()).fold(0.0, f64::max);
    Ok((worst < WICK_CLOSURE, format!("max |kappa-3| {worst:.2e}")))
}

fn routes() -> qbo_core::Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for model in [Model::Harmonic, Model::Free] {
        let mut cfg = KurtosisRunConfig::figure3(model, FourthMomentInit::Calibrated)?;
        cfg.times = std::iter::once(0.0).chain(TABLE1_TIMES).collect();
        let rk = run_kurtosis(&cfg)?;
        cfg.opts = cfg.opts.with_method(Method::Semianalytic);
        let sa = run_kurtosis(&cfg)?;
        for (a, b) in rk.states.iter().zip(&sa.states) {
            for (x, y) in a.to_vector().iter().zip(b.to_vector()) {
                worst = worst.max((x - y).abs() / y.abs().max(1.0));
            }
        }
    }
    Ok((worst < METHOD_AGREEMENT, format!("max deviation {worst:.2e}")))
}

fn monte_carlo() -> qbo_core::Result<(bool, String)> {
    let p = OscillatorParams::new(1.0, 0.5, 1.0, 1.0, 1.0)?;
    let spec = EnsembleSpec::new(20_000, 1e-3, 10.0, 1, QuadraticState::zero());
    let series = simulate(&p, &spec, &[1.0, 3.0, 10.0])?;
    let mut worst: f64 = 0.0;
    for pt in &series.points {
        let exact = classical_variance(&p, pt.time)?;
        worst = worst.max((pt.var_x - exact).abs() / pt.se.var_x);
    }
    Ok((worst <= MONTE_CARLO_SIGMAS, format!("max |z| {worst:.2} (20000 trajectories)")))
}
