// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! One function per subcommand: resolve settings, run the experiment, and
//! return the dataset together with its manifest.

use qbo_core::closed_form::{
    classical_variance, decoherence_variance, exact_variance, free_particle_variance, second_moments,
};
use qbo_core::dynamics::{Method, TrajectoryOptions};
use qbo_core::experiments::{
    calibrate_table1, figure3_dataset, figure3_params, figure3_quad, run_kurtosis,
    run_sweep, table1_dataset, uniform_grid, Curve, Dataset, FourthMomentInit, KurtosisRunConfig,
    Model, Panel, SweepConfig, DEFAULT_POINTS,
};
use qbo_core::model::{FourthMomentVector, MomentState, OscillatorParams, QuadraticState, StateMode};
use qbo_core::stochastic::{simulate, EnsembleSpec};

use crate::args::{
    FourthArgs, InitArgs, KurtosisArgs, MonteCarloArgs, ParamArgs, SweepArgs, Table1Args, VarianceArgs,
};
use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;
use crate::plot::Axes;
use crate::settings::Settings;
use crate::validate::run_suite;

/// What a command produced.
#[derive(Debug)]
pub enum Outcome {
    Data(Box<Report>),
    /// Output already printed (`validate`).
    Done,
}

#[derive(Debug)]
pub struct Report {
    pub dataset: Dataset,
    pub manifest: RunManifest,
    /// Default axes for `--plot`.
    pub axes: Axes,
    /// A single number that is printed bare when no `--out` is given.
    pub scalar: bool,
}

fn report(command: &str, s: Settings, dataset: Dataset, axes: Axes, seeds: Vec<u64>) -> CliResult<Outcome> {
    let config = s.finish()?;
    Ok(Outcome::Data(Box::new(Report {
        dataset,
        manifest: RunManifest::new(command, config, seeds),
        axes,
        scalar: false,
    })))
}

const PARAM_KEYS: [&str; 5] = ["m", "gamma", "omega", "kbt", "hbar"];

/// Resolves the five physical parameters; `skip` names a swept parameter
/// that is filled with `placeholder` and not recorded.
fn resolve_params(
    s: &mut Settings,
    a: &ParamArgs,
    defaults: [Option<f64>; 5],
    skip: Option<(&str, f64)>,
) -> CliResult<OscillatorParams> {
    let flags = [a.m, a.gamma, a.omega, a.kbt, a.hbar];
    let mut v = [0.0; 5];
    for i in 0..5 {
        v[i] = match skip {
            Some((name, placeholder)) if name == PARAM_KEYS[i] => {
                if flags[i].is_some() {
                    return Err(CliError::usage(format!(
                        "--{name} is the swept parameter; set its range with --lo/--hi"
                    )));
                }
                placeholder
            }
            _ => s.f64(PARAM_KEYS[i], flags[i], defaults[i])?,
        };
    }
    Ok(OscillatorParams::new(v[0], v[1], v[2], v[3], v[4])?)
}

fn resolve_init(s: &mut Settings, a: &InitArgs, d: [f64; 5], mode: StateMode) -> CliResult<QuadraticState> {
    let mx = s.f64("init-meanx", a.init_meanx, Some(d[0]))?;
    let mp = s.f64("init-meanp", a.init_meanp, Some(d[1]))?;
    let vx = s.f64("init-varx", a.init_varx, Some(d[2]))?;
    let vp = s.f64("init-varp", a.init_varp, Some(d[3]))?;
    let sg = s.f64("init-sigma", a.init_sigma, Some(d[4]))?;
    Ok(QuadraticState::new(mx, mp, vx, vp, sg, mode)?)
}

fn state_values(q: &QuadraticState) -> [f64; 5] {
    [q.mean_x(), q.mean_p(), q.var_x(), q.var_p(), q.sigma()]
}

fn resolve_fourth(
    s: &mut Settings,
    a: &FourthArgs,
    quad: &QuadraticState,
    hbar: f64,
) -> CliResult<FourthMomentVector> {
    let base = s.choice("fourth", a.fourth.clone(), &["calibrated", "gaussian"], Some("calibrated"))?;
    let init = if base == "gaussian" {
        FourthMomentInit::Gaussian
    } else {
        FourthMomentInit::Calibrated
    };
    let mut v = init.resolve(quad, hbar)?.to_array();
    let overrides = [("x4", a.x4), ("x3p", a.x3p), ("x2p2", a.x2p2), ("xp3", a.xp3), ("p4", a.p4)];
    for (i, (key, flag)) in overrides.into_iter().enumerate() {
        if let Some(x) = s.opt_f64(key, flag)? {
            v[i] = x;
        }
    }
    let fourth = FourthMomentVector::from_array(v)?;
    if !fourth.is_admissible(quad, hbar) {
        log::warn!("the initial moments do not belong to any quantum state (moment matrix not positive semidefinite)");
    }
    Ok(fourth)
}

fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::usage(format!("--t-grid: expected start:stop:points with 0 <= start <= stop (got `{spec}`)"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if !(a >= 0.0 && b >= a && b.is_finite()) || n == 0 || (n == 1 && a != b) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn parse_list(key: &str, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("--{key}: `{t}` is not a number")))
        })
        .collect()
}

pub fn variance(mut s: Settings, a: &VarianceArgs) -> CliResult<Outcome> {
    let model = s.choice(
        "model",
        a.model.clone(),
        &["exact", "classical", "decoherence", "free"],
        Some("exact"),
    )?;
    let free = model == "free";
    let omega_default = free.then_some(0.0);
    let params = resolve_params(&mut s, &a.params, [None, None, omega_default, None, Some(1.0)], None)?;
    if free && params.omega() != 0.0 {
        return Err(CliError::usage("--model free requires --omega 0 (or no --omega)"));
    }
    let t = s.opt_f64("t", a.t)?;
    let grid = s.opt_text("t-grid", a.t_grid.clone())?;
    let times = match (t, grid) {
        (Some(t), None) => vec![t],
        (None, Some(g)) => parse_grid(&g)?,
        (Some(_), Some(_)) => return Err(CliError::usage("--t and --t-grid are mutually exclusive")),
        (None, None) => return Err(CliError::usage("one of --t or --t-grid is required")),
    };
    let init = if model == "classical" {
        QuadraticState::zero()
    } else {
        let mode = StateMode::Quantum { hbar: params.hbar() };
        resolve_init(&mut s, &a.init, [0.0; 5], mode)?
    };
    let mut ds = Dataset::new(format!("variance-{model}"), &["t", "var_x"]);
    for &t in &times {
        let v = match model.as_str() {
            "exact" => exact_variance(&params, &init, t)?,
            "classical" => classical_variance(&params, t)?,
            "decoherence" => decoherence_variance(&params, &init, t)?,
            _ => free_particle_variance(&params, &init, t)?,
        };
        ds.rows.push(vec![t, v]);
    }
    let single = times.len() == 1;
    let mut out = report("variance", s, ds, Axes::Linear, vec![])?;
    if let Outcome::Data(r) = &mut out {
        r.scalar = single;
    }
    Ok(out)
}

pub fn kurtosis(mut s: Settings, a: &KurtosisArgs) -> CliResult<Outcome> {
    let model = s.choice("model", a.model.clone(), &["harmonic", "free", "both"], Some("harmonic"))?;
    let method = s.choice("method", a.method.clone(), &["rk", "semianalytic"], Some("rk"))?;
    let f3 = figure3_params();
    let defaults = [f3.mass(), f3.gamma(), f3.omega(), f3.kbt(), f3.hbar()].map(Some);
    let params = resolve_params(&mut s, &a.params, defaults, None)?;
    let mode = StateMode::Quantum { hbar: params.hbar() };
    let quad = resolve_init(&mut s, &a.init, state_values(&figure3_quad()), mode)?;
    let fourth = resolve_fourth(&mut s, &a.fourth, &quad, params.hbar())?;
    let t_end = s.f64("t-end", a.t_end, Some(200.0))?;
    let points = s.usize("points", a.points, 401)?;
    if t_end.is_nan() || t_end <= 0.0 || points < 2 {
        return Err(CliError::usage("--t-end must be positive and --points at least 2"));
    }
    let defaults = TrajectoryOptions::default();
    let rel_tol = s.f64("rel-tol", a.rel_tol, Some(defaults.rel_tol))?;
    let abs_tol = s.f64("abs-tol", a.abs_tol, Some(defaults.abs_tol))?;
    let method = if method == "rk" {
        Method::AdaptiveRK
    } else {
        Method::Semianalytic
    };
    let opts = defaults.with_tolerances(rel_tol, abs_tol).with_method(method);
    let cfg = |model| KurtosisRunConfig {
        params,
        init: MomentState::new(0.0, quad, fourth),
        times: uniform_grid(t_end, points),
        model,
        opts,
    };
    let mut ds = match model.as_str() {
        "both" => {
            let h = run_kurtosis(&cfg(Model::Harmonic))?;
            let f = run_kurtosis(&cfg(Model::Free))?;
            figure3_dataset(&h, &f)
        }
        name => {
            let m = if name == "free" { Model::Free } else { Model::Harmonic };
            let series = run_kurtosis(&cfg(m))?;
            let mut ds = Dataset::new(format!("kurtosis-{name}"), &["t", "var_x", "x4", "kappa"]);
            ds.rows = series
                .states
                .iter()
                .zip(&series.kurtosis)
                .map(|(st, k)| vec![st.time, st.quad.var_x(), st.fourth.x4(), *k])
                .collect();
            ds
        }
    };
    let v = fourth.to_array();
    ds.meta.push((
        "init_fourth".into(),
        format!("x4={:?} x3p={:?} x2p2={:?} xp3={:?} p4={:?}", v[0], v[1], v[2], v[3], v[4]),
    ));
    report("kurtosis", s, ds, Axes::Linear, vec![])
}

fn parse_curves(text: &str) -> CliResult<Vec<Curve>> {
    text.split(',')
        .map(|c| match c.trim() {
            "quantum" => Ok(Curve::ExactQuantum),
            "classical" => Ok(Curve::Classical),
            "decoherence" => Ok(Curve::DecoherenceLimit),
            other => Err(CliError::usage(format!(
                "--curves: expected quantum, classical or decoherence (got `{other}`)"
            ))),
        })
        .collect()
}

fn curve_names(curves: &[Curve]) -> String {
    curves
        .iter()
        .map(|c| match c {
            Curve::ExactQuantum => "quantum",
            Curve::Classical => "classical",
            Curve::DecoherenceLimit => "decoherence",
        })
        .collect::<Vec<_>>()
        .join(",")
}

pub fn sweep(mut s: Settings, a: &SweepArgs) -> CliResult<Outcome> {
    let figure = s.opt_text("figure", a.figure.map(|f| f.to_string()))?;
    let preset = match figure.as_deref() {
        None => None,
        Some(fig @ ("1" | "2")) => {
            let name = s.choice("panel", a.panel.clone(), &["left", "middle", "right"], None)?;
            let panel = Panel::parse(&name).expect("checked by choice");
            Some(if fig == "1" {
                SweepConfig::figure1(panel)
            } else {
                SweepConfig::figure2(panel)
            })
        }
        Some(other) => return Err(CliError::usage(format!("--figure: expected 1 or 2 (got `{other}`)"))),
    };
    if preset.is_none() && a.panel.is_some() {
        return Err(CliError::usage("--panel needs --figure"));
    }
    let p = preset.as_ref();
    let swept = s.choice("swept", a.swept.clone(), &PARAM_KEYS, p.map(|c| c.swept.as_str()))?;
    let lo = s.f64("lo", a.lo, p.map(|c| c.lo))?;
    let hi = s.f64("hi", a.hi, p.map(|c| c.hi))?;
    let points = s.usize("points", a.points, p.map_or(DEFAULT_POINTS, |c| c.points))?;
    let t = s.f64("t", a.t, Some(p.map_or(10.0, |c| c.t)))?;
    let default_curves = p.map_or("quantum,classical".to_string(), |c| curve_names(&c.curves));
    let curves_text = s.text("curves", a.curves.clone(), &default_curves)?;
    let curves = parse_curves(&curves_text)?;
    let base_defaults = match p {
        Some(c) => [c.base.mass(), c.base.gamma(), c.base.omega(), c.base.kbt(), c.base.hbar()].map(Some),
        None => [None, None, None, None, Some(1.0)],
    };
    let base = resolve_params(&mut s, &a.params, base_defaults, Some((swept.as_str(), lo)))?;
    let init_default = p.map_or([0.0; 5], |c| state_values(&c.init));
    let init = resolve_init(&mut s, &a.init, init_default, StateMode::Quantum { hbar: base.hbar() })?;
    let id = p.map_or_else(|| format!("sweep-{swept}"), |c| c.id.clone());
    let cfg = SweepConfig {
        id,
        base,
        swept,
        lo,
        hi,
        points,
        t,
        curves,
        init,
    };
    let ds = run_sweep(&cfg)?;
    report("sweep", s, ds, Axes::LogLog, vec![])
}

pub fn table1(mut s: Settings, a: &Table1Args) -> CliResult<Outcome> {
    let calibrate = s.switch("calibrate", a.calibrate)?;
    let f = &a.fourth;
    let fourth = if calibrate {
        if f.fourth.is_some() || [f.x4, f.x3p, f.x2p2, f.xp3, f.p4].iter().any(Option::is_some) {
            return Err(CliError::usage("--calibrate chooses the fourth moments itself; drop the moment flags"));
        }
        calibrate_table1()?.fourth
    } else {
        resolve_fourth(&mut s, f, &figure3_quad(), 1.0)?
    };
    let ds = table1_dataset(&fourth)?;
    report("table1", s, ds, Axes::Linear, vec![])
}

pub fn montecarlo(mut s: Settings, a: &MonteCarloArgs) -> CliResult<Outcome> {
    let params = resolve_params(&mut s, &a.params, [Some(1.0), Some(0.5), Some(1.0), Some(1.0), Some(1.0)], None)?;
    let init = resolve_init(&mut s, &a.init, [0.0; 5], StateMode::Classical)?;
    let seed = s.u64("seed", a.seed, 1)?;
    let n_traj = s.usize("n-traj", a.n_traj, 100_000)?;
    let dt = s.f64("dt", a.dt, Some(1e-3))?;
    let times_text = s.text("times", a.times.clone(), "1,3,10")?;
    let times = parse_list("times", &times_text)?;
    let allow = s.switch("allow-large-dt", a.allow_large_dt)?;
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let mut spec = EnsembleSpec::new(n_traj, dt, t_end, seed, init);
    spec.allow_large_dt = allow;
    let series = simulate(&params, &spec, &times)?;
    let mut ds = Dataset::new(
        "montecarlo",
        &[
            "t", "mean_x", "var_x", "se_var_x", "var_x_exact", "var_p", "se_var_p", "var_p_exact", "sigma",
            "se_sigma", "kurtosis", "se_kurtosis",
        ],
    );
    for pt in &series.points {
        let exact = second_moments(&params, &init, pt.time)?;
        ds.rows.push(vec![
            pt.time,
            pt.mean_x,
            pt.var_x,
            pt.se.var_x,
            exact.var_x(),
            pt.var_p,
            pt.se.var_p,
            exact.var_p(),
            pt.sigma,
            pt.se.sigma,
            pt.kurtosis,
            pt.se.kurtosis,
        ]);
    }
    ds.meta.push(("n_traj".into(), n_traj.to_string()));
    report("montecarlo", s, ds, Axes::Linear, vec![seed])
}

pub fn validate(s: Settings) -> CliResult<Outcome> {
    s.finish()?;
    let checks = run_suite();
    let mut failed = 0;
    for c in &checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("{verdict}  {}  ({})", c.name, c.detail);
        failed += usize::from(!c.pass);
    }
    if failed > 0 {
        return Err(CliError::ValidationFailed(failed));
    }
    println!("all {} checks passed", checks.len());
    Ok(Outcome::Done)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        for bad in ["0:1", "1:0:3", "0:1:0", "a:1:2", "-1:1:3", "0:1:1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn curve_lists() {
        let c = parse_curves("quantum, decoherence").unwrap();
        assert_eq!(c, vec![Curve::ExactQuantum, Curve::DecoherenceLimit]);
        assert_eq!(curve_names(&c), "quantum,decoherence");
        assert!(parse_curves("exact").is_err());
    }

    #[test]
    fn figure1_defaults_match_the_preset() {
        let args = SweepArgs {
            figure: Some(1),
            panel: Some("right".into()),
            swept: None,
            lo: None,
            hi: None,
            points: Some(5),
            t: None,
            curves: None,
            params: ParamArgs::default(),
            init: InitArgs::default(),
        };
        let Outcome::Data(r) = sweep(Settings::empty(), &args).unwrap() else {
            panic!("sweep returns data")
        };
        assert_eq!(r.dataset.columns, vec!["omega", "var_quantum", "var_classical"]);
        assert_eq!(r.dataset.rows.len(), 5);
        assert_eq!(r.manifest.config["init-varp"], "10000000.0");
        assert!(!r.manifest.config.contains_key("omega"));
    }
}
