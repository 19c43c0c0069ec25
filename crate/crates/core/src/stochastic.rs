// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Classical Langevin Monte Carlo for the damped oscillator.
//!
//! Each trajectory integrates
//!
//! ```text
//! dx = (p/m) dt,
//! dp = −(mω²x + 2γp) dt + √(4mγkBT) dW
//! ```
//!
//! by Euler–Maruyama. The friction `2γ` and noise strength `4mγkBT` are the
//! ones whose second-moment equations coincide with the classical part of the
//! quantum ones, so the stationary state is equipartition.
//!
//! # Random streams
//!
//! Trajectory `i` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to
//! stream `i`. Streams are independent and do not depend on scheduling, and
//! all reductions run sequentially in trajectory order, so results are
//! bit-identical for any number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{OscillatorParams, QuadraticState};

/// Trajectories whose coordinates exceed this are reported as unstable.
const OVERFLOW_GUARD: f64 = 1e150;

/// Number of batches for the batch-means error of the kurtosis.
const KURTOSIS_BATCHES: usize = 20;

/// Ensemble definition.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub n_traj: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Gaussian initial distribution (all zeros: point mass at the origin).
    pub init: QuadraticState,
    /// Accept steps larger than `0.05·min(1/γ, 1/ω)` (logged as a warning).
    pub allow_large_dt: bool,
}

impl EnsembleSpec {
    pub fn new(n_traj: usize, dt: f64, t_end: f64, seed: u64, init: QuadraticState) -> Self {
        Self {
            n_traj,
            dt,
            t_end,
            seed,
            init,
            allow_large_dt: false,
        }
    }

    /// Largest step accepted without the override flag.
    pub fn max_dt(params: &OscillatorParams) -> f64 {
        let inv = |r: f64| if r > 0.0 { 1.0 / r } else { f64::INFINITY };
        0.05 * inv(params.gamma()).min(inv(params.omega()))
    }

    pub fn validate(&self, params: &OscillatorParams) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::InvalidEnsemble("n_traj must be positive".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidEnsemble(format!("dt must be positive (got {})", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidEnsemble(format!(
                "t_end must be non-negative (got {})",
                self.t_end
            )));
        }
        let limit = Self::max_dt(params);
        if self.dt > limit {
            if self.allow_large_dt {
                log::warn!("dt = {} exceeds the stability guideline {limit}", self.dt);
            } else {
                return Err(Error::InvalidEnsemble(format!(
                    "dt = {} exceeds 0.05·min(1/γ, 1/ω) = {limit}; pass the override to force it",
                    self.dt
                )));
            }
        }
        Ok(())
    }
}

/// Empirical moments at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalMoments {
    pub time: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// `⟨δxδp + δpδx⟩ = 2 cov(x, p)`.
    pub sigma: f64,
    /// Central fourth moment of `x`.
    pub x4: f64,
    /// `x4 / var_x²` (`NaN` for a degenerate ensemble).
    pub kurtosis: f64,
    pub se: StandardErrors,
}

/// One-standard-error half-widths of the [`EmpiricalMoments`] fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StandardErrors {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub sigma: f64,
    pub x4: f64,
    /// Batch-means estimate over 20 contiguous trajectory batches.
    pub kurtosis: f64,
}

/// Ensemble statistics on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSeries {
    pub n_traj: usize,
    pub dt: f64,
    pub points: Vec<EmpiricalMoments>,
}

/// Maps sample times to step counts; every time must be a multiple of `dt`
/// up to rounding and lie in `[0, t_end]`.
fn sample_steps(spec: &EnsembleSpec, times: &[f64]) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(times.len());
    let mut prev: Option<u64> = None;
    for &t in times {
        if !(t >= 0.0 && t <= spec.t_end * (1.0 + 1e-12)) {
            return Err(Error::InvalidGrid(format!(
                "sample time {t} outside [0, {}]",
                spec.t_end
            )));
        }
        let n = (t / spec.dt).round();
        if (n * spec.dt - t).abs() > 1e-9 * t.max(spec.dt) {
            return Err(Error::InvalidGrid(format!(
                "sample time {t} is not a multiple of dt = {}",
                spec.dt
            )));
        }
        let n = n as u64;
        if prev.is_some_and(|p| n <= p) {
            return Err(Error::InvalidGrid("sample times must increase".into()));
        }
        prev = Some(n);
        out.push(n);
    }
    Ok(out)
}

/// Draws an initial phase-space point from the Gaussian `init`.
fn initial_point(rng: &mut ChaCha8Rng, init: &QuadraticState) -> (f64, f64) {
    let u = init.var_x().max(0.0);
    let c = 0.5 * init.sigma();
    let l11 = u.sqrt();
    let l21 = if l11 > 0.0 { c / l11 } else { 0.0 };
    let l22 = (init.var_p() - l21 * l21).max(0.0).sqrt();
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    (init.mean_x() + l11 * z1, init.mean_p() + l21 * z1 + l22 * z2)
}

struct Stepper {
    inv_m: f64,
    k: f64,
    fric: f64,
    noise: f64,
}

impl Stepper {
    fn new(params: &OscillatorParams, dt: f64) -> Self {
        let m = params.mass();
        Self {
            inv_m: 1.0 / m,
            k: m * params.omega().powi(2),
            fric: 2.0 * params.gamma(),
            noise: (4.0 * m * params.gamma() * params.kbt() * dt).sqrt(),
        }
    }

    #[inline]
    fn step(&self, x: f64, p: f64, dt: f64, z: f64) -> (f64, f64) {
        (
            x + p * self.inv_m * dt,
            p - (self.k * x + self.fric * p) * dt + self.noise * z,
        )
    }
}

fn run_trajectory(
    params: &OscillatorParams,
    spec: &EnsembleSpec,
    steps: &[u64],
    index: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let (mut x, mut p) = initial_point(&mut rng, &spec.init);
    let st = Stepper::new(params, spec.dt);
    let mut out = Vec::with_capacity(steps.len());
    let mut n = 0u64;
    for &target in steps {
        while n < target {
            let z: f64 = if st.noise > 0.0 { rng.sample(StandardNormal) } else { 0.0 };
            (x, p) = st.step(x, p, spec.dt, z);
            n += 1;
        }
        if !(x.abs() < OVERFLOW_GUARD && p.abs() < OVERFLOW_GUARD) {
            return Err(Error::UnstableStep {
                trajectory: index,
                t: n as f64 * spec.dt,
                dt: spec.dt,
            });
        }
        out.push((x, p));
    }
    Ok(out)
}

/// Fine (`dt/2`) and coarse (`dt`) trajectories driven by the same Brownian
/// path: the coarse increment is the sum of the two fine increments.
fn run_coupled(
    params: &OscillatorParams,
    spec: &EnsembleSpec,
    steps: &[u64],
    index: usize,
) -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let (x0, p0) = initial_point(&mut rng, &spec.init);
    let coarse = Stepper::new(params, spec.dt);
    let half = spec.dt / 2.0;
    let fine = Stepper::new(params, half);
    let (mut xc, mut pc, mut xf, mut pf) = (x0, p0, x0, p0);
    let mut out_c = Vec::with_capacity(steps.len());
    let mut out_f = Vec::with_capacity(steps.len());
    let mut n = 0u64;
    for &target in steps {
        while n < target {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            (xf, pf) = fine.step(xf, pf, half, z1);
            (xf, pf) = fine.step(xf, pf, half, z2);
            (xc, pc) = coarse.step(xc, pc, spec.dt, (z1 + z2) / std::f64::consts::SQRT_2);
            n += 1;
        }
        for (x, p) in [(xc, pc), (xf, pf)] {
            if !(x.abs() < OVERFLOW_GUARD && p.abs() < OVERFLOW_GUARD) {
                return Err(Error::UnstableStep {
                    trajectory: index,
                    t: n as f64 * spec.dt,
                    dt: spec.dt,
                });
            }
        }
        out_c.push((xc, pc));
        out_f.push((xf, pf));
    }
    Ok((out_c, out_f))
}

fn kurtosis_of(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for s in samples {
        let d = s.0 - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if m2 > 0.0 {
        m4 / (m2 * m2)
    } else {
        f64::NAN
    }
}

/// Ensemble statistics of `(x, p)` samples (in trajectory order).
fn statistics(time: f64, samples: &[(f64, f64)]) -> EmpiricalMoments {
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mp = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let (mut xx, mut pp, mut xp) = (0.0, 0.0, 0.0);
    let (mut x4, mut p4, mut x2p2, mut x8) = (0.0, 0.0, 0.0, 0.0);
    for &(x, p) in samples {
        let (dx, dp) = (x - mx, p - mp);
        let (dx2, dp2) = (dx * dx, dp * dp);
        xx += dx2;
        pp += dp2;
        xp += dx * dp;
        x4 += dx2 * dx2;
        p4 += dp2 * dp2;
        x2p2 += dx2 * dp2;
        x8 += dx2 * dx2 * dx2 * dx2;
    }
    let (xx, pp, xp) = (xx / n, pp / n, xp / n);
    let (x4, p4, x2p2, x8) = (x4 / n, p4 / n, x2p2 / n, x8 / n);
    let se = |var_of_estimator: f64| (var_of_estimator.max(0.0) / n).sqrt();

    let batch = samples.len() / KURTOSIS_BATCHES;
    let kurt_se = if batch >= 2 {
        let ks: Vec<f64> = (0..KURTOSIS_BATCHES)
            .map(|b| kurtosis_of(&samples[b * batch..(b + 1) * batch]))
            .collect();
        let mean = ks.iter().sum::<f64>() / KURTOSIS_BATCHES as f64;
        let var = ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (KURTOSIS_BATCHES - 1) as f64;
        (var / KURTOSIS_BATCHES as f64).sqrt()
    } else {
        f64::NAN
    };
    EmpiricalMoments {
        time,
        mean_x: mx,
        mean_p: mp,
        var_x: xx,
        var_p: pp,
        sigma: 2.0 * xp,
        x4,
        kurtosis: if xx > 0.0 { x4 / (xx * xx) } else { f64::NAN },
        se: StandardErrors {
            mean_x: se(xx),
            mean_p: se(pp),
            var_x: se(x4 - xx * xx),
            var_p: se(p4 - pp * pp),
            sigma: 2.0 * se(x2p2 - xp * xp),
            x4: se(x8 - x4 * x4),
            kurtosis: kurt_se,
        },
    }
}

fn collect_series(
    spec: &EnsembleSpec,
    times: &[f64],
    paths: &[Vec<(f64, f64)>],
    dt: f64,
) -> EmpiricalSeries {
    let points = times
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let column: Vec<(f64, f64)> = paths.iter().map(|p| p[k]).collect();
            statistics(*t, &column)
        })
        .collect();
    EmpiricalSeries {
        n_traj: spec.n_traj,
        dt,
        points,
    }
}

/// Runs the ensemble and reports moments at `sample_times`.
pub fn simulate(
    params: &OscillatorParams,
    spec: &EnsembleSpec,
    sample_times: &[f64],
) -> Result<EmpiricalSeries> {
    spec.validate(params)?;
    let steps = sample_steps(spec, sample_times)?;
    let paths: Vec<Vec<(f64, f64)>> = (0..spec.n_traj)
        .into_par_iter()
        .map(|i| run_trajectory(params, spec, &steps, i))
        .collect::<Result<_>>()?;
    Ok(collect_series(spec, sample_times, &paths, spec.dt))
}

/// Runs the ensemble at `spec.dt` and at `spec.dt / 2` with shared Brownian
/// paths and returns `(coarse, fine)`. The difference of the two estimates
/// measures the time-discretisation bias with most of the sampling noise
/// cancelled.
pub fn simulate_refinement_pair(
    params: &OscillatorParams,
    spec: &EnsembleSpec,
    sample_times: &[f64],
) -> Result<(EmpiricalSeries, EmpiricalSeries)> {
    spec.validate(params)?;
    let steps = sample_steps(spec, sample_times)?;
    let pairs: Vec<(Vec<(f64, f64)>, Vec<(f64, f64)>)> = (0..spec.n_traj)
        .into_par_iter()
        .map(|i| run_coupled(params, spec, &steps, i))
        .collect::<Result<_>>()?;
    let (coarse, fine): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok((
        collect_series(spec, sample_times, &coarse, spec.dt),
        collect_series(spec, sample_times, &fine, spec.dt / 2.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StateMode;

    #[test]
    fn noiseless_oscillator_is_deterministic() {
        let params = OscillatorParams::new(1.0, 0.0, 2.0, 0.0, 1.0).unwrap();
        let init = QuadraticState::new(1.0, 0.0, 0.0, 0.0, 0.0, StateMode::Classical).unwrap();
        let spec = EnsembleSpec::new(16, 1e-4, 1.0, 7, init);
        let s = simulate(&params, &spec, &[0.0, 1.0]).unwrap();
        let last = s.points[1];
        assert_eq!(last.var_x, 0.0);
        assert!((last.mean_x - 2.0f64.cos()).abs() < 1e-3);
        assert!(last.kurtosis.is_nan());
    }

    #[test]
    fn large_steps_need_the_override() {
        let params = OscillatorParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let mut spec = EnsembleSpec::new(4, 0.1, 1.0, 1, QuadraticState::zero());
        assert!(matches!(spec.validate(&params), Err(Error::InvalidEnsemble(_))));
        spec.allow_large_dt = true;
        assert!(spec.validate(&params).is_ok());
    }

    #[test]
    fn sample_times_must_sit_on_the_step_grid() {
        let params = OscillatorParams::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
        let spec = EnsembleSpec::new(4, 0.01, 1.0, 1, QuadraticState::zero());
        assert!(simulate(&params, &spec, &[0.005]).is_err());
        assert!(simulate(&params, &spec, &[2.0]).is_err());
        assert!(simulate(&params, &spec, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let params = OscillatorParams::new(1.0, 0.0, 100.0, 0.0, 1.0).unwrap();
        let init = QuadraticState::new(1.0, 0.0, 0.0, 0.0, 0.0, StateMode::Classical).unwrap();
        let mut spec = EnsembleSpec::new(2, 0.5, 2000.0, 1, init);
        spec.allow_large_dt = true;
        let res = simulate(&params, &spec, &[2000.0]);
        assert!(matches!(res, Err(Error::UnstableStep { .. })));
    }

    #[test]
    fn same_seed_same_numbers() {
        let params = OscillatorParams::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
        let spec = EnsembleSpec::new(200, 1e-2, 1.0, 42, QuadraticState::zero());
        let a = simulate(&params, &spec, &[0.5, 1.0]).unwrap();
        let b = simulate(&params, &spec, &[0.5, 1.0]).unwrap();
        assert_eq!(a, b);
        let other = EnsembleSpec { seed: 43, ..spec };
        assert_ne!(a, simulate(&params, &other, &[0.5, 1.0]).unwrap());
    }
}
