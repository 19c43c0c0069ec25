// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dormand–Prince 5(4) integrator with PI step-size control.
//!
//! The integrator steps exactly onto every requested output time (it never
//! interpolates), so the reported values carry the full local-error control.

use crate::error::{Error, Result};

/// Error-control settings of [`Dopri5`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Steps are abandoned once `h < min_step_ratio · max(|t|, 1)`.
    pub min_step_ratio: f64,
    /// Budget of attempted steps; exhausting it is reported as stiffness.
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            min_step_ratio: 1e-14,
            max_steps: 2_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Explicit adaptive integrator for `y' = f(t, y)` on fixed-size states.
pub struct Dopri5<const N: usize> {
    ctl: StepControl,
}

impl<const N: usize> Dopri5<N> {
    pub fn new(ctl: StepControl) -> Self {
        Self { ctl }
    }

    /// Integrates from `(t0, y0)` and records the state at each `times[i]`.
    /// `times` must be non-decreasing and start at or after `t0`.
    pub fn solve<F>(&self, mut f: F, t0: f64, y0: [f64; N], times: &[f64]) -> Result<Vec<[f64; N]>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let ctl = &self.ctl;
        let mut out = Vec::with_capacity(times.len());
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = initial_step(ctl, &y, &k1);
        let mut err_prev: f64 = 1e-4;
        let mut steps = 0usize;
        for &target in times {
            if target < t {
                return Err(Error::InvalidGrid(format!(
                    "output time {target} precedes current time {t}"
                )));
            }
            while t < target {
                let remaining = target - t;
                let last = h >= remaining;
                let step = if last { remaining } else { h.min(ctl.max_step) };
                let (y_new, k7, err) = stage(&mut f, t, &y, &k1, step, ctl);
                if err <= 1.0 {
                    t = if last || step == remaining { target } else { t + step };
                    y = y_new;
                    k1 = k7;
                    // PI controller (Hairer–Wanner, β = 0.04).
                    let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.04);
                    let grown = step * fac.clamp(0.2, 5.0);
                    h = if last { h.max(grown) } else { grown };
                    err_prev = err.max(1e-4);
                } else {
                    h = step * (0.9 * err.powf(-0.2)).max(0.2);
                }
                h = h.min(ctl.max_step);
                steps += 1;
                if !h.is_finite()
                    || h < ctl.min_step_ratio * t.abs().max(1.0)
                    || steps > ctl.max_steps
                {
                    return Err(Error::StepSizeUnderflow { t, h });
                }
            }
            out.push(y);
        }
        Ok(out)
    }
}

fn initial_step<const N: usize>(ctl: &StepControl, y: &[f64; N], dy: &[f64; N]) -> f64 {
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..N {
        let sc = ctl.abs_tol + ctl.rel_tol * y[i].abs();
        d0 = d0.max((y[i] / sc).abs());
        d1 = d1.max((dy[i] / sc).abs());
    }
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(ctl.max_step)
}

fn stage<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    ctl: &StepControl,
) -> ([f64; N], [f64; N], f64)
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        if s == 6 {
            // FSAL: the 7th stage is evaluated at the new solution.
            let k7 = f(t + h, &ys);
            k[6] = k7;
            let mut err: f64 = 0.0;
            for i in 0..N {
                let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
                let sc = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(ys[i].abs());
                err = err.max((e / sc).abs());
            }
            return (ys, k7, err);
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    unreachable!("the loop returns at the last stage")
}
