// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Analytic position variances of the Brownian oscillator.
//!
//! Everything is expressed through the damped hyperbolic building blocks of
//! [`HyperbolicKernel`], with `Ω² = γ² − ω²`. The kernel has three branches
//! (overdamped, underdamped, and a Taylor series in `d·t²` inside the
//! critical band) and never forms a bare `cosh` or `sinh`, so the damping
//! factor `e^{−2γt}` is always absorbed before anything can overflow.

use crate::error::{Error, Result};
use crate::model::{classify_regime, DampingRegime, OscillatorParams, QuadraticState};
use crate::quadrature::GaussLegendre;

/// Largest `|d|·t²` for which the critical-band Taylor series is used.
///
/// The truncation error of the series is `O((d t²)³) ≤ 1e-15`; outside this
/// window the exponential branches are accurate to a few ulps.
pub const TAYLOR_WINDOW: f64 = 1e-5;

/// Damped hyperbolic building blocks at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicKernel {
    /// `e^{−2γt} cosh(2Ωt)`
    pub c2: f64,
    /// `e^{−2γt} sinh(2Ωt) / Ω`
    pub s2: f64,
    /// `e^{−2γt} cosh²(Ωt)`
    pub ch2: f64,
    /// `e^{−2γt} sinh²(Ωt) / Ω²`
    pub sh2: f64,
    /// `e^{−2γt}`
    pub decay: f64,
}

/// Kernel plus the half-rate quantities that make up the mean propagator.
#[derive(Debug, Clone, Copy)]
struct Blocks {
    k: HyperbolicKernel,
    /// `e^{−γt} cosh(Ωt)`
    hc: f64,
    /// `e^{−γt} sinh(Ωt) / Ω`
    hs: f64,
    /// `e^{−γt} (cosh(Ωt) − γ sinh(Ωt)/Ω)`, computed without cancellation
    /// where possible.
    f22: f64,
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// Evaluates the kernel regime-safely.
pub fn kernel(params: &OscillatorParams, t: f64) -> Result<HyperbolicKernel> {
    check_time(t)?;
    Ok(blocks(params, t).k)
}

fn blocks(params: &OscillatorParams, t: f64) -> Blocks {
    let g = params.gamma();
    let w = params.omega();
    let d = params.discriminant();
    let regime = classify_regime(params);
    let z = d * t * t;
    if d == 0.0 || (regime.kind == DampingRegime::Critical && z.abs() <= TAYLOR_WINDOW) {
        return taylor_blocks(g, z, t);
    }
    if d > 0.0 {
        overdamped_blocks(g, w, d.sqrt(), t)
    } else {
        underdamped_blocks(g, (-d).sqrt(), t)
    }
}

fn taylor_blocks(g: f64, z: f64, t: f64) -> Blocks {
    let e1 = (-g * t).exp();
    let e2 = e1 * e1;
    let hc = e1 * (1.0 + z / 2.0 + z * z / 24.0);
    let hs = e1 * t * (1.0 + z / 6.0 + z * z / 120.0);
    Blocks {
        k: HyperbolicKernel {
            c2: e2 * (1.0 + 2.0 * z + 2.0 * z * z / 3.0),
            s2: 2.0 * e2 * t * (1.0 + 2.0 * z / 3.0 + 2.0 * z * z / 15.0),
            ch2: e2 * (1.0 + z + z * z / 3.0),
            sh2: e2 * t * t * (1.0 + z / 3.0 + 2.0 * z * z / 45.0),
            decay: e2,
        },
        hc,
        hs,
        f22: hc - g * hs,
    }
}

/// `γ > ω`: write `γ − Ω = ω²/(γ + Ω)` (the slow rate, free of cancellation)
/// and express everything through `e^{−(γ−Ω)t}` and `q = e^{−2Ωt} ≤ 1`.
fn overdamped_blocks(g: f64, w: f64, big: f64, t: f64) -> Blocks {
    let fast = g + big;
    let slow = w * w / fast;
    let e_slow = (-slow * t).exp();
    let a = e_slow * e_slow;
    let q = (-2.0 * big * t).exp();
    let em2 = (-2.0 * big * t).exp_m1();
    let em4 = (-4.0 * big * t).exp_m1();
    let hc = e_slow * (1.0 + q) / 2.0;
    let hs = -e_slow * em2 / (2.0 * big);
    Blocks {
        k: HyperbolicKernel {
            c2: a * (1.0 + q * q) / 2.0,
            s2: -a * em4 / (2.0 * big),
            ch2: a * (1.0 + q) * (1.0 + q) / 4.0,
            sh2: a * em2 * em2 / (4.0 * big * big),
            decay: (-2.0 * g * t).exp(),
        },
        hc,
        hs,
        f22: e_slow * (q * fast - slow) / (2.0 * big),
    }
}

/// `γ < ω`: `Ω = iν` with `ν = √(ω² − γ²)`; all fields are real.
fn underdamped_blocks(g: f64, nu: f64, t: f64) -> Blocks {
    let e1 = (-g * t).exp();
    let e2 = e1 * e1;
    let (s, c) = (nu * t).sin_cos();
    let (s2, c2) = (2.0 * nu * t).sin_cos();
    let hc = e1 * c;
    let hs = e1 * s / nu;
    Blocks {
        k: HyperbolicKernel {
            c2: e2 * c2,
            s2: e2 * s2 / nu,
            ch2: e2 * c * c,
            sh2: e2 * (s / nu) * (s / nu),
            decay: e2,
        },
        hc,
        hs,
        f22: hc - g * hs,
    }
}

/// Thermal filling fraction `φ(t) = 1 − e^{−2γt} − 2γ² sh2 − γ s2`, which
/// rises from 0 to 1 and equals `4γω² ∫₀ᵗ sh2(s) ds`.
///
/// The classical variance is `kBT/(mω²) · φ`. Near `t = 0` the direct sum
/// cancels to `O((ωt)²(γt))`; when it has lost more than three digits it is
/// recomputed from the integral representation.
fn thermal_fraction(params: &OscillatorParams, b: &Blocks, t: f64) -> f64 {
    let g = params.gamma();
    let w = params.omega();
    if g == 0.0 || w == 0.0 || t == 0.0 {
        return 0.0;
    }
    let d = params.discriminant();
    let k = &b.k;
    let overdamped = d > 0.0
        && !(classify_regime(params).kind == DampingRegime::Critical
            && (d * t * t).abs() <= TAYLOR_WINDOW);
    let pieces = if overdamped {
        let big = d.sqrt();
        let slow = w * w / (g + big);
        let a = (-2.0 * slow * t).exp();
        let q = (-2.0 * big * t).exp();
        let delta = slow * (g + 2.0 * big) / (2.0 * big * big);
        [
            -(-2.0 * slow * t).exp_m1(),
            -a * delta,
            a * q * w * w / (big * big),
            -a * q * q * g * slow / (2.0 * big * big),
        ]
    } else {
        [-(-2.0 * g * t).exp_m1(), -2.0 * g * g * k.sh2, -g * k.s2, 0.0]
    };
    let direct: f64 = pieces.iter().sum();
    let scale: f64 = pieces.iter().map(|v| v.abs()).sum();
    let rate = g + d.abs().sqrt() + w;
    if direct < 1e-3 * scale && rate * t <= 400.0 {
        let rule = GaussLegendre::new(20);
        let panels = (2.0 * rate * t).ceil().max(1.0) as usize;
        let h = t / panels as f64;
        let mut acc = 0.0;
        for i in 0..panels {
            let lo = h * i as f64;
            acc += rule.integrate(lo, lo + h, |s| blocks(params, s).k.sh2);
        }
        return 4.0 * g * w * w * acc;
    }
    direct
}

/// Applies the non-negativity policy: tiny negatives (round-off relative to
/// the magnitude of the contributing terms) become 0, anything else is
/// returned unchanged.
fn settle(value: f64, scale: f64) -> f64 {
    if value < 0.0 && -value <= 1e-12 * scale {
        0.0
    } else {
        value
    }
}

fn require_frequency(params: &OscillatorParams) -> Result<()> {
    if params.omega() > 0.0 {
        Ok(())
    } else {
        Err(Error::ZeroFrequency)
    }
}

/// Exact quantum position variance of the damped oscillator.
///
/// The result is the thermal part `kBT/(mω²)·φ(t)` plus the propagated
/// initial second moments.
pub fn exact_variance(params: &OscillatorParams, init: &QuadraticState, t: f64) -> Result<f64> {
    check_time(t)?;
    require_frequency(params)?;
    let b = blocks(params, t);
    Ok(variance_from_blocks(params, init, t, &b))
}

fn variance_from_blocks(params: &OscillatorParams, init: &QuadraticState, t: f64, b: &Blocks) -> f64 {
    let (m, g) = (params.mass(), params.gamma());
    let k = &b.k;
    let thermal = params.kbt() / (m * params.omega().powi(2)) * thermal_fraction(params, b, t);
    let terms = [
        thermal,
        init.var_p() / (m * m) * k.sh2,
        init.var_x() * (k.ch2 + g * g * k.sh2 + g * k.s2),
        init.sigma() / (2.0 * m) * (2.0 * g * k.sh2 + k.s2),
    ];
    let scale: f64 = terms.iter().map(|v| v.abs()).sum();
    settle(terms.iter().sum(), scale)
}

/// Classical position variance started from a point mass at the origin.
pub fn classical_variance(params: &OscillatorParams, t: f64) -> Result<f64> {
    check_time(t)?;
    require_frequency(params)?;
    let b = blocks(params, t);
    let phi = thermal_fraction(params, &b, t);
    Ok(params.kbt() / (params.mass() * params.omega().powi(2)) * phi)
}

/// `x − sin x` without cancellation for small `x`.
fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum: f64 = 0.0;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() || sum == 0.0 {
            sum += term;
            term *= -x2 / ((k + 1.0) * (k + 2.0));
            k += 2.0;
            if k > 60.0 {
                break;
            }
        }
        sum
    } else {
        x - x.sin()
    }
}

/// Position variance in the decoherence limit (dissipation dropped): an
/// undamped oscillation of the initial moments plus diffusive heating.
pub fn decoherence_variance(
    params: &OscillatorParams,
    init: &QuadraticState,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    require_frequency(params)?;
    let (m, g, w, kbt) = (params.mass(), params.gamma(), params.omega(), params.kbt());
    let (s, c) = (w * t).sin_cos();
    let terms = [
        init.var_x() * c * c,
        init.var_p() / (m * m * w * w) * s * s,
        init.sigma() / (2.0 * m * w) * (2.0 * w * t).sin(),
        g * kbt / (m * w.powi(3)) * x_minus_sin(2.0 * w * t),
    ];
    let scale: f64 = terms.iter().map(|v| v.abs()).sum();
    Ok(settle(terms.iter().sum(), scale))
}

/// `B(y) = y/2 − (1 − e^{−y}) + (1 − e^{−2y})/4`, the thermal bracket of the
/// free particle (`y = 2γt`). It starts as `y³/6`, so small `y` uses the series.
fn free_thermal_bracket(y: f64) -> f64 {
    if y < 1.0 {
        let mut sum = 0.0;
        let mut pow_over_fact = y * y / 2.0; // y^k / k! at k = 2
        let mut two_pow = 1.0; // 2^{k-2} at k = 2
        for k in 3..60 {
            pow_over_fact *= y / k as f64;
            two_pow *= 2.0;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * (1.0 - two_pow) * pow_over_fact;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        y / 2.0 + (-y).exp_m1() - (-2.0 * y).exp_m1() / 4.0
    }
}

/// Position variance of the free Brownian particle (`ω = 0`).
///
/// The initial-correlation term carries the factor `(1 − e^{−2γt})/(2mγ)`,
/// which is what the second-moment equations give at `ω = 0`.
pub fn free_particle_variance(
    params: &OscillatorParams,
    init: &QuadraticState,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    let (m, g, kbt) = (params.mass(), params.gamma(), params.kbt());
    if g <= 0.0 {
        return Err(Error::ZeroDamping);
    }
    let y = 2.0 * g * t;
    let g1 = -(-y).exp_m1();
    let reach = g1 / (2.0 * m * g);
    let terms = [
        init.var_x(),
        reach * reach * init.var_p(),
        reach * init.sigma(),
        kbt / (m * g * g) * free_thermal_bracket(y),
    ];
    let scale: f64 = terms.iter().map(|v| v.abs()).sum();
    Ok(settle(terms.iter().sum(), scale))
}

/// Mean propagator `Φ(t)` for `(⟨x⟩, ⟨p⟩)`: `[[φxx, φxp], [φpx, φpp]]`.
pub fn mean_propagator(params: &OscillatorParams, t: f64) -> Result<[[f64; 2]; 2]> {
    check_time(t)?;
    Ok(propagator_from_blocks(params, &blocks(params, t)))
}

fn propagator_from_blocks(params: &OscillatorParams, b: &Blocks) -> [[f64; 2]; 2] {
    let (m, g, w) = (params.mass(), params.gamma(), params.omega());
    [
        [b.hc + g * b.hs, b.hs / m],
        [-m * w * w * b.hs, b.f22],
    ]
}

/// Full first and second moments at time `t` in closed form.
///
/// The position variance is the same expression as [`exact_variance`] (or
/// [`free_particle_variance`] for `ω = 0`); the covariance and momentum
/// variance are its companions obtained from the mean propagator and the
/// thermal integrals.
pub fn second_moments(
    params: &OscillatorParams,
    init: &QuadraticState,
    t: f64,
) -> Result<QuadraticState> {
    check_time(t)?;
    let (m, g, kbt) = (params.mass(), params.gamma(), params.kbt());
    let (x0, p0) = (init.mean_x(), init.mean_p());
    let (u0, s0, w0) = (init.var_x(), init.sigma(), init.var_p());
    if params.omega() == 0.0 {
        if g == 0.0 {
            // Free unitary motion: x(t) = x0 + p0 t / m.
            let r = t / m;
            return Ok(QuadraticState::from_raw(
                x0 + p0 * r,
                p0,
                u0 + s0 * r + w0 * r * r,
                w0,
                s0 + 2.0 * w0 * r,
            ));
        }
        let e = (-2.0 * g * t).exp();
        let g1 = -(-2.0 * g * t).exp_m1();
        let var_x = free_particle_variance(params, init, t)?;
        let sigma = s0 * e + w0 * e * g1 / (m * g) + kbt / g * g1 * g1;
        let var_p = w0 * e * e - m * kbt * (-4.0 * g * t).exp_m1();
        return Ok(QuadraticState::from_raw(
            x0 + p0 * g1 / (2.0 * m * g),
            p0 * e,
            var_x,
            settle(var_p, (w0 * e * e).abs() + m * kbt),
            sigma,
        ));
    }
    let b = blocks(params, t);
    let [[fxx, fxp], [fpx, fpp]] = propagator_from_blocks(params, &b);
    let phi = thermal_fraction(params, &b, t);
    let var_x = variance_from_blocks(params, init, t, &b);
    let sigma = 2.0 * fxx * fpx * u0
        + (fxx * fpp + fxp * fpx) * s0
        + 2.0 * fxp * fpp * w0
        + 4.0 * g * kbt * b.hs * b.hs;
    let hom_p = fpx * fpx * u0 + fpx * fpp * s0 + fpp * fpp * w0;
    let th_p = m * kbt * (phi + 2.0 * g * b.k.s2);
    let var_p = settle(hom_p + th_p, hom_p.abs() + th_p.abs());
    Ok(QuadraticState::from_raw(
        fxx * x0 + fxp * p0,
        fpx * x0 + fpp * p0,
        var_x,
        var_p,
        sigma,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::StateMode;
    use num_complex::Complex64;

    fn p(m: f64, g: f64, w: f64, k: f64) -> OscillatorParams {
        OscillatorParams::new(m, g, w, k, 1.0).unwrap()
    }

    fn init(u: f64, w: f64, s: f64) -> QuadraticState {
        QuadraticState::centered(u, w, s, StateMode::Classical).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    /// The same expressions evaluated in complex arithmetic with `Ω = √d`.
    fn complex_kernel(g: f64, w: f64, t: f64) -> [Complex64; 4] {
        let big = Complex64::new(g * g - w * w, 0.0).sqrt();
        let e = (-2.0 * g * t).exp();
        let x = big * t;
        [
            e * (2.0 * x).cosh(),
            e * (2.0 * x).sinh() / big,
            e * x.cosh() * x.cosh(),
            e * x.sinh() * x.sinh() / (big * big),
        ]
    }

    #[test]
    fn kernel_is_identity_at_zero() {
        for pp in [p(1.0, 10.0, 0.1, 1.0), p(1.0, 0.1, 10.0, 1.0), p(1.0, 1.0, 1.0, 1.0)] {
            let k = kernel(&pp, 0.0).unwrap();
            assert_eq!((k.c2, k.s2, k.ch2, k.sh2, k.decay), (1.0, 0.0, 1.0, 0.0, 1.0));
        }
    }

    #[test]
    fn critical_limit_of_sh2() {
        let k = kernel(&p(1.0, 1.0, 1.0, 1.0), 2.0).unwrap();
        assert!(rel(k.sh2, (-4.0f64).exp() * 4.0) < 1e-15);
    }

    #[test]
    fn kernel_matches_complex_evaluation() {
        for (g, w, t) in [(10.0, 0.1, 10.0), (0.1, 10.0, 3.7), (1.0, 1.5, 2.0), (2.0, 1.0, 0.3)] {
            let k = kernel(&p(1.0, g, w, 1.0), t).unwrap();
            let c = complex_kernel(g, w, t);
            for (got, want) in [k.c2, k.s2, k.ch2, k.sh2].iter().zip(c) {
                assert!(want.im.abs() < 1e-12, "{want}");
                assert!(rel(*got, want.re) < 1e-12, "g={g} w={w}: {got} vs {}", want.re);
            }
        }
    }

    #[test]
    fn kernel_never_overflows() {
        let k = kernel(&p(10.0, 1e7, 10.0, 0.1), 10.0).unwrap();
        for v in [k.c2, k.s2, k.ch2, k.sh2, k.decay] {
            assert!(v.is_finite());
        }
        let k = kernel(&p(1.0, 1.0, 0.5, 1.0), 1e9).unwrap();
        assert!(k.c2.is_finite() && k.sh2 == 0.0);
    }

    #[test]
    fn negative_time_and_zero_frequency_are_rejected() {
        let pp = p(1.0, 1.0, 1.0, 1.0);
        assert_eq!(kernel(&pp, -1.0), Err(Error::NegativeTime(-1.0)));
        let free = p(1.0, 1.0, 0.0, 1.0);
        assert_eq!(classical_variance(&free, 1.0), Err(Error::ZeroFrequency));
        let frozen = p(1.0, 0.0, 0.0, 1.0);
        let z = QuadraticState::zero();
        assert_eq!(free_particle_variance(&frozen, &z, 1.0), Err(Error::ZeroDamping));
    }

    #[test]
    fn exact_variance_starts_at_initial_value() {
        let pp = p(10.0, 1.0, 1.0, 0.1);
        let v = exact_variance(&pp, &init(1e-7, 1e7, 0.01), 0.0).unwrap();
        assert_eq!(v, 1e-7);
    }

    #[test]
    fn classical_starts_at_zero_and_reaches_equipartition() {
        for pp in [p(1.0, 0.5, 1.0, 1.0), p(0.1, 10.0, 0.1, 3.0), p(10.0, 0.01, 2.0, 0.1)] {
            assert_eq!(classical_variance(&pp, 0.0).unwrap(), 0.0);
            let t = 50.0 / pp.gamma();
            let target = pp.kbt() / (pp.mass() * pp.omega().powi(2));
            // Overdamped relaxation is slower than 1/γ: use the slow rate.
            let slow = if pp.discriminant() > 0.0 {
                pp.omega().powi(2) / (pp.gamma() + pp.discriminant().sqrt())
            } else {
                pp.gamma()
            };
            let t = t.max(50.0 / slow);
            assert!(rel(classical_variance(&pp, t).unwrap(), target) < 1e-10);
        }
    }

    #[test]
    fn thermal_fraction_small_time_is_accurate() {
        // φ ≈ (4/3) γ ω² t³ for small t.
        let pp = p(1.0, 0.3, 0.7, 1.0);
        let t = 1e-4;
        let want = 4.0 / 3.0 * 0.3 * 0.49 * t * t * t;
        let got = classical_variance(&pp, t).unwrap() * 0.49;
        assert!(rel(got, want) < 1e-3, "{got} {want}");
    }

    #[test]
    fn decoherence_periodic_and_linear_parts() {
        let pp = p(1000.0, 1.0, 10.0, 0.1);
        let z = QuadraticState::zero();
        let slope = 2.0 * 0.1 / (1000.0 * 100.0);
        let f = |t: f64| decoherence_variance(&pp, &z, t).unwrap() - slope * t;
        let period = std::f64::consts::PI / 10.0;
        for t in [0.3, 7.0, 120.0] {
            assert!(rel(f(t + period), f(t)) < 1e-9);
        }
        let cold = p(1.0, 1.0, 2.0, 0.0);
        let i = init(1.0, 2.0, 0.5);
        let a = decoherence_variance(&cold, &i, 0.4).unwrap();
        let b = decoherence_variance(&cold, &i, 0.4 + std::f64::consts::PI / 2.0).unwrap();
        assert!(rel(a, b) < 1e-12);
        assert_eq!(decoherence_variance(&cold, &i, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn free_particle_limits() {
        let pp = p(1.0, 1.0, 0.0, 1.0);
        let z = QuadraticState::zero();
        let r = free_particle_variance(&pp, &z, 2000.0).unwrap()
            / free_particle_variance(&pp, &z, 1000.0).unwrap();
        assert!((r - 2.0).abs() < 1e-3);
        let i = init(0.5, 0.5, 0.0);
        assert_eq!(free_particle_variance(&pp, &i, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn free_bracket_series_meets_direct_form() {
        for y in [0.5, 0.9, 0.999_999] {
            let y: f64 = y;
            let direct = y / 2.0 + (-y).exp_m1() - (-2.0 * y).exp_m1() / 4.0;
            assert!(rel(free_thermal_bracket(y), direct) < 1e-13, "y={y}");
        }
        assert!(rel(free_thermal_bracket(1e-6), 1e-18 / 6.0) < 1e-5);
    }

    #[test]
    fn companions_start_at_initial_state() {
        let i = QuadraticState::new(0.3, -0.2, 1.0, 2.0, 0.5, StateMode::Classical).unwrap();
        for pp in [p(1.0, 2.0, 1.0, 1.0), p(1.0, 0.1, 1.0, 1.0), p(1.0, 1.0, 0.0, 1.0)] {
            let s = second_moments(&pp, &i, 0.0).unwrap();
            assert_eq!(s.second_moments(), [1.0, 0.5, 2.0]);
            assert_eq!((s.mean_x(), s.mean_p()), (0.3, -0.2));
        }
    }

    #[test]
    fn companions_reach_equipartition() {
        let pp = p(2.0, 0.5, 1.3, 0.7);
        let s = second_moments(&pp, &init(1.0, 1.0, 0.0), 200.0).unwrap();
        assert!(rel(s.var_p(), 2.0 * 0.7) < 1e-12);
        assert!(rel(s.var_x(), 0.7 / (2.0 * 1.69)) < 1e-12);
        assert!(s.sigma().abs() < 1e-12);
    }
}
