// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Gauss–Legendre rules and adaptive panel integration of vector integrands.

use crate::error::{Error, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on `P_n`, started at the Chebyshev guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of a scalar function over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        half * sum
    }

    /// Integral of a vector-valued function over `[a, b]`.
    pub fn integrate_vec<const N: usize, F>(&self, a: f64, b: f64, f: &mut F) -> [f64; N]
    where
        F: FnMut(f64) -> [f64; N],
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = [0.0; N];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            for k in 0..N {
                acc[k] += w * v[k];
            }
        }
        acc.map(|s| s * half)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive integration over `[a, b]`, pre-split into panels no wider than
/// `max_panel`. Each panel is accepted when the rule on the whole panel and
/// on its two halves agree to `rel_tol` (relative to the running magnitude)
/// or `abs_tol`; otherwise it is bisected, at most `max_depth` times.
pub fn adaptive_panels<const N: usize, F>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    max_panel: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
    mut f: F,
) -> Result<[f64; N]>
where
    F: FnMut(f64) -> [f64; N],
{
    let mut total = [0.0; N];
    if b <= a {
        return Ok(total);
    }
    let panels = if max_panel.is_finite() && max_panel > 0.0 {
        ((b - a) / max_panel).ceil().clamp(1.0, 1e7) as usize
    } else {
        1
    };
    let width = (b - a) / panels as f64;
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        let coarse = rule.integrate_vec(lo, hi, &mut f);
        let part = refine(rule, lo, hi, coarse, rel_tol, abs_tol, max_depth, &mut f)?;
        for k in 0..N {
            total[k] += part[k];
        }
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<const N: usize, F>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    coarse: [f64; N],
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
    f: &mut F,
) -> Result<[f64; N]>
where
    F: FnMut(f64) -> [f64; N],
{
    let mid = 0.5 * (a + b);
    let left = rule.integrate_vec(a, mid, f);
    let right = rule.integrate_vec(mid, b, f);
    let mut fine = [0.0; N];
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..N {
        fine[k] = left[k] + right[k];
        err = err.max((fine[k] - coarse[k]).abs());
        scale = scale.max(fine[k].abs());
    }
    if err <= abs_tol.max(rel_tol * scale) {
        return Ok(fine);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergence { a, b });
    }
    let l = refine(rule, a, mid, left, rel_tol, abs_tol, depth - 1, f)?;
    let r = refine(rule, mid, b, right, rel_tol, abs_tol, depth - 1, f)?;
    let mut out = [0.0; N];
    for k in 0..N {
        out[k] = l[k] + r[k];
    }
    Ok(out)
}
