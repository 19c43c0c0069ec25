// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line grammar. Every setting is optional here: values missing from
//! the command line are looked up in the `--config` file and then in the
//! command's defaults (see [`crate::settings`]).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "qbo", version, about = "Moment dynamics of the quantum Brownian oscillator")]
pub struct Cli {
    /// Flat `key = value` file (or a CSV written by qbo) supplying settings;
    /// flags win on conflict.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the dataset as CSV to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also draw the dataset as an SVG plot.
    #[arg(long, global = true, value_name = "PATH")]
    pub plot: Option<PathBuf>,
    /// Plot axes (loglog|linear); each command has its own default.
    #[arg(long, global = true)]
    pub axes: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form position variance at one time or on a grid.
    Variance(VarianceArgs),
    /// Kurtosis trajectory of the fourth-moment system.
    Kurtosis(KurtosisArgs),
    /// Log-spaced parameter sweep of the closed-form variances.
    Sweep(SweepArgs),
    /// Kurtosis at the four comparison times next to the printed values.
    Table1(Table1Args),
    /// Langevin ensemble estimate of the classical moments.
    Montecarlo(MonteCarloArgs),
    /// Cross-check independent routes and print PASS/FAIL per invariant.
    Validate,
}

#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    /// Mass.
    #[arg(long)]
    pub m: Option<f64>,
    /// Damping rate.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Oscillator frequency.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Bath temperature times Boltzmann's constant.
    #[arg(long)]
    pub kbt: Option<f64>,
    /// Reduced Planck constant.
    #[arg(long)]
    pub hbar: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct InitArgs {
    /// Initial mean position.
    #[arg(long)]
    pub init_meanx: Option<f64>,
    /// Initial mean momentum.
    #[arg(long)]
    pub init_meanp: Option<f64>,
    /// Initial position variance.
    #[arg(long)]
    pub init_varx: Option<f64>,
    /// Initial momentum variance.
    #[arg(long)]
    pub init_varp: Option<f64>,
    /// Initial symmetrised covariance <xp+px> - 2<x><p>.
    #[arg(long)]
    pub init_sigma: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct FourthArgs {
    /// Base for the initial fourth moments (calibrated|gaussian); the
    /// individual flags override single entries.
    #[arg(long)]
    pub fourth: Option<String>,
    #[arg(long)]
    pub x4: Option<f64>,
    #[arg(long)]
    pub x3p: Option<f64>,
    #[arg(long)]
    pub x2p2: Option<f64>,
    #[arg(long)]
    pub xp3: Option<f64>,
    #[arg(long)]
    pub p4: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VarianceArgs {
    /// exact|classical|decoherence|free
    #[arg(long)]
    pub model: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub init: InitArgs,
    /// Single evaluation time.
    #[arg(long)]
    pub t: Option<f64>,
    /// Linear grid `start:stop:points`.
    #[arg(long)]
    pub t_grid: Option<String>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct KurtosisArgs {
    /// harmonic|free|both
    #[arg(long)]
    pub model: Option<String>,
    /// rk|semianalytic
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub init: InitArgs,
    #[command(flatten)]
    pub fourth: FourthArgs,
    /// End of the uniform time grid starting at 0.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    /// Start from a figure preset (1|2).
    #[arg(long)]
    pub figure: Option<u8>,
    /// left|middle|right
    #[arg(long)]
    pub panel: Option<String>,
    /// Swept parameter: m|gamma|omega|kbt|hbar.
    #[arg(long)]
    pub swept: Option<String>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Evaluation time.
    #[arg(long)]
    pub t: Option<f64>,
    /// Comma-separated curves: quantum,classical,decoherence.
    #[arg(long)]
    pub curves: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub init: InitArgs,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct Table1Args {
    #[command(flatten)]
    pub fourth: FourthArgs,
    /// Re-run the calibration of the initial fourth moments.
    #[arg(long)]
    pub calibrate: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub init: InitArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_traj: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Comma-separated sample times (multiples of dt).
    #[arg(long)]
    pub times: Option<String>,
    /// Accept dt above 0.05·min(1/γ, 1/ω).
    #[arg(long)]
    pub allow_large_dt: bool,
}
