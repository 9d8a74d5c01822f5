use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "deuteron",
    version,
    about = "Deuteron wavefunctions and observables for a separable potential"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probabilities, asymptotic normalizations, D/S ratio, rms radius and quadrupole moment.
    Observables(ObservablesArgs),
    /// Coordinate-space wavefunctions u(r), w(r) on a radial grid (CSV).
    Wavefunctions(WavefunctionsArgs),
    /// Form factors and momentum-space wavefunctions on a k grid (CSV).
    Momentum(MomentumArgs),
    /// Fit the range b and ratio B²/A² to a target rms radius and quadrupole moment.
    Fit(FitArgs),
    /// Run the continuity, transform, Parseval and probability checks.
    Validate(ValidateArgs),
}

/// Model parameters. Flags override values read from `--params-json`;
/// anything unset falls back to b = 1.475 fm, alpha = 0.23165 fm⁻¹ and
/// B²/A² = 3 with the normalization solved.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// JSON file with any of b1_fm, b2_fm, alpha_inv_fm, A, B, ratio.
    #[arg(long, value_name = "PATH")]
    pub params_json: Option<PathBuf>,
    /// Common range b1 = b2 (fm).
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["b1", "b2"])]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b2: Option<f64>,
    /// Decay constant (fm⁻¹).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// S-state normalization (fm^-1/2); requires --norm-d.
    #[arg(
        long = "norm-s",
        allow_negative_numbers = true,
        visible_alias = "A",
        requires = "norm_d",
        conflicts_with = "ratio"
    )]
    pub norm_s: Option<f64>,
    /// D-state normalization (fm^-1/2); requires --norm-s.
    #[arg(
        long = "norm-d",
        allow_negative_numbers = true,
        visible_alias = "B",
        requires = "norm_s"
    )]
    pub norm_d: Option<f64>,
    /// Ratio B²/A²; A and B are then fixed by P_S + P_D = 1.
    #[arg(long, allow_negative_numbers = true)]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ObservablesArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Do not print the summary table on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct WavefunctionsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub r_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 12.0)]
    pub r_max: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.05)]
    pub step: f64,
    /// Reference CSV (first column r in fm) merged by nearest r.
    #[arg(long, value_name = "PATH")]
    pub overlay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentumArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub k_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 10.0)]
    pub k_max: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.05)]
    pub k_step: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// JSON file; alpha_inv_fm, b_fm (or b1_fm) and ratio set alpha and the
    /// starting point unless given as flags.
    #[arg(long, value_name = "PATH")]
    pub params_json: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Target rms radius (fm).
    #[arg(long, allow_negative_numbers = true, default_value_t = 2.08)]
    pub r_rms: f64,
    /// Target quadrupole moment (fm²).
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.286)]
    pub q: f64,
    /// Decay constant (fm⁻¹) [default: 0.23165].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Starting b (fm) [default: 1.2].
    #[arg(long, allow_negative_numbers = true)]
    pub b0: Option<f64>,
    /// Starting B²/A² [default: 2.0].
    #[arg(long, allow_negative_numbers = true)]
    pub ratio0: Option<f64>,
    /// Convergence threshold on the target-scaled residual.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iterations: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Emit the report as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-10)]
    pub tol_continuity: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-8)]
    pub tol_derivative: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-7)]
    pub tol_transform: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-7)]
    pub tol_parseval: f64,
    /// Scale the middle-region D-state branch by this factor (testing only).
    #[arg(long, allow_negative_numbers = true, hide = true)]
    pub corrupt_middle_w: Option<f64>,
}
