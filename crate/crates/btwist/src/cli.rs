use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Breathing circle billiard and Fermi-Ulam twist maps: generating functions,
/// orbits, minimizers and converse-KAM bounds.
#[derive(Debug, Parser)]
#[command(name = "btwist", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Norms, strip widths and class membership of a profile (ClassReport JSON).
    Classify(ClassifyArgs),
    /// Twist check on a strip grid plus forward/backward round trips.
    TwistCheck(TwistCheckArgs),
    /// Sup-C2 distance between h_c and h_0 for several c.
    Convergence(ConvergenceArgs),
    /// Iterates the twist map (Orbit CSV).
    Orbit(OrbitArgs),
    /// Event-driven billiard simulation (event CSV plus cross-check residual).
    Simulate(SimulateArgs),
    /// Periodic action minimizer of type p/q (Configuration CSV).
    Minimize(MinimizeArgs),
    /// Minimizers along the convergents of an irrational rotation number.
    MatherProbe(MatherProbeArgs),
    /// Converse-KAM criterion on a rotation grid (scan CSV plus verdict JSON).
    CriterionScan(CriterionScanArgs),
    /// Two-sided graph inequality along a rigid or minimizing graph.
    BoundCheck(BoundCheckArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Profile JSON: {"mean": m, "harmonics": [[a1, b1], ...]}.
    pub profile: PathBuf,
    /// Admissibility parameter of sigma_B, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Directory receiving every JSON and CSV artifact.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StripArgs {
    /// Angular momentum c >= 0 (0 is the Fermi-Ulam map).
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
    /// Lower end of the flight-time strip [default: 0].
    #[arg(long)]
    pub tau_min: Option<f64>,
    /// Upper end of the flight-time strip [default: sigma, capped at 1000].
    #[arg(long)]
    pub tau_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    FermiUlam,
    Billiard,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Rotation grid for inf F.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    /// Use the most concave critical point of R instead of its global maximum.
    #[arg(long)]
    pub critical_point_mode: bool,
}

#[derive(Debug, Args)]
pub struct TwistCheckArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub strip: StripArgs,
    /// Points per axis of the twist grid.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Random states for the forward/backward round trip.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest accepted round-trip error.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Also write the jet grid as jets.csv (needs --out).
    #[arg(long)]
    pub dump_jets: bool,
    /// Certify the twist extension with blend bands a'',a',b',b''.
    #[arg(long, value_delimiter = ',')]
    pub bands: Option<Vec<f64>>,
    /// Lower bound for the tail coefficient of the extension.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated values of c (at least four).
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4,1e-5")]
    pub c_values: Vec<f64>,
    /// Lower end of the strip [default: min(1, tau_max / 2)].
    #[arg(long)]
    pub tau_min: Option<f64>,
    /// Upper end of the strip [default: the strip admissible for the largest c].
    #[arg(long)]
    pub tau_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub strip: StripArgs,
    /// Initial phase.
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,
    /// Initial momentum K.
    #[arg(long, conflicts_with = "tau", required_unless_present = "tau")]
    pub k: Option<f64>,
    /// Initial flight time; sets K = d1 h(t0, t0 + tau).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of map iterations.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Largest accepted discrete Euler-Lagrange residual.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Iterate the twist extension with blend bands a'',a',b',b''.
    #[arg(long, value_delimiter = ',')]
    pub bands: Option<Vec<f64>>,
    /// Lower bound for the tail coefficient of the extension.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Initial radius.
    #[arg(long, required_unless_present = "ensemble")]
    pub r: Option<f64>,
    /// Initial polar angle.
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Initial radial velocity.
    #[arg(long, required_unless_present = "ensemble")]
    pub vr: Option<f64>,
    /// Initial tangential velocity.
    #[arg(long, required_unless_present = "ensemble")]
    pub vtheta: Option<f64>,
    /// Initial time.
    #[arg(long, default_value_t = 0.0)]
    pub time: f64,
    #[arg(long, default_value_t = 100)]
    pub bounces: usize,
    /// Simulate this many random launches with c in (0, c_max) instead.
    #[arg(long, conflicts_with_all = ["r", "vr", "vtheta"])]
    pub ensemble: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest accepted cross-check residual.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub strip: StripArgs,
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: u64,
    /// Largest accepted residual of the result.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MatherProbeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub strip: StripArgs,
    /// Target rotation number.
    #[arg(long)]
    pub omega: f64,
    /// Continued-fraction depth.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct CriterionScanArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Mode::FermiUlam)]
    pub mode: Mode,
    /// Points of the rotation grid.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    /// Use the most concave critical point of R instead of its global maximum.
    #[arg(long)]
    pub critical_point_mode: bool,
}

#[derive(Debug, Args)]
pub struct BoundCheckArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub strip: StripArgs,
    /// Rigid graph phi(x) = x + omega.
    #[arg(long, conflicts_with_all = ["p", "q"], required_unless_present = "p")]
    pub omega: Option<f64>,
    /// Graph of the p/q minimizer.
    #[arg(long, requires = "q")]
    pub p: Option<u64>,
    #[arg(long, requires = "p")]
    pub q: Option<u64>,
    /// Sample points of the rigid graph.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Do not cap C at B^2 / 8.
    #[arg(long)]
    pub uncapped: bool,
}
