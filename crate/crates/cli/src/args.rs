use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use micz_core::HalfInt;

#[derive(Debug, Parser)]
#[command(
    name = "micz",
    version,
    about = "su(1,1) spectra, Sturmian states and number coherent states of the generalized MICZ-Kepler problem"
)]
pub struct Cli {
    /// TOML file with one section per subcommand; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    /// `Ψ(r)` under `(1/r) r² dr`.
    Group,
    /// `𝒩 γ^{1/2} Ψ(γr)` under `r² dr`.
    Physical,
}

#[derive(Debug, Default, Args)]
pub struct OutputArgs {
    /// Output file; defaults to `$MICZ_OUTPUT_DIR/<command>.<ext>` or stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// A sector `(s, c1, c2, m, j)`, or `J` given directly.
#[derive(Debug, Default, Args)]
pub struct SectorArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<HalfInt>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<HalfInt>,
    #[arg(long)]
    pub j: Option<HalfInt>,
    /// `J = j + (δ1+δ2)/2`, instead of a sector.
    #[arg(long = "J", allow_hyphen_values = true)]
    pub big_j: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct RadialGridArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energies of every level with j ≤ j-max and n ≤ n-max.
    Spectrum(SpectrumArgs),
    /// Sturmian and physical radial functions on a grid.
    Sturmian(SturmianArgs),
    /// Angular function along θ at fixed φ.
    Angular(AngularArgs),
    /// Number coherent state on a radial grid.
    Coherent(CoherentArgs),
    /// ⟨r⟩, E and 𝒩 along a time trajectory.
    Evolve(EvolveArgs),
    /// Closed forms against oracles; JSON report by default.
    Verify(VerifyArgs),
    /// Competing formulas with the checks that decide between them.
    Errata(ErrataArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Sturmian(_) => "sturmian",
            Command::Angular(_) => "angular",
            Command::Coherent(_) => "coherent",
            Command::Evolve(_) => "evolve",
            Command::Verify(_) => "verify",
            Command::Errata(_) => "errata",
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<HalfInt>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub j_max: Option<HalfInt>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SturmianArgs {
    #[command(flatten)]
    pub sector: SectorArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub grid: RadialGridArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AngularArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<HalfInt>,
    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<HalfInt>,
    #[arg(long)]
    pub j: Option<HalfInt>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// θ samples on [0, π].
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CoherentArgs {
    #[command(flatten)]
    pub sector: SectorArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Evaluate at this time on the trajectory.
    #[arg(long, allow_hyphen_values = true)]
    pub time: Option<f64>,
    #[arg(long, value_enum)]
    pub measure: Option<Measure>,
    #[command(flatten)]
    pub grid: RadialGridArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub sector: SectorArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// A number, or a multiple of the period such as `2pi/gamma`.
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Fock cutoff for ⟨r⟩; defaults by τ.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// all, algebra, special, model, coherent, oracle or errata.
    #[arg(long)]
    pub suite: Option<String>,
    /// Fock cutoff for the matrix checks (default 300).
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Override a tolerance, e.g. `--tol quadrature=1e-8`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    pub tolerances: Vec<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ErrataArgs {
    #[command(flatten)]
    pub out: OutputArgs,
}
