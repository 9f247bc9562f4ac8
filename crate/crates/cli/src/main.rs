mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use curvegait::colormap::ScaleMode;
use curvegait::curvature::CurvatureKind;
use curvegait::mesh::io::MeshFormat;
use curvegait::synth::GaitType;

#[derive(Parser)]
#[command(name = "curvegait", version, about = "Curvature maps of walking-body mesh sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a gait sequence: one mesh per frame plus sequence.json.
    Synth(SynthArgs),
    /// Curvature of one mesh: colored mesh plus statistics.
    Curv(CurvArgs),
    /// Analyse a synthesized or loaded sequence.
    Analyze(AnalyzeArgs),
    /// Check meshes for manifoldness, degeneracy and topology.
    Validate(ValidateArgs),
}

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long, default_value = "normal")]
    pub gait: GaitType,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub cycles: u32,
    /// Frames per cycle; even and at least 8.
    #[arg(long, default_value_t = 8, value_parser = parse_fpc)]
    pub fpc: usize,
    /// Body height, m.
    #[arg(long, default_value_t = 1.73)]
    pub height: f64,
    /// Normal-gait step length, m.
    #[arg(long, default_value_t = 0.65)]
    pub step: f64,
    #[arg(long, default_value_t = 24)]
    pub radial_segments: usize,
    #[arg(long, default_value_t = 110)]
    pub rings_per_height: usize,
    /// Vertex jitter along the normals, m. Zero disables it.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "ply")]
    pub format: MeshFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Symmetric,
    Minmax,
}

impl From<ScaleArg> for ScaleMode {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Symmetric => ScaleMode::Symmetric,
            ScaleArg::Minmax => ScaleMode::MinMax,
        }
    }
}

#[derive(Args)]
pub struct ColorArgs {
    #[arg(long, value_enum, default_value = "symmetric")]
    pub scale: ScaleArg,
    /// Fixed half range of a symmetric scale instead of the 2–98% percentiles.
    #[arg(long)]
    pub range: Option<f64>,
    /// Scale each mesh on its own values instead of the pooled values.
    #[arg(long)]
    pub per_frame_scale: bool,
    #[arg(long, default_value = "ply")]
    pub format: MeshFormat,
}

#[derive(Args)]
pub struct CurvArgs {
    pub mesh: PathBuf,
    /// gaussian, mean, absolute, rms, k1 or k2.
    #[arg(long = "type", default_value = "gaussian")]
    pub kind: CurvatureKind,
    #[command(flatten)]
    pub color: ColorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Analysis {
    Knees,
    Symmetry,
    Average,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// sequence.json written by `synth`.
    pub sequence: PathBuf,
    #[arg(value_enum)]
    pub analysis: Analysis,
    /// gaussian, mean, absolute, rms, k1 or k2.
    #[arg(long = "type", default_value = "gaussian")]
    pub kind: CurvatureKind,
    /// Knee search band as fractions of body height.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.25, 0.30])]
    pub band: Vec<f64>,
    /// Knee averaging radius, m.
    #[arg(long, default_value_t = 0.05)]
    pub radius: f64,
    #[arg(long, default_value_t = curvegait::analysis::DEFAULT_TAU)]
    pub tau: f64,
    /// Cycle averaged by `average`.
    #[arg(long, default_value_t = 0)]
    pub cycle: usize,
    #[command(flatten)]
    pub color: ColorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ValidateArgs {
    #[arg(required = true)]
    pub meshes: Vec<PathBuf>,
    /// Also write validation.json here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_fpc(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 8 || !n.is_multiple_of(2) {
        return Err(format!("frames per cycle must be even and at least 8, got {n}"));
    }
    Ok(n)
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("CURVEGAIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("CURVEGAIT_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        bail!("CURVEGAIT_THREADS must be a positive integer, got `{v}`");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::Curv(a) => commands::curv(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Validate(a) => commands::validate(&a),
    }
}

fn main() -> ExitCode {
    // Usage errors exit with status 2 from inside `parse`.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
