use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use holobgs::profiles::SourceProfile;
use holobgs::{Algorithm, CompensationSign, InitialPhase, IterationConfig, ThetaConvention};
use holobgs_cli::manifest::{
    BenchmarkManifest, CompareManifest, GenerateManifest, ReconstructManifest, RunManifest,
};
use holobgs_cli::{execute, CliError};

#[derive(Parser)]
#[command(
    name = "holobgs",
    version,
    about = "Binary DMD holograms with GS and binarized GS"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a mirror pattern for a target image.
    Generate(GenerateArgs),
    /// Simulate the focal-plane image of a mirror pattern.
    Reconstruct(ReconstructArgs),
    /// GS vs BGS convergence on uniform squares.
    Benchmark(BenchmarkArgs),
    /// Target | GS | BGS panels for every image in a directory.
    Compare(CompareArgs),
    /// Re-run a command from its manifest.json.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Gs,
    Bgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaArg {
    OnBelowPi,
    OnAtOrAbovePi,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompSignArg {
    Add,
    Subtract,
    None,
}

/// `uniform` or `gaussian:<waist in pixels>`
fn parse_source(s: &str) -> Result<SourceProfile, String> {
    match s.split_once(':') {
        None if s == "uniform" => Ok(SourceProfile::Uniform),
        Some(("gaussian", waist)) => waist
            .parse::<f64>()
            .ok()
            .filter(|w| *w > 0.0 && w.is_finite())
            .map(|waist| SourceProfile::Gaussian { waist })
            .ok_or_else(|| format!("invalid gaussian waist {waist:?}")),
        _ => Err(format!(
            "expected 'uniform' or 'gaussian:<waist>', got {s:?}"
        )),
    }
}

/// `<dx>,<dy>`
fn parse_offset(s: &str) -> Result<[i64; 2], String> {
    let (x, y) = s.split_once(',').ok_or("expected <dx>,<dy>")?;
    let p = |v: &str| v.trim().parse::<i64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([p(x)?, p(y)?])
}

#[derive(Args)]
struct GenerateArgs {
    /// Target intensity (PGM, PNG, PBM or CSV), optical axis at the image center.
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum, default_value = "bgs")]
    algorithm: AlgorithmArg,
    #[arg(long, default_value_t = 30)]
    iters: usize,
    /// Relative change of the field that counts as converged.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    /// Always run all iterations.
    #[arg(long)]
    no_early_stop: bool,
    #[arg(long, value_enum, default_value = "on-below-pi")]
    theta: ThetaArg,
    /// Seed a uniformly random initial phase instead of zero phase.
    #[arg(long)]
    random_phase_seed: Option<u64>,
    #[arg(long, default_value = "uniform", value_parser = parse_source)]
    source: SourceProfile,
    /// Cyclic shift of the target in pixels.
    #[arg(long, default_value = "0,0", value_parser = parse_offset, allow_hyphen_values = true)]
    offset: [i64; 2],
    /// Aberration phase map (CSV radians, or grayscale with full scale = 2π).
    #[arg(long)]
    phase_map: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "subtract")]
    comp_sign: CompSignArg,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long, default_value = "uniform", value_parser = parse_source)]
    source: SourceProfile,
    #[arg(long)]
    phase_map: Option<PathBuf>,
    /// Target used to define the metric region.
    #[arg(long)]
    target: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, value_delimiter = ',', default_value = "17,33")]
    squares: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    iters: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    targets: PathBuf,
    #[arg(long, default_value_t = 6)]
    iters: usize,
    #[arg(long, default_value = "uniform", value_parser = parse_source)]
    source: SourceProfile,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn to_manifest(command: Command) -> Result<RunManifest, CliError> {
    Ok(match command {
        Command::Generate(a) => RunManifest::Generate(GenerateManifest {
            target: a.target,
            iterations: IterationConfig {
                algorithm: match a.algorithm {
                    AlgorithmArg::Gs => Algorithm::Gs,
                    AlgorithmArg::Bgs => Algorithm::Bgs,
                },
                max_iterations: a.iters,
                convergence_tolerance: a.tolerance,
                stop_on_convergence: !a.no_early_stop,
                theta_convention: match a.theta {
                    ThetaArg::OnBelowPi => ThetaConvention::OnBelowPi,
                    ThetaArg::OnAtOrAbovePi => ThetaConvention::OnAtOrAbovePi,
                },
                initial_phase: a
                    .random_phase_seed
                    .map_or(InitialPhase::Zero, |seed| InitialPhase::Random { seed }),
            },
            source: a.source,
            offset: a.offset,
            phase_map: a.phase_map,
            compensation: match a.comp_sign {
                CompSignArg::Add => Some(CompensationSign::Add),
                CompSignArg::Subtract => Some(CompensationSign::Subtract),
                CompSignArg::None => None,
            },
            output_dir: a.out_dir,
        }),
        Command::Reconstruct(a) => RunManifest::Reconstruct(ReconstructManifest {
            pattern: a.pattern,
            source: a.source,
            phase_map: a.phase_map,
            target: a.target,
            output_dir: a.out_dir,
        }),
        Command::Benchmark(a) => RunManifest::Benchmark(BenchmarkManifest {
            field_size: a.size,
            square_sizes: a.squares,
            max_iterations: a.iters,
            output_dir: a.out_dir,
        }),
        Command::Compare(a) => RunManifest::Compare(CompareManifest {
            targets_dir: a.targets,
            iterations: a.iters,
            source: a.source,
            output_dir: a.out_dir,
        }),
        Command::Replay(a) => {
            let mut m = RunManifest::load(&a.manifest)?;
            if let Some(dir) = a.out_dir {
                m.set_output_dir(dir);
            }
            m
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation failures (exit 1), not clap's 2
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match to_manifest(cli.command).and_then(execute) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.into()
        }
    }
}
