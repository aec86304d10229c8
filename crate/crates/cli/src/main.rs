//! `antdyn`: data synthesis, simulation, evolution and rendering.

mod commands;
mod error;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use antdyn_core::evolution::SeedSchedule;
use antdyn_core::recording::SyntheticParams;
use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::{PolicySpec, SimulateArgs};
use error::{CliError, EXIT_CONFIG};
use render::RenderSpec;

#[derive(Debug, Parser)]
#[command(
    name = "antdyn",
    version,
    about = "Ant-trail replication environment tooling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic colony recording bundle (<stem>.csv + <stem>.meta.json).
    GenSynth(GenSynthArgs),
    /// Load a recording bundle and report problems.
    Validate {
        #[arg(long)]
        data: PathBuf,
    },
    /// Run one episode and print its summary.
    Simulate(SimulateCmd),
    /// Evolve a policy network.
    Evolve(EvolveCmd),
    /// Run the replay oracle and check its reward.
    ReplayCheck(EpisodeArgs),
    /// Run one episode and write its frames and trail plot.
    Render(RenderCmd),
}

#[derive(Debug, Args)]
struct GenSynthArgs {
    #[arg(long, default_value_t = 20)]
    ants: usize,
    #[arg(long, default_value_t = 60.0)]
    seconds: f64,
    /// Sample rate, Hz.
    #[arg(long, default_value_t = 10.0)]
    rate: f64,
    /// Per-step positional noise, px.
    #[arg(long, default_value_t = 2.0)]
    noise: f64,
    /// Attraction toward the colony centroid in [0, 1].
    #[arg(long, default_value_t = 0.3)]
    pull: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output bundle stem.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EpisodeArgs {
    /// Recording bundle (stem or .csv path).
    #[arg(long)]
    data: PathBuf,
    /// Environment config JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Episode seed; defaults to the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the run summary JSON here as well as to stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FrameArgs {
    /// Steps per emitted frame.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    frame_stride: u64,
    /// Frame width and height, px.
    #[arg(long, default_value_t = 640, value_parser = clap::value_parser!(u32).range(16..=8192))]
    frame_size: u32,
}

impl FrameArgs {
    fn spec(&self) -> RenderSpec {
        RenderSpec {
            frame_stride: self.frame_stride as usize,
            size_px: self.frame_size,
        }
    }
}

#[derive(Debug, Args)]
struct SimulateCmd {
    #[command(flatten)]
    episode: EpisodeArgs,
    /// random, replay or genome:<path>.
    #[arg(long, default_value = "random")]
    policy: PolicySpec,
    /// Directory for PNG frames and trails.svg.
    #[arg(long)]
    render: Option<PathBuf>,
    #[command(flatten)]
    frames: FrameArgs,
}

#[derive(Debug, Args)]
struct RenderCmd {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "random")]
    policy: PolicySpec,
    #[command(flatten)]
    frames: FrameArgs,
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvolveCmd {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evolution config JSON; flags below override it.
    #[arg(long)]
    evo_config: Option<PathBuf>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Score every generation on the same episode seeds.
    #[arg(long)]
    fixed_seeds: bool,
    /// Evaluate on one thread.
    #[arg(long)]
    serial: bool,
    /// Output directory for best_genome.json and history.csv.
    #[arg(short, long)]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenSynth(a) => {
            let params = SyntheticParams {
                n_ants: a.ants,
                duration_s: a.seconds,
                sample_rate_hz: a.rate,
                noise_px: a.noise,
                cluster_pull: a.pull,
                ..SyntheticParams::default()
            };
            commands::gen_synth(&params, a.seed, &a.out)
        }
        Command::Validate { data } => commands::validate(&data),
        Command::Simulate(s) => {
            let args = SimulateArgs {
                data: &s.episode.data,
                config: s.episode.config.as_deref(),
                seed: s.episode.seed,
                policy: s.policy,
                render: s.render.as_deref(),
                spec: s.frames.spec(),
                out: s.episode.out.as_deref(),
            };
            let (summary, mode, _) = commands::simulate(&args)?;
            if args.policy == PolicySpec::Replay {
                commands::check_replay(&summary, mode)?;
            }
            Ok(())
        }
        Command::ReplayCheck(e) => {
            let args = SimulateArgs {
                data: &e.data,
                config: e.config.as_deref(),
                seed: e.seed,
                policy: PolicySpec::Replay,
                render: None,
                spec: RenderSpec {
                    frame_stride: 1,
                    size_px: 640,
                },
                out: e.out.as_deref(),
            };
            let (summary, mode, _) = commands::simulate(&args)?;
            commands::check_replay(&summary, mode)
        }
        Command::Render(r) => {
            let args = SimulateArgs {
                data: &r.data,
                config: r.config.as_deref(),
                seed: r.seed,
                policy: r.policy,
                render: Some(&r.out),
                spec: r.frames.spec(),
                out: None,
            };
            let (_, _, frames) = commands::simulate(&args)?;
            eprintln!(
                "wrote {frames} frames and trails.svg to {}",
                r.out.display()
            );
            Ok(())
        }
        Command::Evolve(e) => {
            let mut evolution = commands::load_evolution_config(e.evo_config.as_deref())?;
            if let Some(n) = e.population {
                evolution.population_size = n;
            }
            if let Some(n) = e.generations {
                evolution.generations = n;
            }
            if let Some(n) = e.episodes {
                evolution.episodes_per_eval = n;
            }
            if let Some(s) = e.seed {
                evolution.seed = s;
            }
            if e.fixed_seeds {
                evolution.seed_schedule = SeedSchedule::Fixed;
            }
            if e.serial {
                evolution.parallel = false;
            }
            commands::run_evolution(&commands::EvolveArgs {
                data: &e.data,
                config: e.config.as_deref(),
                evolution,
                out: &e.out,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG as u8),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
