use std::path::{Path, PathBuf};
use std::str::FromStr;

use antdyn_core::evolution::{history_csv, Network};
use antdyn_core::recording::{
    bundle_paths, gen_synthetic, load_recording, write_recording, SyntheticParams,
};
use antdyn_core::{evolve, Action, EnvConfig, Episode, EvolutionConfig, Genome, RewardMode, World};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{write_file, CliError};
use crate::render::{trails_svg, write_frames, RenderSpec, Snapshot};

/// Action source for `simulate`.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Random,
    Replay,
    Genome(PathBuf),
}

impl FromStr for PolicySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(PolicySpec::Random),
            "replay" => Ok(PolicySpec::Replay),
            _ => match s.strip_prefix("genome:") {
                Some(path) if !path.is_empty() => Ok(PolicySpec::Genome(path.into())),
                _ => Err(format!(
                    "expected random, replay or genome:<path>, got {s:?}"
                )),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub episode_reward: f64,
    pub steps: usize,
    pub target_ant_id: u64,
    pub start_time: f64,
}

pub fn load_env_config(path: Option<&Path>) -> Result<EnvConfig, CliError> {
    match path {
        Some(p) => Ok(EnvConfig::from_path(p).map_err(antdyn_core::Error::from)?),
        None => Ok(EnvConfig::default()),
    }
}

pub fn gen_synth(params: &SyntheticParams, seed: u64, out: &Path) -> Result<(), CliError> {
    let rec = gen_synthetic(params, &mut ChaCha8Rng::seed_from_u64(seed))
        .map_err(antdyn_core::Error::from)?;
    write_recording(&rec, out).map_err(antdyn_core::Error::from)?;
    let (csv, meta) = bundle_paths(out);
    println!(
        "wrote {} and {} ({} ants, {} samples)",
        csv.display(),
        meta.display(),
        rec.n_ants(),
        rec.n_samples()
    );
    Ok(())
}

pub fn validate(data: &Path) -> Result<(), CliError> {
    let rec = load_recording(data).map_err(antdyn_core::Error::from)?;
    let (t0, t1) = rec
        .ants()
        .values()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s[0].t), hi.max(s[s.len() - 1].t))
        });
    println!(
        "ok: {} ants, {} samples, {t0} s to {t1} s, {} mm / {} px at {} Hz",
        rec.n_ants(),
        rec.n_samples(),
        rec.meta().arena_diameter_mm,
        rec.meta().resolution_px,
        rec.meta().sample_rate_hz
    );
    Ok(())
}

pub struct SimulateArgs<'a> {
    pub data: &'a Path,
    pub config: Option<&'a Path>,
    pub seed: Option<u64>,
    pub policy: PolicySpec,
    pub render: Option<&'a Path>,
    pub spec: RenderSpec,
    pub out: Option<&'a Path>,
}

enum Policy {
    Random(Box<ChaCha8Rng>),
    Replay,
    Network(Box<Network>),
}

/// Runs one episode and optionally renders it. Returns the summary and the
/// reward mode in effect.
pub fn simulate(args: &SimulateArgs) -> Result<(RunSummary, RewardMode, usize), CliError> {
    let config = load_env_config(args.config)?;
    let seed = args.seed.unwrap_or(config.seed);
    let rec = load_recording(args.data).map_err(antdyn_core::Error::from)?;
    let world = World::new(config, &rec)?;

    let mut policy = match &args.policy {
        PolicySpec::Random => {
            // a separate stream keeps action draws apart from target selection
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            Policy::Random(Box::new(rng))
        }
        PolicySpec::Replay => Policy::Replay,
        PolicySpec::Genome(path) => {
            let genome = Genome::load(path).map_err(antdyn_core::Error::from)?;
            Policy::Network(Box::new(Network::compile(&genome)))
        }
    };

    let (mut ep, mut obs) = world.reset(seed)?;
    let record = args.render.is_some();
    let mut snapshots = Vec::new();
    let snapshot = |ep: &Episode| Snapshot {
        agent: ep.agent,
        others: world.replayed_positions(ep, ep.time()).0,
    };
    if record {
        snapshots.push(snapshot(&ep));
    }
    while !ep.is_truncated() {
        let result = match &mut policy {
            Policy::Random(rng) => world.step(
                &mut ep,
                Action::from_index(rng.gen_range(0..4)).expect("index below 4"),
            )?,
            Policy::Replay => world.step_replay(&mut ep)?,
            Policy::Network(net) => world.step(&mut ep, net.act(&obs))?,
        };
        obs = result.observation;
        if record {
            snapshots.push(snapshot(&ep));
        }
    }

    let summary = RunSummary {
        episode_reward: ep.cumulative_reward,
        steps: ep.step_index,
        target_ant_id: ep.target.ant_id,
        start_time: ep.target.start_time,
    };
    let mut frames = 0;
    if let Some(dir) = args.render {
        let res = world.config().meta.resolution_px;
        frames = write_frames(
            dir,
            &args.spec,
            res,
            &snapshots,
            &ep.agent_trail,
            &ep.target_trail,
        )?;
        write_file(
            dir.join("trails.svg"),
            trails_svg(res, &ep.agent_trail, &ep.target_trail),
        )?;
    }
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    if let Some(out) = args.out {
        write_file(out, &json)?;
    }
    print!("{json}");
    Ok((summary, world.config().reward.mode, frames))
}

/// Replay oracle: zero total in monotone mode, exactly `-T` in literal mode.
pub fn check_replay(summary: &RunSummary, mode: RewardMode) -> Result<(), CliError> {
    let expected = match mode {
        RewardMode::Monotone => 0.0,
        RewardMode::Literal => -(summary.steps as f64),
    };
    let err = (summary.episode_reward - expected).abs();
    if err > 1e-9 {
        return Err(CliError::Check(format!(
            "replay reward {} differs from {expected} by {err}",
            summary.episode_reward
        )));
    }
    eprintln!(
        "replay oracle ok: reward {} (expected {expected})",
        summary.episode_reward
    );
    Ok(())
}

pub struct EvolveArgs<'a> {
    pub data: &'a Path,
    pub config: Option<&'a Path>,
    pub evolution: EvolutionConfig,
    pub out: &'a Path,
}

pub fn run_evolution(args: &EvolveArgs) -> Result<(), CliError> {
    let env = load_env_config(args.config)?;
    let rec = load_recording(args.data).map_err(antdyn_core::Error::from)?;
    let outcome = evolve(&args.evolution, &env, &rec)?;
    let genome_path = args.out.join("best_genome.json");
    std::fs::create_dir_all(args.out).map_err(|source| CliError::Output {
        path: args.out.into(),
        source,
    })?;
    outcome
        .best
        .save(&genome_path)
        .map_err(antdyn_core::Error::from)?;
    write_file(args.out.join("history.csv"), history_csv(&outcome.history))?;
    for s in &outcome.history {
        eprintln!(
            "generation {:>3}: best {:.4} mean {:.4} worst {:.4}",
            s.generation, s.best, s.mean, s.worst
        );
    }
    println!(
        "best fitness {} -> {}",
        outcome.best_fitness,
        genome_path.display()
    );
    Ok(())
}

pub fn load_evolution_config(path: Option<&Path>) -> Result<EvolutionConfig, CliError> {
    let Some(path) = path else {
        return Ok(EvolutionConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!(
            "cannot read evolution config {}: {e}",
            path.display()
        ))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid evolution config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_parsing() {
        assert_eq!("random".parse::<PolicySpec>(), Ok(PolicySpec::Random));
        assert_eq!("replay".parse::<PolicySpec>(), Ok(PolicySpec::Replay));
        assert_eq!(
            "genome:a/b.json".parse::<PolicySpec>(),
            Ok(PolicySpec::Genome("a/b.json".into()))
        );
        assert!("genome:".parse::<PolicySpec>().is_err());
        assert!("greedy".parse::<PolicySpec>().is_err());
    }
}
