//! Episode orchestration.
//!
//! A [`World`] is the immutable part of an environment: configuration plus a
//! recording resampled to the step length. It can be shared across threads.
//! Each [`Episode`] carries the mutable state of one trial; `World::step`
//! advances it by replaying the colony, moving the agent, scoring the step
//! and sensing.

use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{apply_action, Action, AgentState, ArenaGeometry, KinematicParams};
use crate::error::{ErrorKind, Result};
use crate::geometry::Point;
use crate::recording::{
    interpolate, resample, select_target, AntId, ColonyRecording, RecordingMeta, TargetSelection,
};
use crate::reward::{step_penalty, trail_area_step, RewardConfig, TrailPair};
use crate::sensing::{build_observation, Observation, VisionConfig};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read config {path}: {message}")]
    ConfigFile { path: String, message: String },
    #[error("contract violation: episode already truncated after {steps} steps")]
    EpisodeOver { steps: usize },
    #[error("contract violation: step called before reset")]
    NotReset,
}

impl EnvError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            EnvError::Config(_) | EnvError::ConfigFile { .. } => ErrorKind::Config,
            EnvError::EpisodeOver { .. } | EnvError::NotReset => ErrorKind::Contract,
        }
    }
}

/// Environment configuration. Every field has a default, so `{}` is a valid
/// config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub meta: RecordingMeta,
    pub kinematics: KinematicParams,
    pub vision: VisionConfig,
    pub reward: RewardConfig,
    /// Episode horizon, s.
    pub t_lim_s: f64,
    /// Minimum net displacement of a target window, px.
    pub d_min: f64,
    /// Keep the target ant in the agent's visible set.
    pub show_target: bool,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            meta: RecordingMeta::default(),
            kinematics: KinematicParams::default(),
            vision: VisionConfig::default(),
            reward: RewardConfig::default(),
            t_lim_s: 30.0,
            d_min: 128.0,
            show_target: false,
            seed: 0,
        }
    }
}

const STEP_EPS: f64 = 1e-9;

impl EnvConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        self.meta
            .validate()
            .map_err(|e| EnvError::Config(e.to_string()))?;
        self.kinematics.validate().map_err(EnvError::Config)?;
        self.vision.validate().map_err(EnvError::Config)?;
        self.reward.validate().map_err(EnvError::Config)?;
        if !(self.t_lim_s.is_finite() && self.t_lim_s > 0.0) {
            return Err(EnvError::Config(format!(
                "t_lim_s must be positive, got {}",
                self.t_lim_s
            )));
        }
        let ratio = self.t_lim_s / self.kinematics.dt;
        if ratio.round() < 1.0 || (ratio - ratio.round()).abs() > STEP_EPS * ratio.max(1.0) {
            return Err(EnvError::Config(format!(
                "t_lim_s ({}) must be a whole number of steps of dt ({})",
                self.t_lim_s, self.kinematics.dt
            )));
        }
        if !(self.d_min.is_finite() && self.d_min >= 0.0) {
            return Err(EnvError::Config(format!(
                "d_min must be non-negative, got {}",
                self.d_min
            )));
        }
        Ok(())
    }

    /// Episode length in steps.
    pub fn steps(&self) -> usize {
        (self.t_lim_s / self.kinematics.dt).round() as usize
    }

    pub fn from_json(text: &str) -> Result<Self, EnvError> {
        let config: EnvConfig =
            serde_json::from_str(text).map_err(|e| EnvError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, EnvError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| EnvError::ConfigFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }
}

/// Diagnostics attached to every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// Area swept between the trails this step, px².
    pub area_t: f64,
    pub target_x: f64,
    pub target_y: f64,
    pub dist_to_target: f64,
    /// Replayed ants held at an endpoint because the window outruns their
    /// recording.
    pub frozen_ants: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    /// Always false: trials only end by time.
    pub terminated: bool,
    pub truncated: bool,
    pub info: StepInfo,
}

/// Mutable state of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub step_index: usize,
    pub agent: AgentState,
    pub target: TargetSelection,
    /// Replayed ants the agent can see.
    pub visible: Vec<AntId>,
    pub agent_trail: Vec<Point>,
    pub target_trail: Vec<Point>,
    pub cumulative_reward: f64,
}

impl Episode {
    /// Simulation time of the current step, s.
    pub fn time(&self) -> f64 {
        self.target.trail[self.step_index].t
    }

    pub fn trails(&self) -> TrailPair {
        TrailPair {
            agent: self.agent_trail.clone(),
            target: self.target_trail.clone(),
        }
    }

    pub fn is_truncated(&self) -> bool {
        self.step_index + 1 == self.target.trail.len()
    }
}

/// Configuration plus resampled recording; shared by all episodes.
#[derive(Debug, Clone)]
pub struct World {
    config: EnvConfig,
    recording: ColonyRecording,
    arena: ArenaGeometry,
    steps: usize,
}

impl World {
    /// Validates `config` and resamples `recording` to the step length.
    ///
    /// The recording's own metadata decides the arena geometry; it replaces
    /// `config.meta`.
    pub fn new(config: EnvConfig, recording: &ColonyRecording) -> Result<Self> {
        let mut config = config;
        config.meta = *recording.meta();
        config.validate()?;
        let recording = resample(recording, config.kinematics.dt)?;
        config.meta.sample_rate_hz = recording.meta().sample_rate_hz;
        Ok(Self {
            arena: ArenaGeometry::from_meta(recording.meta()),
            steps: config.steps(),
            config,
            recording,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn recording(&self) -> &ColonyRecording {
        &self.recording
    }

    pub fn arena(&self) -> &ArenaGeometry {
        &self.arena
    }

    /// Steps per episode.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Starts a trial. The target window is drawn from a generator seeded
    /// only by `seed`.
    pub fn reset(&self, seed: u64) -> Result<(Episode, Observation)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = select_target(
            &self.recording,
            self.config.t_lim_s,
            self.config.d_min,
            &mut rng,
        )?;
        let start = target.trail[0].point();
        let first = target.trail[1].point();
        let (dx, dy) = (first.x - start.x, first.y - start.y);
        let heading = if dx == 0.0 && dy == 0.0 {
            0.0
        } else {
            dy.atan2(dx)
        };
        let agent = AgentState::at_rest(start, heading);
        let visible = self
            .recording
            .ant_ids()
            .filter(|&id| self.config.show_target || id != target.ant_id)
            .collect();

        let episode = Episode {
            step_index: 0,
            agent,
            target,
            visible,
            agent_trail: vec![start],
            target_trail: vec![start],
            cumulative_reward: 0.0,
        };
        let (others, _) = self.replayed_positions(&episode, episode.time());
        let observation = build_observation(&episode.agent, &others, &self.config);
        Ok((episode, observation))
    }

    /// Positions of the visible replayed ants at time `t`, and how many of
    /// them were held at an endpoint.
    pub fn replayed_positions(&self, episode: &Episode, t: f64) -> (Vec<Point>, usize) {
        let mut frozen = 0;
        let positions = episode
            .visible
            .iter()
            .map(|id| {
                let (p, held) = interpolate(&self.recording.ants()[id], t);
                frozen += usize::from(held);
                p
            })
            .collect();
        (positions, frozen)
    }

    /// Advances the episode by one step under `action`.
    pub fn step(&self, episode: &mut Episode, action: Action) -> Result<StepResult> {
        self.advance(episode, |agent| {
            apply_action(agent, action, &self.config.kinematics, &self.arena)
        })
    }

    /// Advances the episode with the agent placed exactly on the target
    /// trail, bypassing kinematics. Every step then has zero swept area.
    pub fn step_replay(&self, episode: &mut Episode) -> Result<StepResult> {
        let next = episode
            .target
            .trail
            .get(episode.step_index + 1)
            .map(|s| s.point());
        self.advance(episode, |agent| {
            let Some(p) = next else { return *agent };
            let (dx, dy) = (p.x - agent.x, p.y - agent.y);
            let theta = if dx == 0.0 && dy == 0.0 {
                agent.theta
            } else {
                dy.atan2(dx)
            };
            AgentState::at_rest(p, theta)
        })
    }

    /// Runs a full episode, asking `policy` for every action.
    pub fn rollout(
        &self,
        seed: u64,
        mut policy: impl FnMut(&Observation) -> Action,
    ) -> Result<Episode> {
        let (mut episode, mut obs) = self.reset(seed)?;
        while !episode.is_truncated() {
            obs = self.step(&mut episode, policy(&obs))?.observation;
        }
        Ok(episode)
    }

    fn advance(
        &self,
        episode: &mut Episode,
        motion: impl FnOnce(&AgentState) -> AgentState,
    ) -> Result<StepResult> {
        if episode.is_truncated() {
            return Err(EnvError::EpisodeOver {
                steps: episode.step_index,
            }
            .into());
        }
        let k = episode.step_index + 1;
        let target_now = episode.target.trail[k];
        let (others, frozen_ants) = self.replayed_positions(episode, target_now.t);

        episode.agent = motion(&episode.agent);
        let pa_prev = episode.agent_trail[k - 1];
        let pt_prev = episode.target_trail[k - 1];
        let pa_cur = episode.agent.position();
        let pt_cur = target_now.point();
        episode.agent_trail.push(pa_cur);
        episode.target_trail.push(pt_cur);
        episode.step_index = k;

        let area_t = trail_area_step(pa_prev, pa_cur, pt_prev, pt_cur);
        let reward = step_penalty(area_t, &self.config.reward)?;
        episode.cumulative_reward += reward;
        let observation = build_observation(&episode.agent, &others, &self.config);

        Ok(StepResult {
            observation,
            reward,
            terminated: false,
            truncated: episode.is_truncated(),
            info: StepInfo {
                area_t,
                target_x: pt_cur.x,
                target_y: pt_cur.y,
                dist_to_target: pa_cur.distance(pt_cur),
                frozen_ants,
            },
        })
    }
}

/// A stateful environment holding one current episode, as language bindings
/// expect.
#[derive(Debug, Clone)]
pub struct AntEnv {
    world: Arc<World>,
    episode: Option<Episode>,
}

impl AntEnv {
    pub fn new(world: Arc<World>) -> Self {
        Self {
            world,
            episode: None,
        }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn episode(&self) -> Option<&Episode> {
        self.episode.as_ref()
    }

    pub fn reset(&mut self, seed: u64) -> Result<Observation> {
        let (episode, obs) = self.world.reset(seed)?;
        self.episode = Some(episode);
        Ok(obs)
    }

    pub fn step(&mut self, action: Action) -> Result<StepResult> {
        let episode = self.episode.as_mut().ok_or(EnvError::NotReset)?;
        self.world.step(episode, action)
    }

    pub fn step_replay(&mut self) -> Result<StepResult> {
        let episode = self.episode.as_mut().ok_or(EnvError::NotReset)?;
        self.world.step_replay(episode)
    }
}
