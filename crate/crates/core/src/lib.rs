//! Deterministic ant-trail replication environment.
//!
//! A colony recording is replayed inside a circular arena while one
//! controllable agent tries to retrace the trail of a chosen target ant.
//! The agent observes its own pose and eight segments of vision, acts with
//! four discrete actions, and is scored per step by the area of the
//! quadrilateral swept between its trail and the target trail.
//!
//! Modules:
//!
//! - [`recording`]: colony trajectory bundles (load, write, resample, synthesize, target selection)
//! - [`arena`]: agent kinematics and arena geometry
//! - [`sensing`]: segmented vision and the 13-input observation
//! - [`reward`]: trail-area deviation and per-step/episode reward
//! - [`env`]: episode orchestration (reset/step)
//! - [`evolution`]: feed-forward DAG genomes and a generational loop
//! - [`ffi`]: C-compatible boundary used by language bindings

pub mod arena;
pub mod env;
pub mod error;
pub mod evolution;
pub mod ffi;
pub mod geometry;
pub mod recording;
pub mod reward;
pub mod sensing;

pub use arena::{apply_action, px_of_mm, Action, AgentState, ArenaGeometry, KinematicParams};
pub use env::{EnvConfig, Episode, StepInfo, StepResult, World};
pub use error::{Error, ErrorKind, Result};
pub use evolution::{evolve, forward_pass, mutate, EvolutionConfig, Genome};
pub use geometry::Point;
pub use recording::{ColonyRecording, RecordingMeta, Sample, TargetSelection};
pub use reward::{RewardConfig, RewardMode};
pub use sensing::{Observation, Segment, VisionConfig};
