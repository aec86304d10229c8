//! Trail-deviation reward.
//!
//! Each step contributes the area `A` of the quadrilateral spanned by the
//! previous and current points of the agent and target trails, squashed to
//! a penalty in `[-1, 0]` through `u / sqrt(1 + u^2)` with `u = kappa * A`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{cross, Point};

#[derive(Debug, Error, PartialEq)]
pub enum RewardError {
    #[error("contract violation: area must be a non-negative finite number, got {0}")]
    InvalidArea(f64),
    #[error("agent trail has {agent} points but target trail has {target}")]
    LengthMismatch { agent: usize, target: usize },
    #[error("trails must contain at least one point")]
    EmptyTrail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardMode {
    /// `-u / sqrt(1 + u^2)`: zero at perfect alignment, tending to -1.
    #[default]
    Monotone,
    /// `-(1 - u / sqrt(1 + u^2))`: -1 at perfect alignment, tending to 0.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    #[serde(rename = "reward_mode")]
    pub mode: RewardMode,
    /// Area scale, 1/px².
    pub kappa: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            mode: RewardMode::Monotone,
            kappa: 0.01,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(format!("reward.kappa must be positive, got {}", self.kappa));
        }
        Ok(())
    }
}

/// Area swept between two trail segments.
///
/// The quadrilateral `pa_prev → pa_cur → pt_cur → pt_prev` is split along
/// each of its two diagonals; each split sums the absolute areas of its two
/// triangles and the smaller sum is returned. For a simple quadrilateral this
/// is its exact area whether convex or not, and for a crossed one it never
/// cancels to zero.
pub fn trail_area_step(pa_prev: Point, pa_cur: Point, pt_prev: Point, pt_cur: Point) -> f64 {
    let (a, b, c, d) = (pa_prev, pa_cur, pt_cur, pt_prev);
    let split_ac = cross(a, b, c).abs() + cross(a, c, d).abs();
    let split_bd = cross(a, b, d).abs() + cross(b, c, d).abs();
    0.5 * split_ac.min(split_bd)
}

/// Per-step reward for a swept area, in `[-1, 0]`.
pub fn step_penalty(area: f64, config: &RewardConfig) -> Result<f64, RewardError> {
    if !(area.is_finite() && area >= 0.0) {
        return Err(RewardError::InvalidArea(area));
    }
    let u = config.kappa * area;
    // hypot keeps the ratio finite for huge u
    let squashed = u / 1f64.hypot(u);
    Ok(match config.mode {
        RewardMode::Monotone => -squashed,
        RewardMode::Literal => -(1.0 - squashed),
    })
}

/// Agent and target trails sampled at the same steps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrailPair {
    pub agent: Vec<Point>,
    pub target: Vec<Point>,
}

impl TrailPair {
    pub fn new(agent: Vec<Point>, target: Vec<Point>) -> Result<Self, RewardError> {
        if agent.len() != target.len() {
            return Err(RewardError::LengthMismatch {
                agent: agent.len(),
                target: target.len(),
            });
        }
        if agent.is_empty() {
            return Err(RewardError::EmptyTrail);
        }
        Ok(Self { agent, target })
    }

    /// Number of steps, one fewer than the number of points.
    pub fn steps(&self) -> usize {
        self.agent.len().saturating_sub(1)
    }

    pub fn step_area(&self, t: usize) -> f64 {
        trail_area_step(
            self.agent[t - 1],
            self.agent[t],
            self.target[t - 1],
            self.target[t],
        )
    }
}

/// Sum of step penalties for `t = 1..=T`; lies in `[-T, 0]`.
pub fn episode_reward(trails: &TrailPair, config: &RewardConfig) -> Result<f64, RewardError> {
    if trails.agent.len() != trails.target.len() {
        return Err(RewardError::LengthMismatch {
            agent: trails.agent.len(),
            target: trails.target.len(),
        });
    }
    (1..=trails.steps()).try_fold(0.0, |acc, t| {
        Ok(acc + step_penalty(trails.step_area(t), config)?)
    })
}
