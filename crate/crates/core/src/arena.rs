//! Agent kinematics inside the circular arena.
//!
//! Coordinates are pixels in a y-up mathematical frame; positive angular
//! velocity turns the agent counter-clockwise (left).

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::geometry::{wrap_angle, Point};
use crate::recording::{RecordingMeta, DISC_TOLERANCE_PX};

/// The four discrete actions, in policy-output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Forward = 0,
    Backward = 1,
    TurnLeft = 2,
    TurnRight = 3,
}

impl Action {
    pub const ALL: [Action; 4] = [
        Action::Forward,
        Action::Backward,
        Action::TurnLeft,
        Action::TurnRight,
    ];

    pub fn from_index(index: usize) -> Option<Action> {
        Self::ALL.get(index).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The same action seen in a mirror: turns swap, linear moves stay.
    pub fn mirrored(self) -> Action {
        match self {
            Action::TurnLeft => Action::TurnRight,
            Action::TurnRight => Action::TurnLeft,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KinematicParams {
    /// Step length, s.
    pub dt: f64,
    /// Speed limit, px/s.
    pub v_max: f64,
    /// Linear control acceleration, px/s².
    pub a_lin: f64,
    /// Angular speed limit, rad/s.
    pub omega_max: f64,
    /// Angular control acceleration, rad/s².
    pub a_ang: f64,
    /// Per-step velocity retention in `[0, 1]`.
    pub damping: f64,
}

impl Default for KinematicParams {
    fn default() -> Self {
        Self {
            dt: 0.1,
            v_max: 192.0,
            a_lin: 384.0,
            omega_max: PI,
            a_ang: TAU,
            damping: 0.9,
        }
    }
}

impl KinematicParams {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("dt", self.dt),
            ("v_max", self.v_max),
            ("a_lin", self.a_lin),
            ("omega_max", self.omega_max),
            ("a_ang", self.a_ang),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("kinematics.{name} must be positive, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.damping) {
            return Err(format!(
                "kinematics.damping must lie in [0, 1], got {}",
                self.damping
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArenaGeometry {
    pub center: Point,
    pub radius: f64,
}

impl ArenaGeometry {
    pub fn from_meta(meta: &RecordingMeta) -> Self {
        Self {
            center: meta.center(),
            radius: meta.radius(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.center.distance(p) <= self.radius + DISC_TOLERANCE_PX
    }

    /// Radial projection of `p` onto the disc; `None` if already inside.
    pub fn project(&self, p: Point) -> Option<Point> {
        let (dx, dy) = (p.x - self.center.x, p.y - self.center.y);
        let d = dx.hypot(dy);
        if d <= self.radius {
            return None;
        }
        let k = self.radius / d;
        Some(Point::new(self.center.x + dx * k, self.center.y + dy * k))
    }
}

/// Pose and velocities of the controllable ant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AgentState {
    pub x: f64,
    pub y: f64,
    /// Signed speed along the heading, px/s.
    pub s: f64,
    /// Heading in `(-π, π]`.
    pub theta: f64,
    /// Angular velocity, rad/s.
    pub theta_dot: f64,
}

impl AgentState {
    pub fn at_rest(position: Point, theta: f64) -> Self {
        Self {
            x: position.x,
            y: position.y,
            s: 0.0,
            theta: wrap_angle(theta),
            theta_dot: 0.0,
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn is_valid(&self, params: &KinematicParams, arena: &ArenaGeometry) -> bool {
        arena.contains(self.position())
            && self.s.abs() <= params.v_max
            && self.theta_dot.abs() <= params.omega_max
            && self.theta > -PI
            && self.theta <= PI
    }
}

/// Advances the agent by one step under `action`.
///
/// Exactly one control channel is active per step. Velocities decay by
/// `damping`, take the control impulse, and are clamped; the heading is
/// integrated before the position. Leaving the disc projects the agent back
/// onto the boundary and zeroes its speed.
pub fn apply_action(
    state: &AgentState,
    action: Action,
    params: &KinematicParams,
    arena: &ArenaGeometry,
) -> AgentState {
    let (lin, ang) = match action {
        Action::Forward => (params.a_lin, 0.0),
        Action::Backward => (-params.a_lin, 0.0),
        Action::TurnLeft => (0.0, params.a_ang),
        Action::TurnRight => (0.0, -params.a_ang),
    };
    let dt = params.dt;
    let s = (params.damping * state.s + lin * dt).clamp(-params.v_max, params.v_max);
    let theta_dot =
        (params.damping * state.theta_dot + ang * dt).clamp(-params.omega_max, params.omega_max);
    let theta = wrap_angle(state.theta + theta_dot * dt);
    let step = s * dt;
    let moved = Point::new(state.x + step * theta.cos(), state.y + step * theta.sin());

    match arena.project(moved) {
        Some(p) => AgentState {
            x: p.x,
            y: p.y,
            s: 0.0,
            theta,
            theta_dot,
        },
        None => AgentState {
            x: moved.x,
            y: moved.y,
            s,
            theta,
            theta_dot,
        },
    }
}

/// Converts millimetres to pixels at the recording's scale.
pub fn px_of_mm(value_mm: f64, meta: &RecordingMeta) -> f64 {
    value_mm * f64::from(meta.resolution_px) / meta.arena_diameter_mm
}
