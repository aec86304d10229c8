//! Segmented vision and observation assembly.
//!
//! The agent's surroundings are cut into eight angular sectors: five across
//! the forward field and three behind. Each channel reports how many ants sit
//! inside the vision radius within that sector, saturating at `n_norm`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::arena::AgentState;
use crate::env::EnvConfig;
use crate::geometry::{wrap_angle, Point};

pub const N_SEGMENTS: usize = 8;
pub const OBS_LEN: usize = 13;

/// Observation component names, in vector order.
pub const OBS_NAMES: [&str; OBS_LEN] = [
    "x",
    "y",
    "s",
    "theta",
    "theta_dot",
    "V_fl1",
    "V_fl2",
    "V_fc",
    "V_fr2",
    "V_fr1",
    "V_r",
    "V_b",
    "V_l",
];

/// Vision sectors in observation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    /// Outer front-left.
    Fl1 = 0,
    /// Inner front-left.
    Fl2 = 1,
    /// Dead ahead.
    Fc = 2,
    Fr2 = 3,
    Fr1 = 4,
    /// Rear right.
    R = 5,
    /// Dead astern.
    B = 6,
    /// Rear left.
    L = 7,
}

impl Segment {
    pub const ALL: [Segment; N_SEGMENTS] = [
        Segment::Fl1,
        Segment::Fl2,
        Segment::Fc,
        Segment::Fr2,
        Segment::Fr1,
        Segment::R,
        Segment::B,
        Segment::L,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Counterpart under reflection across the heading axis.
    pub fn mirrored(self) -> Segment {
        match self {
            Segment::Fl1 => Segment::Fr1,
            Segment::Fl2 => Segment::Fr2,
            Segment::Fr2 => Segment::Fl2,
            Segment::Fr1 => Segment::Fl1,
            Segment::R => Segment::L,
            Segment::L => Segment::R,
            s @ (Segment::Fc | Segment::B) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VisionConfig {
    /// Vision range, px. Ants exactly at this distance are seen.
    pub radius: f64,
    /// Count at which a channel saturates to 1.
    pub n_norm: u32,
    /// Total angle covered by the five forward sectors, rad.
    pub forward_span: f64,
    /// Scale pose inputs into `[0, 1]` / `[-1, 1]`; raw units when false.
    pub normalize_pose: bool,
}

impl Default for VisionConfig {
    fn default() -> Self {
        Self {
            radius: 100.0,
            n_norm: 5,
            forward_span: PI,
            normalize_pose: true,
        }
    }
}

impl VisionConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(format!(
                "vision.radius must be positive, got {}",
                self.radius
            ));
        }
        if self.n_norm < 1 {
            return Err("vision.n_norm must be at least 1".into());
        }
        if !(self.forward_span > 0.0 && self.forward_span < TAU) {
            return Err(format!(
                "vision.forward_span must lie in (0, 2π), got {}",
                self.forward_span
            ));
        }
        Ok(())
    }

    /// Lower edges of the forward sectors fr1, fr2, fc, fl2, fl1 followed by
    /// the forward/rear seam and the two rear seams (l|b and b|r).
    pub fn sector_edges(&self) -> SectorEdges {
        let half = self.forward_span / 2.0;
        let fwd = self.forward_span / 5.0;
        let rear = (TAU - self.forward_span) / 3.0;
        SectorEdges {
            forward: [
                -half,
                -half + fwd,
                -half + 2.0 * fwd,
                -half + 3.0 * fwd,
                -half + 4.0 * fwd,
            ],
            half,
            left_back: half + rear,
            right_back: -half - rear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorEdges {
    pub forward: [f64; 5],
    pub half: f64,
    pub left_back: f64,
    pub right_back: f64,
}

/// Sector containing a bearing measured counter-clockwise from the heading.
///
/// Forward sectors are closed on their clockwise edge; `b` owns both `π` and
/// everything past the rear seams.
pub fn segment_index(bearing: f64, vision: &VisionConfig) -> Segment {
    let e = vision.sector_edges();
    let phi = wrap_angle(bearing);
    if phi >= e.half {
        if phi < e.left_back {
            Segment::L
        } else {
            Segment::B
        }
    } else if phi < -e.half {
        if phi >= e.right_back {
            Segment::R
        } else {
            Segment::B
        }
    } else if phi >= e.forward[4] {
        Segment::Fl1
    } else if phi >= e.forward[3] {
        Segment::Fl2
    } else if phi >= e.forward[2] {
        Segment::Fc
    } else if phi >= e.forward[1] {
        Segment::Fr2
    } else {
        Segment::Fr1
    }
}

/// Bearing of `other` relative to the agent's heading; `0` when coincident.
pub fn relative_bearing(agent: &AgentState, other: Point) -> f64 {
    let (dx, dy) = (other.x - agent.x, other.y - agent.y);
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    wrap_angle(dy.atan2(dx) - agent.theta)
}

/// Raw per-sector counts of ants within the vision radius.
pub fn segment_counts(
    agent: &AgentState,
    others: &[Point],
    vision: &VisionConfig,
) -> [u32; N_SEGMENTS] {
    let mut counts = [0u32; N_SEGMENTS];
    let here = agent.position();
    for &p in others {
        if here.distance(p) <= vision.radius {
            counts[segment_index(relative_bearing(agent, p), vision).index()] += 1;
        }
    }
    counts
}

/// The eight vision channels, each `min(count / n_norm, 1)`.
pub fn sense_segments(
    agent: &AgentState,
    others: &[Point],
    vision: &VisionConfig,
) -> [f64; N_SEGMENTS] {
    let n = f64::from(vision.n_norm);
    segment_counts(agent, others, vision).map(|c| (f64::from(c) / n).min(1.0))
}

/// The 13-input observation:
/// `[x, y, s, theta, theta_dot, V_fl1, V_fl2, V_fc, V_fr2, V_fr1, V_r, V_b, V_l]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation(pub [f64; OBS_LEN]);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn pose(&self) -> &[f64] {
        &self.0[..5]
    }

    pub fn vision(&self) -> &[f64] {
        &self.0[5..]
    }

    /// Checks the documented ranges of a normalized observation.
    pub fn within_bounds(&self) -> bool {
        let v = &self.0;
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        let signed = |x: f64| (-1.0..=1.0).contains(&x);
        unit(v[0])
            && unit(v[1])
            && signed(v[2])
            && signed(v[3])
            && signed(v[4])
            && v[5..].iter().all(|&c| unit(c))
    }
}

impl std::ops::Index<usize> for Observation {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub fn build_observation(agent: &AgentState, others: &[Point], config: &EnvConfig) -> Observation {
    let mut v = [0.0; OBS_LEN];
    let pose = [agent.x, agent.y, agent.s, agent.theta, agent.theta_dot];
    if config.vision.normalize_pose {
        let res = f64::from(config.meta.resolution_px);
        let scale = [
            res,
            res,
            config.kinematics.v_max,
            PI,
            config.kinematics.omega_max,
        ];
        for i in 0..5 {
            v[i] = pose[i] / scale[i];
        }
    } else {
        v[..5].copy_from_slice(&pose);
    }
    v[5..].copy_from_slice(&sense_segments(agent, others, &config.vision));
    Observation(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn cardinal_bearings() {
        let v = VisionConfig::default();
        assert_eq!(segment_index(0.0, &v), Segment::Fc);
        assert_eq!(segment_index(PI, &v), Segment::B);
        assert_eq!(segment_index(-PI, &v), Segment::B);
        assert_eq!(segment_index(deg(70.0), &v), Segment::Fl1);
        assert_eq!(segment_index(deg(30.0), &v), Segment::Fl2);
        assert_eq!(segment_index(deg(-30.0), &v), Segment::Fr2);
        assert_eq!(segment_index(deg(-70.0), &v), Segment::Fr1);
        assert_eq!(segment_index(deg(120.0), &v), Segment::L);
        assert_eq!(segment_index(deg(-120.0), &v), Segment::R);
        assert_eq!(segment_index(deg(165.0), &v), Segment::B);
        assert_eq!(segment_index(deg(-165.0), &v), Segment::B);
    }

    #[test]
    fn edges_belong_to_the_counter_clockwise_sector() {
        let v = VisionConfig::default();
        let e = v.sector_edges();
        assert_eq!(segment_index(e.forward[0], &v), Segment::Fr1);
        assert_eq!(segment_index(e.forward[1], &v), Segment::Fr2);
        assert_eq!(segment_index(e.forward[2], &v), Segment::Fc);
        assert_eq!(segment_index(e.forward[3], &v), Segment::Fl2);
        assert_eq!(segment_index(e.forward[4], &v), Segment::Fl1);
        assert_eq!(segment_index(e.half, &v), Segment::L);
        assert_eq!(segment_index(e.left_back, &v), Segment::B);
        assert_eq!(segment_index(e.right_back, &v), Segment::R);
        assert!((e.forward[3] - deg(18.0)).abs() < 1e-12);
        assert!((e.left_back - deg(150.0)).abs() < 1e-12);
    }

    #[test]
    fn empty_scene_is_dark() {
        let v = VisionConfig::default();
        let agent = AgentState::at_rest(Point::new(640.0, 640.0), 0.0);
        assert_eq!(sense_segments(&agent, &[], &v), [0.0; 8]);
        let far = [Point::new(900.0, 640.0)];
        assert_eq!(sense_segments(&agent, &far, &v), [0.0; 8]);
    }

    #[test]
    fn single_ant_dead_ahead() {
        let v = VisionConfig::default();
        let agent = AgentState::at_rest(Point::new(640.0, 640.0), 0.0);
        let ch = sense_segments(&agent, &[Point::new(690.0, 640.0)], &v);
        let mut want = [0.0; 8];
        want[Segment::Fc.index()] = 0.2;
        assert_eq!(ch, want);
    }

    #[test]
    fn radius_is_inclusive_and_coincident_is_ahead() {
        let v = VisionConfig::default();
        let agent = AgentState::at_rest(Point::new(640.0, 640.0), 1.0);
        let c = segment_counts(
            &agent,
            &[Point::new(640.0, 740.0), Point::new(640.0, 640.0)],
            &v,
        );
        assert_eq!(c.iter().sum::<u32>(), 2);
        assert_eq!(c[Segment::Fc.index()], 1);
    }

    #[test]
    fn channels_saturate() {
        let v = VisionConfig::default();
        let agent = AgentState::at_rest(Point::new(640.0, 640.0), 0.0);
        let crowd = vec![Point::new(650.0, 640.0); 9];
        assert_eq!(sense_segments(&agent, &crowd, &v)[Segment::Fc.index()], 1.0);
    }

    #[test]
    fn rotated_frame() {
        let v = VisionConfig::default();
        // facing +y, an ant at +x is on the right
        let agent = AgentState::at_rest(Point::new(640.0, 640.0), PI / 2.0);
        let c = segment_counts(&agent, &[Point::new(700.0, 640.0)], &v);
        assert_eq!(c[Segment::Fr1.index()], 1);
    }

    #[test]
    fn centred_rest_observation() {
        let config = EnvConfig::default();
        let agent = AgentState::at_rest(Point::new(640.0, 640.0), 0.5);
        let obs = build_observation(&agent, &[], &config);
        let mut want = [0.0; OBS_LEN];
        want[0] = 0.5;
        want[1] = 0.5;
        want[3] = 0.5 / PI;
        assert_eq!(obs.0, want);
        assert!(obs.within_bounds());
    }

    #[test]
    fn raw_pose_mode() {
        let mut config = EnvConfig::default();
        config.vision.normalize_pose = false;
        let agent = AgentState {
            x: 600.0,
            y: 700.0,
            s: 12.0,
            theta: 1.0,
            theta_dot: -0.5,
        };
        let obs = build_observation(&agent, &[], &config);
        assert_eq!(obs.pose(), &[600.0, 700.0, 12.0, 1.0, -0.5]);
    }

    #[test]
    fn config_validation() {
        assert!(VisionConfig::default().validate().is_ok());
        assert!(VisionConfig {
            radius: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(VisionConfig {
            n_norm: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(VisionConfig {
            forward_span: TAU,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
