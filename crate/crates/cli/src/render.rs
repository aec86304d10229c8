//! Offline rendering: PNG frames and an SVG trail plot.
//!
//! The simulation frame is y-up; both outputs flip y so the picture matches
//! the recording as seen from above.

use std::fmt::Write as _;
use std::path::Path;

use antdyn_core::{AgentState, Point};
use tiny_skia::{Color, FillRule, Paint, PathBuilder, Pixmap, Stroke, Transform};

use crate::error::{write_file, CliError};

const WHITE: [u8; 3] = [255, 255, 255];
const ARENA: [u8; 3] = [170, 170, 170];
const AGENT: [u8; 3] = [31, 78, 216];
const AGENT_TRAIL: [u8; 3] = [140, 190, 245];
const TARGET: [u8; 3] = [214, 39, 40];
const REPLAYED: [u8; 3] = [128, 128, 128];

/// What the scene looked like after one step.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub agent: AgentState,
    pub others: Vec<Point>,
}

#[derive(Debug, Clone, Copy)]
pub struct RenderSpec {
    pub frame_stride: usize,
    pub size_px: u32,
}

/// Steps that get a frame: multiples of the stride plus the final step.
pub fn frame_steps(steps: usize, stride: usize) -> Vec<usize> {
    (0..=steps)
        .filter(|k| k % stride == 0 || *k == steps)
        .collect()
}

struct Canvas {
    pixmap: Pixmap,
    scale: f32,
}

impl Canvas {
    fn screen(&self, p: Point) -> (f32, f32) {
        let size = self.pixmap.height() as f32;
        (p.x as f32 * self.scale, size - p.y as f32 * self.scale)
    }

    fn paint(rgb: [u8; 3]) -> Paint<'static> {
        let mut paint = Paint::default();
        paint.set_color(Color::from_rgba8(rgb[0], rgb[1], rgb[2], 255));
        paint.anti_alias = true;
        paint
    }

    fn polyline(&mut self, points: &[Point], rgb: [u8; 3], width: f32) {
        if points.len() < 2 {
            return;
        }
        let mut pb = PathBuilder::new();
        let (x, y) = self.screen(points[0]);
        pb.move_to(x, y);
        for &p in &points[1..] {
            let (x, y) = self.screen(p);
            pb.line_to(x, y);
        }
        if let Some(path) = pb.finish() {
            let stroke = Stroke {
                width,
                ..Stroke::default()
            };
            self.pixmap.stroke_path(
                &path,
                &Self::paint(rgb),
                &stroke,
                Transform::identity(),
                None,
            );
        }
    }

    fn dot(&mut self, p: Point, radius: f32, rgb: [u8; 3]) {
        let (x, y) = self.screen(p);
        if let Some(path) = PathBuilder::from_circle(x, y, radius) {
            self.pixmap.fill_path(
                &path,
                &Self::paint(rgb),
                FillRule::Winding,
                Transform::identity(),
                None,
            );
        }
    }
}

/// Draws every selected frame as `frame_%05d.png` in `dir`.
pub fn write_frames(
    dir: &Path,
    spec: &RenderSpec,
    resolution_px: u32,
    snapshots: &[Snapshot],
    agent_trail: &[Point],
    target_trail: &[Point],
) -> Result<usize, CliError> {
    let steps = snapshots.len() - 1;
    let frames = frame_steps(steps, spec.frame_stride);
    let scale = spec.size_px as f32 / resolution_px as f32;
    let centre = Point::new(
        f64::from(resolution_px) / 2.0,
        f64::from(resolution_px) / 2.0,
    );
    for (n, &k) in frames.iter().enumerate() {
        let pixmap = Pixmap::new(spec.size_px, spec.size_px)
            .ok_or_else(|| CliError::Config(format!("invalid frame size {}", spec.size_px)))?;
        let mut c = Canvas { pixmap, scale };
        c.pixmap
            .fill(Color::from_rgba8(WHITE[0], WHITE[1], WHITE[2], 255));

        let (cx, cy) = c.screen(centre);
        if let Some(path) = PathBuilder::from_circle(cx, cy, centre.x as f32 * scale) {
            let stroke = Stroke {
                width: 2.0,
                ..Stroke::default()
            };
            c.pixmap.stroke_path(
                &path,
                &Canvas::paint(ARENA),
                &stroke,
                Transform::identity(),
                None,
            );
        }
        for &p in &snapshots[k].others {
            c.dot(p, 3.0, REPLAYED);
        }
        c.polyline(&target_trail[..=k], TARGET, 1.5);
        c.polyline(&agent_trail[..=k], AGENT_TRAIL, 1.5);
        c.dot(target_trail[k], 4.0, TARGET);

        let agent = snapshots[k].agent;
        let nose = Point::new(
            agent.x + 12.0 / f64::from(scale) * agent.theta.cos(),
            agent.y + 12.0 / f64::from(scale) * agent.theta.sin(),
        );
        c.polyline(&[agent.position(), nose], AGENT, 2.0);
        c.dot(agent.position(), 4.5, AGENT);

        let png = c
            .pixmap
            .encode_png()
            .map_err(|e| CliError::Config(format!("png encoding failed: {e}")))?;
        write_file(dir.join(format!("frame_{n:05}.png")), png)?;
    }
    Ok(frames.len())
}

/// SVG with exactly two polylines: the target trail, then the agent trail.
pub fn trails_svg(resolution_px: u32, agent_trail: &[Point], target_trail: &[Point]) -> String {
    let size = f64::from(resolution_px);
    let hex = |c: [u8; 3]| format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
    let points = |trail: &[Point]| {
        trail
            .iter()
            .map(|p| format!("{},{}", p.x, size - p.y))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<!-- Trail plot. Screen y = {size} - y: simulation coordinates are y-up, SVG is y-down. -->"
    );
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">"
    );
    let _ = writeln!(
        out,
        "  <rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "  <circle cx=\"{0}\" cy=\"{0}\" r=\"{0}\" fill=\"none\" stroke=\"{1}\" stroke-width=\"2\"/>",
        size / 2.0,
        hex(ARENA)
    );
    for (id, trail, color) in [
        ("target", target_trail, TARGET),
        ("agent", agent_trail, AGENT),
    ] {
        let _ = writeln!(
            out,
            "  <polyline id=\"{id}-trail\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
            hex(color),
            points(trail)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_count() {
        for (steps, stride) in [(300, 1), (300, 7), (300, 300), (300, 1000), (10, 3)] {
            assert_eq!(frame_steps(steps, stride).len(), steps.div_ceil(stride) + 1);
        }
        assert_eq!(frame_steps(10, 3), vec![0, 3, 6, 9, 10]);
    }

    #[test]
    fn svg_has_two_polylines() {
        let a = vec![Point::new(0.0, 0.0), Point::new(1.0, 2.0)];
        let t = vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)];
        let svg = trails_svg(1280, &a, &t);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("3,1276"));
    }
}
