//! Colony recordings: the replayed world.
//!
//! A recording bundle is two files sharing a stem: `<name>.csv` with header
//! `ant_id,t_sec,x_px,y_px` and `<name>.meta.json` holding
//! [`RecordingMeta`]. Positions are pixels in a square frame of
//! `resolution_px`; the arena is the inscribed disc.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ErrorKind;
use crate::geometry::Point;

pub const CSV_HEADER: [&str; 4] = ["ant_id", "t_sec", "x_px", "y_px"];

/// Slack allowed on the disc test, absorbing interpolation round-off.
pub const DISC_TOLERANCE_PX: f64 = 1e-9;
/// Two timestamps closer than this are the same instant.
pub const TIME_EPS: f64 = 1e-9;
/// Tolerance when matching a window end to a sample time.
const WINDOW_EPS: f64 = 1e-6;

pub type AntId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl Sample {
    pub const fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Where a bad sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line in a CSV file (the header is line 1).
    Line(u64),
    /// 0-based index into an in-memory series.
    Index(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(l) => write!(f, "line {l}"),
            Location::Index(i) => write!(f, "sample {i}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum RecordingError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: invalid metadata: {message}")]
    Meta { path: PathBuf, message: String },
    #[error("invalid recording metadata: {0}")]
    InvalidMeta(String),
    #[error("recording contains no ants")]
    Empty,
    #[error("ant {ant_id}: only {len} sample(s), at least 2 required")]
    TooFewSamples { ant_id: AntId, len: usize },
    #[error("ant {ant_id}, {at}: non-finite value")]
    NonFinite { ant_id: AntId, at: Location },
    #[error("ant {ant_id}, {at}: timestamp {t} does not follow previous timestamp {prev}")]
    NonMonotone {
        ant_id: AntId,
        at: Location,
        prev: f64,
        t: f64,
    },
    #[error("ant {ant_id}, {at}: position ({x}, {y}) lies outside the arena disc")]
    OutOfArena {
        ant_id: AntId,
        at: Location,
        x: f64,
        y: f64,
    },
    #[error("resampling interval must be positive, got {0}")]
    InvalidDt(f64),
    #[error("invalid target window: {0}")]
    InvalidWindow(String),
    #[error("no ant moved at least {d_min} px in any window (largest displacement found: {max_displacement} px)")]
    NoCandidate { d_min: f64, max_displacement: f64 },
    #[error("invalid synthetic parameters: {0}")]
    InvalidParams(String),
}

impl RecordingError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            RecordingError::InvalidDt(_)
            | RecordingError::InvalidWindow(_)
            | RecordingError::InvalidParams(_) => ErrorKind::Config,
            _ => ErrorKind::Data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub arena_diameter_mm: f64,
    pub resolution_px: u32,
    pub sample_rate_hz: f64,
}

impl Default for RecordingMeta {
    fn default() -> Self {
        Self {
            arena_diameter_mm: 100.0,
            resolution_px: 1280,
            sample_rate_hz: 10.0,
        }
    }
}

impl RecordingMeta {
    pub fn validate(&self) -> Result<(), RecordingError> {
        if !(self.arena_diameter_mm.is_finite() && self.arena_diameter_mm > 0.0) {
            return Err(RecordingError::InvalidMeta(format!(
                "arena_diameter_mm must be positive, got {}",
                self.arena_diameter_mm
            )));
        }
        if self.resolution_px < 2 {
            return Err(RecordingError::InvalidMeta(format!(
                "resolution_px must be at least 2, got {}",
                self.resolution_px
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(RecordingError::InvalidMeta(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        Ok(())
    }

    /// Arena centre; the disc is inscribed in the square frame.
    pub fn center(&self) -> Point {
        let c = self.radius();
        Point::new(c, c)
    }

    pub fn radius(&self) -> f64 {
        f64::from(self.resolution_px) / 2.0
    }

    pub fn contains(&self, p: Point) -> bool {
        self.center().distance(p) <= self.radius() + DISC_TOLERANCE_PX
    }
}

/// Time-indexed positions of every tracked ant. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ColonyRecording {
    ants: BTreeMap<AntId, Vec<Sample>>,
    meta: RecordingMeta,
}

impl ColonyRecording {
    /// Validates and builds a recording.
    pub fn new(
        ants: BTreeMap<AntId, Vec<Sample>>,
        meta: RecordingMeta,
    ) -> Result<Self, RecordingError> {
        meta.validate()?;
        if ants.is_empty() {
            return Err(RecordingError::Empty);
        }
        for (&id, series) in &ants {
            validate_series(id, series, &meta, None)?;
        }
        Ok(Self { ants, meta })
    }

    pub fn meta(&self) -> &RecordingMeta {
        &self.meta
    }

    pub fn ants(&self) -> &BTreeMap<AntId, Vec<Sample>> {
        &self.ants
    }

    pub fn series(&self, id: AntId) -> Option<&[Sample]> {
        self.ants.get(&id).map(Vec::as_slice)
    }

    pub fn ant_ids(&self) -> impl Iterator<Item = AntId> + '_ {
        self.ants.keys().copied()
    }

    pub fn n_ants(&self) -> usize {
        self.ants.len()
    }

    pub fn n_samples(&self) -> usize {
        self.ants.values().map(Vec::len).sum()
    }
}

fn validate_series(
    ant_id: AntId,
    series: &[Sample],
    meta: &RecordingMeta,
    lines: Option<&[u64]>,
) -> Result<(), RecordingError> {
    let at = |i: usize| match lines {
        Some(l) => Location::Line(l[i]),
        None => Location::Index(i),
    };
    if series.len() < 2 {
        return Err(RecordingError::TooFewSamples {
            ant_id,
            len: series.len(),
        });
    }
    for (i, s) in series.iter().enumerate() {
        if !(s.t.is_finite() && s.x.is_finite() && s.y.is_finite()) {
            return Err(RecordingError::NonFinite { ant_id, at: at(i) });
        }
        if i > 0 && s.t <= series[i - 1].t {
            return Err(RecordingError::NonMonotone {
                ant_id,
                at: at(i),
                prev: series[i - 1].t,
                t: s.t,
            });
        }
        if !meta.contains(s.point()) {
            return Err(RecordingError::OutOfArena {
                ant_id,
                at: at(i),
                x: s.x,
                y: s.y,
            });
        }
    }
    Ok(())
}

/// Resolves a bundle path (with or without `.csv`) to its two files.
pub fn bundle_paths(path: impl AsRef<Path>) -> (PathBuf, PathBuf) {
    let path = path.as_ref();
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let mut csv = stem.clone().into_os_string();
    csv.push(".csv");
    let mut meta = stem.into_os_string();
    meta.push(".meta.json");
    (PathBuf::from(csv), PathBuf::from(meta))
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    ant_id: AntId,
    t_sec: f64,
    x_px: f64,
    y_px: f64,
}

/// Loads and validates a recording bundle.
///
/// Rows may be grouped by ant or interleaved; each ant's rows must appear in
/// increasing time order. Errors name the offending ant and CSV line.
pub fn load_recording(path: impl AsRef<Path>) -> Result<ColonyRecording, RecordingError> {
    let (csv_path, meta_path) = bundle_paths(path);

    let meta_text = std::fs::read_to_string(&meta_path).map_err(|source| RecordingError::Io {
        path: meta_path.clone(),
        source,
    })?;
    let meta: RecordingMeta =
        serde_json::from_str(&meta_text).map_err(|e| RecordingError::Meta {
            path: meta_path.clone(),
            message: e.to_string(),
        })?;
    meta.validate().map_err(|e| RecordingError::Meta {
        path: meta_path.clone(),
        message: e.to_string(),
    })?;

    let file = File::open(&csv_path).map_err(|source| RecordingError::Io {
        path: csv_path.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let parse_err = |message: String| RecordingError::Parse {
        path: csv_path.clone(),
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .clone();
    let found: Vec<&str> = headers.iter().map(str::trim).collect();
    if found != CSV_HEADER {
        return Err(parse_err(format!(
            "expected header `{}`, found `{}`",
            CSV_HEADER.join(","),
            found.join(",")
        )));
    }

    let mut grouped: BTreeMap<AntId, (Vec<Sample>, Vec<u64>)> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let row: CsvRow = record
            .deserialize(Some(&headers))
            .map_err(|e| parse_err(format!("line {line}: {e}")))?;
        let entry = grouped.entry(row.ant_id).or_default();
        entry.0.push(Sample::new(row.t_sec, row.x_px, row.y_px));
        entry.1.push(line);
    }
    if grouped.is_empty() {
        return Err(RecordingError::Empty);
    }

    let mut ants = BTreeMap::new();
    for (id, (series, lines)) in grouped {
        validate_series(id, &series, &meta, Some(&lines))?;
        ants.insert(id, series);
    }
    Ok(ColonyRecording { ants, meta })
}

/// Writes a recording bundle, grouped by ant in ascending id order.
///
/// Floats are written in shortest round-trip form, so output is
/// byte-identical for identical recordings.
pub fn write_recording(
    recording: &ColonyRecording,
    path: impl AsRef<Path>,
) -> Result<(), RecordingError> {
    let (csv_path, meta_path) = bundle_paths(path);
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RecordingError::Io { path, source }
    };
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }

    let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "{}", CSV_HEADER.join(","))?;
        for (id, series) in &recording.ants {
            for s in series {
                writeln!(out, "{id},{},{},{}", s.t, s.x, s.y)?;
            }
        }
        out.flush()
    };
    write(&mut out).map_err(io_err(&csv_path))?;

    let mut meta_json = serde_json::to_string_pretty(&recording.meta).expect("meta serializes");
    meta_json.push('\n');
    std::fs::write(&meta_path, meta_json).map_err(io_err(&meta_path))?;
    Ok(())
}

/// Linear interpolation of a series at time `t`.
///
/// Outside the recorded span the position is held at the nearest endpoint;
/// the returned flag is `true` in that case.
pub fn interpolate(series: &[Sample], t: f64) -> (Point, bool) {
    debug_assert!(!series.is_empty());
    let first = &series[0];
    let last = &series[series.len() - 1];
    if t < first.t - TIME_EPS {
        return (first.point(), true);
    }
    if t > last.t + TIME_EPS {
        return (last.point(), true);
    }
    (sample_at(series, t).point(), false)
}

/// Sample at `t` inside the span, snapping to recorded samples within
/// [`TIME_EPS`].
fn sample_at(series: &[Sample], t: f64) -> Sample {
    let i = series.partition_point(|s| s.t <= t);
    if i > 0 && (t - series[i - 1].t).abs() <= TIME_EPS {
        return series[i - 1];
    }
    if i < series.len() && (series[i].t - t).abs() <= TIME_EPS {
        return series[i];
    }
    if i == 0 {
        return series[0];
    }
    if i == series.len() {
        return series[i - 1];
    }
    let (a, b) = (series[i - 1], series[i]);
    let frac = (t - a.t) / (b.t - a.t);
    Sample::new(t, a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y))
}

/// Re-grids every series to spacing `dt`, starting at each ant's first sample.
///
/// When an ant's span is not a whole number of `dt`, its final recorded
/// sample is kept as the last point so both endpoints survive.
pub fn resample(recording: &ColonyRecording, dt: f64) -> Result<ColonyRecording, RecordingError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(RecordingError::InvalidDt(dt));
    }
    let ants = recording
        .ants
        .iter()
        .map(|(&id, series)| (id, resample_series(series, dt)))
        .collect();
    let meta = RecordingMeta {
        sample_rate_hz: 1.0 / dt,
        ..recording.meta
    };
    Ok(ColonyRecording { ants, meta })
}

fn resample_series(series: &[Sample], dt: f64) -> Vec<Sample> {
    let t0 = series[0].t;
    let t_end = series[series.len() - 1].t;
    let n = ((t_end - t0) / dt + TIME_EPS).floor() as usize;
    let mut out = Vec::with_capacity(n + 2);
    for k in 0..=n {
        out.push(sample_at(series, t0 + k as f64 * dt));
    }
    let last = out[out.len() - 1];
    if t_end - last.t > TIME_EPS {
        out.push(series[series.len() - 1]);
    }
    out
}

/// A chosen target ant and the trail it walks during the episode window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSelection {
    pub ant_id: AntId,
    pub start_time: f64,
    /// `steps + 1` samples, spaced at the recording's sample interval.
    pub trail: Vec<Sample>,
}

impl TargetSelection {
    pub fn displacement(&self) -> f64 {
        self.trail[0]
            .point()
            .distance(self.trail[self.trail.len() - 1].point())
    }
}

/// Window length in samples for `t_lim` seconds at the recording's rate.
pub fn window_steps(meta: &RecordingMeta, t_lim: f64) -> Result<usize, RecordingError> {
    if !(t_lim.is_finite() && t_lim > 0.0) {
        return Err(RecordingError::InvalidWindow(format!(
            "t_lim must be positive, got {t_lim}"
        )));
    }
    let steps = (t_lim * meta.sample_rate_hz).round();
    if steps < 1.0 || (steps / meta.sample_rate_hz - t_lim).abs() > WINDOW_EPS {
        return Err(RecordingError::InvalidWindow(format!(
            "t_lim {t_lim} s is not a whole number of {} s samples",
            1.0 / meta.sample_rate_hz
        )));
    }
    Ok(steps as usize)
}

/// Calls `visit(ant_id, start_index, displacement)` for every full window of
/// `steps` samples, in ascending (ant, start) order.
fn for_each_window(
    recording: &ColonyRecording,
    t_lim: f64,
    steps: usize,
    mut visit: impl FnMut(AntId, usize, f64) -> bool,
) {
    for (&id, series) in &recording.ants {
        if series.len() <= steps {
            continue;
        }
        for i in 0..series.len() - steps {
            let (a, b) = (&series[i], &series[i + steps]);
            if (b.t - a.t - t_lim).abs() > WINDOW_EPS {
                continue;
            }
            if !visit(id, i, a.point().distance(b.point())) {
                return;
            }
        }
    }
}

/// Picks a target window uniformly among all `(ant, start)` pairs whose net
/// displacement over `t_lim` seconds is at least `d_min` pixels.
///
/// `recording` must already be resampled to the environment's step.
pub fn select_target<R: Rng + ?Sized>(
    recording: &ColonyRecording,
    t_lim: f64,
    d_min: f64,
    rng: &mut R,
) -> Result<TargetSelection, RecordingError> {
    let steps = window_steps(&recording.meta, t_lim)?;
    let mut count = 0usize;
    let mut max_displacement = 0.0f64;
    for_each_window(recording, t_lim, steps, |_, _, d| {
        max_displacement = max_displacement.max(d);
        if d >= d_min {
            count += 1;
        }
        true
    });
    if count == 0 {
        return Err(RecordingError::NoCandidate {
            d_min,
            max_displacement,
        });
    }

    let mut remaining = rng.gen_range(0..count);
    let mut chosen = None;
    for_each_window(recording, t_lim, steps, |id, i, d| {
        if d < d_min {
            return true;
        }
        if remaining == 0 {
            chosen = Some((id, i));
            return false;
        }
        remaining -= 1;
        true
    });
    let (ant_id, start) = chosen.expect("candidate index within count");
    let trail = recording.ants[&ant_id][start..=start + steps].to_vec();
    Ok(TargetSelection {
        ant_id,
        start_time: trail[0].t,
        trail,
    })
}

/// Parameters of the synthetic colony generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticParams {
    pub n_ants: usize,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    /// Standard deviation of the per-sample velocity kick, px.
    pub noise_px: f64,
    /// Strength of the attraction toward the colony centroid, in `[0, 1]`.
    pub cluster_pull: f64,
    pub arena_diameter_mm: f64,
    pub resolution_px: u32,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        let meta = RecordingMeta::default();
        Self {
            n_ants: 20,
            duration_s: 60.0,
            sample_rate_hz: meta.sample_rate_hz,
            noise_px: 2.0,
            cluster_pull: 0.3,
            arena_diameter_mm: meta.arena_diameter_mm,
            resolution_px: meta.resolution_px,
        }
    }
}

impl SyntheticParams {
    pub fn validate(&self) -> Result<(), RecordingError> {
        let bad = |m: String| Err(RecordingError::InvalidParams(m));
        if self.n_ants < 1 {
            return bad("n_ants must be at least 1".into());
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return bad(format!(
                "duration_s must be positive, got {}",
                self.duration_s
            ));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return bad(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            ));
        }
        if !(self.noise_px.is_finite() && self.noise_px >= 0.0) {
            return bad(format!(
                "noise_px must be non-negative, got {}",
                self.noise_px
            ));
        }
        if !(0.0..=1.0).contains(&self.cluster_pull) {
            return bad(format!(
                "cluster_pull must lie in [0, 1], got {}",
                self.cluster_pull
            ));
        }
        self.meta()
            .validate()
            .map_err(|e| RecordingError::InvalidParams(e.to_string()))?;
        if (self.duration_s * self.sample_rate_hz).round() < 1.0 {
            return bad("duration_s covers less than one sample interval".into());
        }
        Ok(())
    }

    pub fn meta(&self) -> RecordingMeta {
        RecordingMeta {
            arena_diameter_mm: self.arena_diameter_mm,
            resolution_px: self.resolution_px,
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

const VELOCITY_PERSISTENCE: f64 = 0.8;
const PULL_GAIN: f64 = 0.02;
const SPAWN_FRACTION: f64 = 0.8;
const WALL_MARGIN_PX: f64 = 1.0;

/// Generates correlated random walks drawn toward the colony centroid.
///
/// Each ant keeps a velocity that decays by a fixed persistence factor, is
/// kicked by isotropic Gaussian noise of `noise_px`, and is pulled toward the
/// current centroid of all ants by `cluster_pull`. Walls reflect the radial
/// velocity component.
pub fn gen_synthetic<R: Rng + ?Sized>(
    params: &SyntheticParams,
    rng: &mut R,
) -> Result<ColonyRecording, RecordingError> {
    params.validate()?;
    let meta = params.meta();
    let center = meta.center();
    let radius = meta.radius();
    let wall = (radius - WALL_MARGIN_PX).max(radius * 0.5);
    let n_steps = (params.duration_s * params.sample_rate_hz).round() as usize;

    let mut pos: Vec<Point> = (0..params.n_ants)
        .map(|_| loop {
            let x = rng.gen_range(-1.0..1.0);
            let y = rng.gen_range(-1.0..1.0);
            if x * x + y * y <= 1.0 {
                let r = radius * SPAWN_FRACTION;
                break Point::new(center.x + x * r, center.y + y * r);
            }
        })
        .collect();
    let mut vel = vec![Point::default(); params.n_ants];
    let mut series: Vec<Vec<Sample>> = pos
        .iter()
        .map(|p| {
            let mut s = Vec::with_capacity(n_steps + 1);
            s.push(Sample::new(0.0, p.x, p.y));
            s
        })
        .collect();

    for k in 1..=n_steps {
        let t = k as f64 / params.sample_rate_hz;
        let n = params.n_ants as f64;
        let centroid = Point::new(
            pos.iter().map(|p| p.x).sum::<f64>() / n,
            pos.iter().map(|p| p.y).sum::<f64>() / n,
        );
        for ((p, v), s) in pos.iter_mut().zip(vel.iter_mut()).zip(series.iter_mut()) {
            let kick_x: f64 = rng.sample(StandardNormal);
            let kick_y: f64 = rng.sample(StandardNormal);
            let pull = params.cluster_pull * PULL_GAIN;
            v.x = VELOCITY_PERSISTENCE * v.x + params.noise_px * kick_x + pull * (centroid.x - p.x);
            v.y = VELOCITY_PERSISTENCE * v.y + params.noise_px * kick_y + pull * (centroid.y - p.y);
            p.x += v.x;
            p.y += v.y;

            let (dx, dy) = (p.x - center.x, p.y - center.y);
            let d = dx.hypot(dy);
            if d > wall {
                let (nx, ny) = (dx / d, dy / d);
                p.x = center.x + nx * wall;
                p.y = center.y + ny * wall;
                let radial = v.x * nx + v.y * ny;
                v.x -= 2.0 * radial * nx;
                v.y -= 2.0 * radial * ny;
            }
            s.push(Sample::new(t, p.x, p.y));
        }
    }

    let ants = series
        .into_iter()
        .enumerate()
        .map(|(i, s)| (i as AntId, s))
        .collect();
    ColonyRecording::new(ants, meta)
}
