#![allow(dead_code)]

use std::collections::BTreeMap;

use antdyn_core::recording::{gen_synthetic, Sample, SyntheticParams};
use antdyn_core::{ColonyRecording, RecordingMeta};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One ant walking `length_px` east from (540, 640) over `seconds`, sampled
/// at 10 Hz.
pub fn straight_line(length_px: f64, seconds: f64) -> ColonyRecording {
    let n = (seconds * 10.0).round() as usize;
    let series = (0..=n)
        .map(|k| {
            Sample::new(
                k as f64 / 10.0,
                540.0 + length_px * k as f64 / n as f64,
                640.0,
            )
        })
        .collect();
    ColonyRecording::new(BTreeMap::from([(0, series)]), RecordingMeta::default()).unwrap()
}

/// A clustered colony that moves enough to yield target windows.
pub fn colony(n_ants: usize, seconds: f64, seed: u64) -> ColonyRecording {
    let params = SyntheticParams {
        n_ants,
        duration_s: seconds,
        noise_px: 3.0,
        cluster_pull: 0.1,
        ..SyntheticParams::default()
    };
    gen_synthetic(&params, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}
