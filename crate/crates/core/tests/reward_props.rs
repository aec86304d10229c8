use antdyn_core::reward::{
    episode_reward, step_penalty, trail_area_step, RewardConfig, RewardMode, TrailPair,
};
use antdyn_core::Point;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Proper intersection of segments ab and cd.
fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient =
        |p: Point, q: Point, r: Point| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn inside(poly: &[Point; 4], x: f64, y: f64) -> bool {
    let mut inside = false;
    for i in 0..4 {
        let (a, b) = (poly[i], poly[(i + 1) % 4]);
        if (a.y > y) != (b.y > y) && x < a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y) {
            inside = !inside;
        }
    }
    inside
}

/// Area estimate from counting 0.25 px cell centres inside the polygon.
fn raster_area(poly: &[Point; 4]) -> f64 {
    const H: f64 = 0.25;
    let min_x = poly.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max_x = poly.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let min_y = poly.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = poly.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let (x0, y0) = ((min_x / H).floor() * H, (min_y / H).floor() * H);
    let nx = ((max_x - x0) / H).ceil() as usize;
    let ny = ((max_y - y0) / H).ceil() as usize;
    let mut count = 0usize;
    for i in 0..nx {
        for j in 0..ny {
            if inside(poly, x0 + (i as f64 + 0.5) * H, y0 + (j as f64 + 0.5) * H) {
                count += 1;
            }
        }
    }
    count as f64 * H * H
}

fn random_simple_quad(rng: &mut ChaCha8Rng) -> [Point; 4] {
    loop {
        let q: [Point; 4] =
            std::array::from_fn(|_| p(rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0)));
        let simple =
            !segments_cross(q[0], q[1], q[2], q[3]) && !segments_cross(q[1], q[2], q[3], q[0]);
        let shoelace = (0..4)
            .map(|i| q[i].x * q[(i + 1) % 4].y - q[(i + 1) % 4].x * q[i].y)
            .sum::<f64>()
            / 2.0;
        if simple && shoelace.abs() >= 50.0 {
            return q;
        }
    }
}

#[test]
fn area_matches_rasterization_on_simple_quads() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut concave = 0;
    for _ in 0..100 {
        // polygon order: pa_prev, pa_cur, pt_cur, pt_prev
        let q = random_simple_quad(&mut rng);
        let area = trail_area_step(q[0], q[1], q[3], q[2]);
        let estimate = raster_area(&q);
        assert!(
            (area - estimate).abs() <= 0.02 * estimate,
            "{q:?}: {area} vs {estimate}"
        );
        let turns: Vec<bool> = (0..4)
            .map(|i| {
                let (a, b, c) = (q[i], q[(i + 1) % 4], q[(i + 2) % 4]);
                (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x) > 0.0
            })
            .collect();
        if turns.iter().any(|&t| t != turns[0]) {
            concave += 1;
        }
    }
    assert!(concave > 0, "sample should include non-convex quads");
}

#[test]
fn five_step_sum_by_hand() {
    // step areas 0.5, 1, 1.5, 2, 2 (triangle, square, trapezoid, two rectangles)
    let agent = vec![
        p(0.0, 0.0),
        p(1.0, 0.0),
        p(2.0, 0.0),
        p(3.0, 0.0),
        p(4.0, 0.0),
        p(5.0, 0.0),
    ];
    let target = vec![
        p(0.0, 0.0),
        p(1.0, 1.0),
        p(2.0, 1.0),
        p(3.0, 2.0),
        p(4.0, 2.0),
        p(5.0, 2.0),
    ];
    let pair = TrailPair::new(agent, target).unwrap();
    let config = RewardConfig {
        mode: RewardMode::Monotone,
        kappa: 1.0,
    };
    let expected = -(0.5 / 1.25f64.sqrt()
        + 1.0 / 2f64.sqrt()
        + 1.5 / 3.25f64.sqrt()
        + 2.0 * 2.0 / 5f64.sqrt());
    let got = episode_reward(&pair, &config).unwrap();
    assert!((got - expected).abs() <= 1e-12, "{got} vs {expected}");

    let literal = RewardConfig {
        mode: RewardMode::Literal,
        kappa: 1.0,
    };
    let got = episode_reward(&pair, &literal).unwrap();
    assert!((got - (-5.0 - expected)).abs() <= 1e-12);
}

#[test]
fn kappa_area_one_gives_minus_inverse_sqrt_two() {
    let c = RewardConfig::default();
    let r = step_penalty(1.0 / c.kappa, &c).unwrap();
    assert!((r + 1.0 / 2f64.sqrt()).abs() < 1e-12);
    // the tabulated value, to five places
    assert_eq!(format!("{r:.5}"), "-0.70711");
}

fn point() -> impl Strategy<Value = Point> {
    (-500.0f64..500.0, -500.0f64..500.0).prop_map(|(x, y)| p(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn area_is_rigid_motion_invariant(
        a in point(), b in point(), c in point(), d in point(),
        tx in -1000.0f64..1000.0, ty in -1000.0f64..1000.0, angle in -4.0f64..4.0,
    ) {
        let (s, co) = angle.sin_cos();
        let m = |q: Point| p(co * q.x - s * q.y + tx, s * q.x + co * q.y + ty);
        let base = trail_area_step(a, b, c, d);
        let moved = trail_area_step(m(a), m(b), m(c), m(d));
        let scale = [a, b, c, d].iter().map(|q| q.x.abs().max(q.y.abs())).fold(1.0, f64::max);
        // round-off grows with coordinate magnitude squared, not with the area
        prop_assert!((base - moved).abs() <= 1e-9 * base.max(scale * scale * 1e-3));
    }

    #[test]
    fn area_scales_quadratically(a in point(), b in point(), c in point(), d in point(), k in 0.01f64..20.0) {
        let s = |q: Point| p(q.x * k, q.y * k);
        let base = trail_area_step(a, b, c, d);
        let scaled = trail_area_step(s(a), s(b), s(c), s(d));
        prop_assert!((scaled - k * k * base).abs() <= 1e-9 * (k * k * base).max(1e-6));
    }

    #[test]
    fn penalty_range_and_direction(a1 in 0.0f64..1e6, a2 in 0.0f64..1e6, kappa in 1e-4f64..10.0) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let mono = RewardConfig { mode: RewardMode::Monotone, kappa };
        let lit = RewardConfig { mode: RewardMode::Literal, kappa };
        for c in [&mono, &lit] {
            let r = step_penalty(lo, c).unwrap();
            prop_assert!((-1.0..=0.0).contains(&r));
        }
        prop_assert!(step_penalty(hi, &mono).unwrap() <= step_penalty(lo, &mono).unwrap());
        prop_assert!(step_penalty(hi, &lit).unwrap() >= step_penalty(lo, &lit).unwrap());
    }

    #[test]
    fn monotone_total_is_zero_only_for_degenerate_steps(
        pts in proptest::collection::vec((point(), point()), 1..12),
        collinear in any::<bool>(),
    ) {
        let (agent, mut target): (Vec<Point>, Vec<Point>) = pts.into_iter().unzip();
        let mut agent = agent;
        if collinear {
            for q in agent.iter_mut().chain(target.iter_mut()) {
                q.y = 2.0 * q.x + 1.0;
            }
        }
        target[0] = agent[0];
        let pair = TrailPair::new(agent, target).unwrap();
        let total = episode_reward(&pair, &RewardConfig::default()).unwrap();
        let all_degenerate = (1..=pair.steps()).all(|t| pair.step_area(t) == 0.0);
        prop_assert_eq!(total == 0.0, all_degenerate);
        prop_assert!(total <= 0.0 && total >= -(pair.steps() as f64));
    }
}
