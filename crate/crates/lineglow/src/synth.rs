//! Seeded synthetic datasets in grid coordinates.

use std::f64::consts::PI;

use lineglow_core::{GridSize, Polyline, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller.
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// `n` horizontal lines two pixels apart plus one vertical line crossing
/// all of them through the middle. The crosser has the largest id.
pub fn parallel_with_crosser(size: GridSize, n: usize) -> Vec<Polyline> {
    let w = size.width as f64;
    let h = size.height as f64;
    let top = (h - 2.0 * (n as f64 - 1.0)) / 2.0;
    let mut lines: Vec<Polyline> = (0..n)
        .map(|i| {
            let y = (top + 2.0 * i as f64).round();
            Polyline::new(i as u32, vec![Vec2::new(0.1 * w, y), Vec2::new(0.9 * w - 1.0, y)], None).unwrap()
        })
        .collect();
    let x = (w / 2.0).round();
    lines.push(
        Polyline::new(
            n as u32,
            vec![Vec2::new(x, (top - 10.0).max(0.0)), Vec2::new(x, (top + 2.0 * n as f64 + 8.0).min(h - 1.0))],
            None,
        )
        .unwrap(),
    );
    lines
}

/// Shipping-lane-like data: bundles of noisy trajectories along three
/// smooth corridors, plus a few straight crossers. Clusters are the
/// corridor index, crossers get cluster 3.
pub fn corridor(size: GridSize, n: usize, seed: u64) -> Vec<Polyline> {
    let mut rng = rng(seed);
    let w = size.width as f64;
    let h = size.height as f64;
    let corridors: [(f64, f64, f64, f64); 3] = [
        // (base row fraction, amplitude fraction, waves, phase)
        (0.28, 0.08, 1.0, 0.0),
        (0.55, 0.12, 1.5, 1.2),
        (0.78, 0.05, 0.7, 2.5),
    ];
    let crossers = (n / 20).max(1);
    let mut lines = Vec::with_capacity(n);
    for id in 0..n {
        let pts: Vec<Vec2> = if id < n - crossers {
            let c = id % 3;
            let (base, amp, waves, phase) = corridors[c];
            let offset = 0.012 * h * gauss(&mut rng);
            let x0 = w * rng.gen_range(0.03..0.2);
            let x1 = w * rng.gen_range(0.8..0.97);
            let steps = 24;
            (0..=steps)
                .map(|k| {
                    let x = x0 + (x1 - x0) * k as f64 / steps as f64;
                    let y = h * (base + amp * (2.0 * PI * waves * x / w + phase).sin())
                        + offset
                        + 0.6 * gauss(&mut rng);
                    Vec2::new(x, y.clamp(0.0, h - 1.0))
                })
                .collect()
        } else {
            let x0 = w * rng.gen_range(0.1..0.9);
            let x1 = w * rng.gen_range(0.1..0.9);
            vec![Vec2::new(x0, 0.04 * h), Vec2::new((x0 + x1) / 2.0, 0.5 * h), Vec2::new(x1, 0.96 * h)]
        };
        let cluster = if id < n - crossers { (id % 3) as u32 } else { 3 };
        if let Some(l) = Polyline::new(id as u32, pts, Some(cluster)) {
            lines.push(l);
        }
    }
    lines
}

/// Random walks of about `length` pixels with `segments` segments each,
/// kept inside the grid by reflection.
pub fn random_walks(size: GridSize, n: usize, length: f64, segments: usize, seed: u64) -> Vec<Polyline> {
    let mut rng = rng(seed);
    let w = size.width as f64 - 1.0;
    let h = size.height as f64 - 1.0;
    let step = length / segments.max(1) as f64;
    (0..n)
        .filter_map(|id| {
            let mut p = Vec2::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h));
            let mut heading: f64 = rng.gen_range(0.0..2.0 * PI);
            let mut pts = vec![p];
            for _ in 0..segments {
                heading += 0.35 * gauss(&mut rng);
                let mut q = Vec2::new(p.x + step * heading.cos(), p.y + step * heading.sin());
                if q.x < 0.0 || q.x > w {
                    heading = PI - heading;
                    q.x = q.x.clamp(0.0, w);
                }
                if q.y < 0.0 || q.y > h {
                    heading = -heading;
                    q.y = q.y.clamp(0.0, h);
                }
                pts.push(q);
                p = q;
            }
            Polyline::new(id as u32, pts, None)
        })
        .collect()
}

/// Rotates grid-coordinate lines by 90 degrees on a square grid:
/// `(x, y) -> (n - 1 - y, x)`.
pub fn rotate90(lines: &[Polyline], size: GridSize) -> Vec<Polyline> {
    assert_eq!(size.width, size.height, "rotation needs a square grid");
    let m = (size.width - 1) as f64;
    lines.iter().map(|l| l.map(|v| Vec2::new(m - v.y, v.x))).collect()
}

/// Lines with integer vertices whose segments all have an odd major
/// extent, so the line walk never meets a rounding tie and rasterization
/// commutes exactly with 90-degree rotation.
pub fn tie_free_lines(size: GridSize, n: usize, seed: u64) -> Vec<Polyline> {
    let mut rng = rng(seed);
    let lo = (size.width / 8) as i64;
    let hi = (size.width - size.width / 8) as i64;
    let mut lines = Vec::new();
    let mut id = 0u32;
    while lines.len() < n {
        let mut p = (rng.gen_range(lo..hi), rng.gen_range(lo..hi));
        let mut pts = vec![Vec2::new(p.0 as f64, p.1 as f64)];
        for _ in 0..rng.gen_range(2..5) {
            let major = 2 * rng.gen_range(4..16) + 1;
            let minor = rng.gen_range(0..major);
            let (mut dx, mut dy) = if rng.gen() { (major, minor) } else { (minor, major) };
            if rng.gen() {
                dx = -dx;
            }
            if rng.gen() {
                dy = -dy;
            }
            let q = (p.0 + dx, p.1 + dy);
            if !(lo..hi).contains(&q.0) || !(lo..hi).contains(&q.1) {
                continue;
            }
            pts.push(Vec2::new(q.0 as f64, q.1 as f64));
            p = q;
        }
        if let Some(l) = Polyline::new(id, pts, None) {
            lines.push(l);
            id += 1;
        }
    }
    lines
}
