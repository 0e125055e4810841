//! Brute-force reference implementations, written independently of the
//! engine's fast paths.

#![allow(dead_code)]

use std::collections::BTreeMap;

use lineglow_core::{FieldParams, GridSize, Pixel, RasterizedLine, Vec2};

pub struct OracleSample {
    pub value: f64,
    pub tangent: Vec2,
    pub dist: f64,
}

fn gaussian(h: f64, d2: f64) -> f64 {
    (-d2 / (2.0 * h * h)).exp() / (2.0 * std::f64::consts::PI * h * h)
}

/// Every grid pixel within the band radius of `line`, with the kernel sum
/// over line pixels within the kernel reach. Candidates are the squares of
/// side `2R + 1` around line pixels; membership and nearest pixel are then
/// decided by exhaustive search over the line.
pub fn band(line: &RasterizedLine, size: GridSize, params: &FieldParams) -> BTreeMap<usize, OracleSample> {
    let r = params.band_radius as i32;
    let r2 = (params.band_radius * params.band_radius) as i64;
    let reach2 = (params.kernel_reach() * params.kernel_reach()) as i64;
    let mut candidates = std::collections::BTreeSet::new();
    for q in &line.pixels {
        for row in q.row - r..=q.row + r {
            for col in q.col - r..=q.col + r {
                if let Some(i) = size.index(Pixel::new(col, row)) {
                    candidates.insert(i);
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for idx in candidates {
        let p = size.pixel(idx);
        let best = line.pixels.iter().map(|q| q.dist2(p)).min().unwrap();
        if best > r2 {
            continue;
        }
        let mut t = Vec2::ZERO;
        let mut first = None;
        let mut value = 0.0;
        for (i, q) in line.pixels.iter().enumerate() {
            let d2 = q.dist2(p);
            if d2 == best {
                t += line.tangents[i];
                first.get_or_insert(line.tangents[i]);
            }
            if d2 <= reach2 {
                value += line.weights[i] * gaussian(params.bandwidth, d2 as f64);
            }
        }
        let tangent = t.normalized().unwrap_or(first.unwrap());
        out.insert(
            idx,
            OracleSample {
                value,
                tangent,
                dist: (best as f64).sqrt(),
            },
        );
    }
    out
}

/// Untruncated kernel sum of `line` at `p`.
pub fn full_sum(line: &RasterizedLine, h: f64, p: Pixel) -> f64 {
    line.pixels
        .iter()
        .zip(&line.weights)
        .map(|(q, w)| w * gaussian(h, q.dist2(p) as f64))
        .sum()
}

pub fn similarity(band_l: &BTreeMap<usize, OracleSample>, other: &RasterizedLine, size: GridSize) -> f64 {
    let mut sum = 0.0;
    for (p, t) in other.pixels.iter().zip(&other.tangents) {
        if let Some(s) = band_l.get(&size.index(*p).unwrap()) {
            sum += (s.tangent.x * t.x + s.tangent.y * t.y).abs() * s.value;
        }
    }
    sum / other.pixels.len() as f64
}

/// Pairwise outlierness: `1 - mean(sim / peak)` over band neighbours,
/// 1 for lines without neighbours. Returned in input order.
pub fn outlierness(lines: &[RasterizedLine], size: GridSize, params: &FieldParams) -> Vec<(u32, f64)> {
    let bands: Vec<_> = lines.iter().map(|l| band(l, size, params)).collect();
    let mut out = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        let peak = bands[i].values().map(|s| s.value).fold(0.0, f64::max);
        let mut sum = 0.0;
        let mut count = 0usize;
        for (j, other) in lines.iter().enumerate() {
            if i == j {
                continue;
            }
            let touches = other
                .pixels
                .iter()
                .any(|p| bands[i].contains_key(&size.index(*p).unwrap()));
            if touches {
                count += 1;
                sum += similarity(&bands[i], other, size);
            }
        }
        let score = if count == 0 || peak <= 0.0 {
            1.0
        } else {
            (1.0 - sum / (peak * count as f64)).clamp(0.0, 1.0)
        };
        out.push((l.line_id, score));
    }
    out
}
