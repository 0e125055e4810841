//! Integer line walk from polylines to pixel chains with per-pixel tangents.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{GridSize, Pixel, Vec2};
use crate::math;
use crate::polyline::Polyline;

/// A polyline rasterized onto the grid.
///
/// `pixels` are unique and in traversal order; `tangents[i]` is the unit
/// direction of the segment that first produced `pixels[i]` (the bisector
/// of both segments at a shared vertex). `weights[i]` is the kernel mass
/// placed at the pixel: the sum over producing segments of
/// `1 / |segment pixels|`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterizedLine {
    pub line_id: u32,
    pub cluster: Option<u32>,
    pub pixels: Vec<Pixel>,
    pub tangents: Vec<Vec2>,
    pub weights: Vec<f64>,
    /// `kernel_n x kernel_n` dilation of `pixels`, clipped, sorted row-major.
    pub footprint: Vec<Pixel>,
}

impl RasterizedLine {
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    /// Tangent stored at `p`, if `p` belongs to the line.
    pub fn tangent_at(&self, p: Pixel) -> Option<Vec2> {
        self.pixels.iter().position(|&q| q == p).map(|i| self.tangents[i])
    }
}

pub fn check_kernel(kernel_n: usize) -> Result<()> {
    if kernel_n == 0 || kernel_n.is_multiple_of(2) {
        Err(Error::invalid("kernel_n", "must be an odd integer >= 1"))
    } else {
        Ok(())
    }
}

fn to_pixel(v: Vec2) -> Pixel {
    Pixel::new(
        math::round_half_up(v.x) as i32,
        math::round_half_up(v.y) as i32,
    )
}

/// `round(n / d)` with halves rounded up, for `d > 0`.
fn div_round(n: i64, d: i64) -> i64 {
    (2 * n + d).div_euclid(2 * d)
}

/// Appends the 8-connected chain from `a` to `b`, both inclusive.
///
/// The walk always runs from the row-major smaller endpoint so that a
/// segment and its reverse cover the same pixels.
pub(crate) fn walk_segment(a: Pixel, b: Pixel, out: &mut Vec<Pixel>) {
    let (s, e, reverse) = if a <= b { (a, b, false) } else { (b, a, true) };
    let dx = (e.col - s.col) as i64;
    let dy = (e.row - s.row) as i64;
    let steps = dx.abs().max(dy.abs());
    let start = out.len();
    if steps == 0 {
        out.push(s);
        return;
    }
    for i in 0..=steps {
        out.push(Pixel::new(
            s.col + div_round(i * dx, steps) as i32,
            s.row + div_round(i * dy, steps) as i32,
        ));
    }
    if reverse {
        out[start..].reverse();
    }
}

/// Rasterizes `line` (in grid coordinates) onto `size`.
///
/// Vertices are snapped to their nearest pixel; runs of consecutive
/// vertices in the same pixel collapse to their mean position, which
/// defines the segment tangents. Pixels outside the grid are dropped, so a
/// line entirely outside yields an empty result.
pub fn rasterize(line: &Polyline, size: GridSize, kernel_n: usize) -> Result<RasterizedLine> {
    check_kernel(kernel_n)?;

    // (pixel, summed position, count) per run of same-pixel vertices.
    let mut runs: Vec<(Pixel, Vec2, f64)> = Vec::new();
    for &v in &line.vertices {
        let p = to_pixel(v);
        match runs.last_mut() {
            Some(run) if run.0 == p => {
                run.1 += v;
                run.2 += 1.0;
            }
            _ => runs.push((p, v, 1.0)),
        }
    }
    let anchors: Vec<(Pixel, Vec2)> = runs.iter().map(|&(p, s, n)| (p, s * (1.0 / n))).collect();

    let mut pixels = Vec::new();
    let mut tangents = Vec::new();
    let mut weights = Vec::new();
    let mut slot: BTreeMap<Pixel, usize> = BTreeMap::new();
    let mut push = |p: Pixel, t: Vec2, w: f64, pixels: &mut Vec<Pixel>, tangents: &mut Vec<Vec2>, weights: &mut Vec<f64>| {
        match slot.get(&p) {
            Some(&i) => weights[i] += w,
            None => {
                slot.insert(p, pixels.len());
                pixels.push(p);
                tangents.push(t);
                weights.push(w);
            }
        }
    };

    if anchors.len() == 1 {
        // Whole line inside one pixel.
        let first = line.vertices[0];
        let last = line.vertices[line.vertices.len() - 1];
        let t = (last - first).normalized().unwrap_or(Vec2::new(1.0, 0.0));
        if size.contains(anchors[0].0) {
            push(anchors[0].0, t, 1.0, &mut pixels, &mut tangents, &mut weights);
        }
    } else {
        let seg_tangents: Vec<Vec2> = anchors
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).normalized().unwrap_or(Vec2::new(1.0, 0.0)))
            .collect();
        let last_seg = seg_tangents.len() - 1;
        let vertex_tangent = |k: usize| -> Vec2 {
            if k == 0 {
                seg_tangents[0]
            } else if k > last_seg {
                seg_tangents[last_seg]
            } else {
                (seg_tangents[k - 1] + seg_tangents[k])
                    .normalized()
                    .unwrap_or(seg_tangents[k - 1])
            }
        };
        let mut chain = Vec::new();
        for k in 0..=last_seg {
            chain.clear();
            walk_segment(anchors[k].0, anchors[k + 1].0, &mut chain);
            let inside = chain.iter().filter(|&&p| size.contains(p)).count();
            if inside == 0 {
                continue;
            }
            let w = 1.0 / inside as f64;
            let n = chain.len();
            for (j, &p) in chain.iter().enumerate() {
                if !size.contains(p) {
                    continue;
                }
                let t = if j == 0 {
                    vertex_tangent(k)
                } else if j == n - 1 {
                    vertex_tangent(k + 1)
                } else {
                    seg_tangents[k]
                };
                push(p, t, w, &mut pixels, &mut tangents, &mut weights);
            }
        }
    }

    let footprint = dilate(&pixels, size, kernel_n);
    Ok(RasterizedLine {
        line_id: line.id,
        cluster: line.cluster,
        pixels,
        tangents,
        weights,
        footprint,
    })
}

/// Minkowski dilation by a `kernel_n x kernel_n` square, clipped to `size`.
pub fn dilate(pixels: &[Pixel], size: GridSize, kernel_n: usize) -> Vec<Pixel> {
    let half = (kernel_n / 2) as i32;
    let mut set = BTreeSet::new();
    for &p in pixels {
        for dr in -half..=half {
            for dc in -half..=half {
                let q = Pixel::new(p.col + dc, p.row + dr);
                if size.contains(q) {
                    set.insert(q);
                }
            }
        }
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line(pts: &[(f64, f64)]) -> Polyline {
        Polyline::new(1, pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect(), None).unwrap()
    }

    const SIZE: GridSize = GridSize::new(64, 64);

    #[test]
    fn horizontal_segment() {
        let r = rasterize(&line(&[(10.0, 20.0), (14.0, 20.0)]), SIZE, 1).unwrap();
        let expect: Vec<Pixel> = (10..=14).map(|c| Pixel::new(c, 20)).collect();
        assert_eq!(r.pixels, expect);
        for t in &r.tangents {
            assert_eq!(*t, Vec2::new(1.0, 0.0));
        }
        for w in &r.weights {
            assert!((w - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_segment() {
        let r = rasterize(&line(&[(0.0, 0.0), (3.0, 3.0)]), SIZE, 1).unwrap();
        let expect: Vec<Pixel> = (0..=3).map(|i| Pixel::new(i, i)).collect();
        assert_eq!(r.pixels, expect);
        let h = core::f64::consts::FRAC_1_SQRT_2;
        for t in &r.tangents {
            assert!((t.x - h).abs() < 1e-12 && (t.y - h).abs() < 1e-12);
        }
    }

    #[test]
    fn single_pixel_footprint_is_square() {
        let r = rasterize(&line(&[(5.0, 5.0), (5.2, 5.1)]), SIZE, 3).unwrap();
        assert_eq!(r.pixels, vec![Pixel::new(5, 5)]);
        let mut expect = Vec::new();
        for row in 4..=6 {
            for col in 4..=6 {
                expect.push(Pixel::new(col, row));
            }
        }
        assert_eq!(r.footprint, expect);
    }

    #[test]
    fn even_kernel_is_rejected() {
        assert!(rasterize(&line(&[(0.0, 0.0), (3.0, 3.0)]), SIZE, 2).is_err());
    }

    #[test]
    fn outside_grid_is_empty() {
        let r = rasterize(&line(&[(-50.0, -5.0), (-10.0, -9.0)]), SIZE, 3).unwrap();
        assert!(r.is_empty());
        assert!(r.footprint.is_empty());
    }

    #[test]
    fn polyline_weights_sum_to_segment_count() {
        let r = rasterize(&line(&[(2.0, 2.0), (12.0, 5.0), (20.0, 30.0), (40.0, 31.0)]), SIZE, 1).unwrap();
        let total: f64 = r.weights.iter().sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn shared_vertex_uses_bisector() {
        let r = rasterize(&line(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0)]), SIZE, 1).unwrap();
        let corner = r.tangent_at(Pixel::new(4, 0)).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((corner.x - h).abs() < 1e-12 && (corner.y - h).abs() < 1e-12);
    }

    #[test]
    fn self_crossing_keeps_first_tangent() {
        // Passes (5,5) twice: first going right, then going up.
        let r = rasterize(
            &line(&[(0.0, 5.0), (10.0, 5.0), (10.0, 10.0), (5.0, 10.0), (5.0, 0.0)]),
            SIZE,
            1,
        )
        .unwrap();
        assert_eq!(r.tangent_at(Pixel::new(5, 5)), Some(Vec2::new(1.0, 0.0)));
        let unique: BTreeSet<Pixel> = r.pixels.iter().copied().collect();
        assert_eq!(unique.len(), r.pixels.len());
    }

    #[test]
    fn sub_pixel_vertices_collapse() {
        let r = rasterize(
            &line(&[(0.0, 0.0), (0.2, 0.1), (0.4, 0.1), (3.0, 0.0)]),
            SIZE,
            1,
        )
        .unwrap();
        assert_eq!(r.pixels.len(), 4);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
