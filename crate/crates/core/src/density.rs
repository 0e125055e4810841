//! Discretized curve density estimation.
//!
//! Each rasterized pixel of a segment carries an isotropic Gaussian of
//! standard deviation `h`, weighted by `1 / |segment pixels|`. A line's
//! contribution is evaluated only inside its band (pixels within
//! `band_radius` of the line) and doubles as the line's influence field.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{GridSize, Pixel, Vec2};
use crate::grid::ScalarGrid;
use crate::math;
use crate::raster::RasterizedLine;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldParams {
    pub bandwidth: f64,
    pub band_radius: usize,
}

impl FieldParams {
    /// Bandwidth `h` with the default band radius `max(5, ceil(3h))`.
    pub fn new(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::invalid("bandwidth", "must be > 0"));
        }
        Ok(Self {
            bandwidth,
            band_radius: default_band_radius(bandwidth),
        })
    }

    pub fn with_band_radius(bandwidth: f64, band_radius: usize) -> Result<Self> {
        let mut p = Self::new(bandwidth)?;
        if band_radius < 1 {
            return Err(Error::invalid("band_radius", "must be >= 1"));
        }
        p.band_radius = band_radius;
        Ok(p)
    }

    /// Distance up to which a line pixel's kernel is summed into band pixels.
    pub fn kernel_reach(&self) -> usize {
        self.band_radius.max(math::ceil(4.0 * self.bandwidth) as usize)
    }

    /// `N_h(0)`, the peak of the 2D Gaussian.
    pub fn peak(&self) -> f64 {
        gaussian_peak(self.bandwidth)
    }

    /// `N_h(r)` for squared distance `r2`.
    pub fn gaussian(&self, r2: f64) -> f64 {
        gaussian(self.bandwidth, r2)
    }
}

pub fn default_band_radius(bandwidth: f64) -> usize {
    (math::ceil(3.0 * bandwidth) as usize).max(5)
}

pub fn gaussian_peak(h: f64) -> f64 {
    1.0 / (2.0 * PI * h * h)
}

pub fn gaussian(h: f64, r2: f64) -> f64 {
    gaussian_peak(h) * math::exp(-r2 / (2.0 * h * h))
}

/// One band pixel of a line's influence field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSample {
    /// Row-major pixel index.
    pub index: u32,
    /// Influence (density contribution) of the line at this pixel.
    pub value: f64,
    /// Tangent of the line at its nearest pixel (normalized sum on ties).
    pub tangent: Vec2,
    /// Euclidean distance to the nearest line pixel.
    pub dist: f64,
}

/// Sparse per-line density restricted to the line's band.
#[derive(Debug, Clone, PartialEq)]
pub struct LineField {
    pub line_id: u32,
    pub size: GridSize,
    /// Sorted by `index`.
    pub samples: Vec<BandSample>,
    /// Largest influence value in the band.
    pub peak: f64,
    /// `|P_l|`, the number of unique line pixels.
    pub pixel_count: usize,
}

impl LineField {
    pub fn get(&self, index: u32) -> Option<&BandSample> {
        self.samples
            .binary_search_by_key(&index, |s| s.index)
            .ok()
            .map(|i| &self.samples[i])
    }

    pub fn get_pixel(&self, p: Pixel) -> Option<&BandSample> {
        self.size.index(p).and_then(|i| self.get(i as u32))
    }

    /// Influence at `index`, zero outside the band.
    pub fn value(&self, index: u32) -> f64 {
        self.get(index).map_or(0.0, |s| s.value)
    }

    pub fn to_grid(&self) -> ScalarGrid {
        let mut grid = ScalarGrid::zeros(self.size);
        for s in &self.samples {
            grid.values[s.index as usize] = s.value;
        }
        grid
    }
}

/// Reusable per-thread working memory for [`line_density`].
#[derive(Debug, Clone, Default)]
pub struct FieldScratch {
    stamp: Vec<u32>,
    slot: Vec<u32>,
    generation: u32,
    indices: Vec<u32>,
    dist2: Vec<i64>,
    tangent_sum: Vec<Vec2>,
    tangent_first: Vec<Vec2>,
    values: Vec<f64>,
}

impl FieldScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, size: GridSize) {
        if self.stamp.len() != size.len() {
            self.stamp = vec![0; size.len()];
            self.slot = vec![0; size.len()];
            self.generation = 0;
        }
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        self.indices.clear();
        self.dist2.clear();
        self.tangent_sum.clear();
        self.tangent_first.clear();
        self.values.clear();
    }
}

fn disc(radius: usize) -> Vec<(i32, i32, i64)> {
    let r = radius as i32;
    let r2 = (radius * radius) as i64;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = (dx * dx + dy * dy) as i64;
            if d2 <= r2 {
                out.push((dx, dy, d2));
            }
        }
    }
    out
}

/// Builds the band-limited density (influence field) of one line.
pub fn line_density(
    line: &RasterizedLine,
    size: GridSize,
    params: &FieldParams,
    scratch: &mut FieldScratch,
) -> LineField {
    scratch.reset(size);
    let gen = scratch.generation;
    let band = disc(params.band_radius);
    let reach = params.kernel_reach();
    let kernel = disc(reach);
    let table: Vec<f64> = (0..=(reach * reach) as i64)
        .map(|d2| params.gaussian(d2 as f64))
        .collect();

    // Band membership and nearest line pixel.
    for (i, &p) in line.pixels.iter().enumerate() {
        let t = line.tangents[i];
        for &(dx, dy, d2) in &band {
            let q = Pixel::new(p.col + dx, p.row + dy);
            let Some(idx) = size.index(q) else { continue };
            if scratch.stamp[idx] != gen {
                scratch.stamp[idx] = gen;
                scratch.slot[idx] = scratch.indices.len() as u32;
                scratch.indices.push(idx as u32);
                scratch.dist2.push(d2);
                scratch.tangent_sum.push(t);
                scratch.tangent_first.push(t);
                scratch.values.push(0.0);
            } else {
                let s = scratch.slot[idx] as usize;
                if d2 < scratch.dist2[s] {
                    scratch.dist2[s] = d2;
                    scratch.tangent_sum[s] = t;
                    scratch.tangent_first[s] = t;
                } else if d2 == scratch.dist2[s] {
                    scratch.tangent_sum[s] += t;
                }
            }
        }
    }

    // Kernel sums restricted to the band.
    for (i, &p) in line.pixels.iter().enumerate() {
        let w = line.weights[i];
        for &(dx, dy, d2) in &kernel {
            let q = Pixel::new(p.col + dx, p.row + dy);
            let Some(idx) = size.index(q) else { continue };
            if scratch.stamp[idx] == gen {
                let s = scratch.slot[idx] as usize;
                scratch.values[s] += w * table[d2 as usize];
            }
        }
    }

    let mut samples: Vec<BandSample> = (0..scratch.indices.len())
        .map(|s| BandSample {
            index: scratch.indices[s],
            value: scratch.values[s],
            tangent: scratch.tangent_sum[s]
                .normalized()
                .unwrap_or(scratch.tangent_first[s]),
            dist: math::sqrt(scratch.dist2[s] as f64),
        })
        .collect();
    samples.sort_unstable_by_key(|s| s.index);
    let peak = samples.iter().map(|s| s.value).fold(0.0, f64::max);
    LineField {
        line_id: line.line_id,
        size,
        samples,
        peak,
        pixel_count: line.pixels.len(),
    }
}

/// Aggregate density `F` of a set of lines.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: ScalarGrid,
    pub bandwidth: f64,
    pub per_line_max: BTreeMap<u32, f64>,
}

impl DensityField {
    pub fn max(&self) -> f64 {
        self.grid.values.iter().copied().fold(0.0, f64::max)
    }

    /// A pixel is non-empty when at least one line contributes to it.
    pub fn is_empty_at(&self, index: usize) -> bool {
        self.grid.values[index] <= 0.0
    }
}

/// `F = sum of per-line fields`, accumulated in input order.
pub fn aggregate(fields: &[LineField], size: GridSize, bandwidth: f64) -> Result<DensityField> {
    let mut grid = ScalarGrid::zeros(size);
    let mut per_line_max = BTreeMap::new();
    for f in fields {
        crate::grid::check_size(f.size, size)?;
        for s in &f.samples {
            grid.values[s.index as usize] += s.value;
        }
        per_line_max.insert(f.line_id, f.peak);
    }
    Ok(DensityField {
        grid,
        bandwidth,
        per_line_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyline::Polyline;
    use crate::raster::rasterize;
    use alloc::vec;

    const SIZE: GridSize = GridSize::new(40, 40);

    fn field(pts: &[(f64, f64)], h: f64, band: usize) -> (RasterizedLine, LineField) {
        let l = Polyline::new(3, pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect(), None).unwrap();
        let r = rasterize(&l, SIZE, 3).unwrap();
        let p = FieldParams::with_band_radius(h, band).unwrap();
        let f = line_density(&r, SIZE, &p, &mut FieldScratch::new());
        (r, f)
    }

    #[test]
    fn single_pixel_kernel_values() {
        let (_, f) = field(&[(5.0, 5.0), (5.1, 5.0)], 1.0, 5);
        let n0 = 1.0 / (2.0 * PI);
        let at = |c, r| f.get_pixel(Pixel::new(c, r)).unwrap().value;
        assert!((at(5, 5) - n0).abs() < 1e-15);
        assert!((at(6, 5) - n0 * math::exp(-0.5)).abs() < 1e-15);
        assert!(f.get_pixel(Pixel::new(11, 5)).is_none());
    }

    #[test]
    fn default_band_radius_rule() {
        assert_eq!(default_band_radius(1.0), 5);
        assert_eq!(default_band_radius(2.0), 6);
        assert_eq!(default_band_radius(2.1), 7);
    }

    #[test]
    fn horizontal_line_is_symmetric_across() {
        let (_, f) = field(&[(5.0, 20.0), (24.0, 20.0)], 1.0, 5);
        let at = |c, r| f.get_pixel(Pixel::new(c, r)).map_or(0.0, |s| s.value);
        for d in 1..=5 {
            assert_eq!(at(14, 20 - d), at(14, 20 + d));
        }
    }

    #[test]
    fn band_stores_nearest_tangent_and_distance() {
        let (_, f) = field(&[(5.0, 20.0), (24.0, 20.0)], 1.0, 5);
        let s = f.get_pixel(Pixel::new(10, 23)).unwrap();
        assert_eq!(s.tangent, Vec2::new(1.0, 0.0));
        assert!((s.dist - 3.0).abs() < 1e-15);
    }

    #[test]
    fn aggregate_is_additive() {
        let (_, a) = field(&[(3.0, 3.0), (30.0, 12.0)], 1.0, 5);
        let (_, b) = field(&[(3.0, 30.0), (33.0, 4.0)], 1.0, 5);
        let both = aggregate(&[a.clone(), b.clone()], SIZE, 1.0).unwrap();
        let twice = aggregate(&[a.clone(), a.clone()], SIZE, 1.0).unwrap();
        let single = a.to_grid();
        for i in 0..SIZE.len() {
            assert_eq!(twice.grid.values[i], 2.0 * single.values[i]);
            let expect = a.value(i as u32) + b.value(i as u32);
            assert!((both.grid.values[i] - expect).abs() < 1e-15);
        }
        assert_eq!(both.per_line_max.len(), 1);
        assert_eq!(both.grid.values[SIZE.index(Pixel::new(39, 39)).unwrap()], 0.0);
    }

    #[test]
    fn scratch_reuse_matches_fresh() {
        let l1 = Polyline::new(1, vec![Vec2::new(2.0, 2.0), Vec2::new(30.0, 9.0)], None).unwrap();
        let l2 = Polyline::new(2, vec![Vec2::new(9.0, 35.0), Vec2::new(12.0, 3.0)], None).unwrap();
        let p = FieldParams::new(1.5).unwrap();
        let r1 = rasterize(&l1, SIZE, 3).unwrap();
        let r2 = rasterize(&l2, SIZE, 3).unwrap();
        let mut scratch = FieldScratch::new();
        let _ = line_density(&r1, SIZE, &p, &mut scratch);
        let reused = line_density(&r2, SIZE, &p, &mut scratch);
        let fresh = line_density(&r2, SIZE, &p, &mut FieldScratch::new());
        assert_eq!(reused, fresh);
    }
}
