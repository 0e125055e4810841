use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom::{GridSize, Vec2};

/// An ordered polyline with at least two distinct consecutive vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub id: u32,
    pub vertices: Vec<Vec2>,
    pub cluster: Option<u32>,
}

impl Polyline {
    /// Drops consecutive duplicate vertices. Returns `None` when fewer than
    /// two distinct vertices remain or a coordinate is not finite.
    pub fn new(id: u32, vertices: Vec<Vec2>, cluster: Option<u32>) -> Option<Self> {
        let mut cleaned: Vec<Vec2> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !v.x.is_finite() || !v.y.is_finite() {
                return None;
            }
            if cleaned.last() != Some(&v) {
                cleaned.push(v);
            }
        }
        if cleaned.len() < 2 {
            return None;
        }
        Some(Self {
            id,
            vertices: cleaned,
            cluster,
        })
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self {
            id: self.id,
            vertices,
            cluster: self.cluster,
        }
    }

    pub fn map(&self, f: impl Fn(Vec2) -> Vec2) -> Self {
        Self {
            id: self.id,
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            cluster: self.cluster,
        }
    }
}

/// Uniform-scale letterbox fit from data units to pixel coordinates.
///
/// The data y axis points up, grid rows grow downward, so y is mirrored.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridTransform {
    pub scale: f64,
    pub offset_x: f64,
    pub offset_y: f64,
}

/// Default margin as a fraction of the shorter grid side.
pub const DEFAULT_MARGIN: f64 = 0.02;

impl GridTransform {
    #[inline]
    pub fn apply(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            self.offset_x + self.scale * p.x,
            self.offset_y - self.scale * p.y,
        )
    }

    /// Fits the bounding box of `lines` into `size` minus `margin`
    /// (fraction of the shorter side), preserving aspect ratio.
    pub fn fit(lines: &[Polyline], size: GridSize, margin: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&margin) {
            return Err(Error::invalid("margin", "must lie in [0, 0.5)"));
        }
        if size.width < 2 || size.height < 2 {
            return Err(Error::invalid("grid", "needs at least 2x2 pixels"));
        }
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in lines.iter().flat_map(|l| l.vertices.iter()) {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        if !min.x.is_finite() {
            return Err(Error::EmptyDataset);
        }
        let pad = margin * size.width.min(size.height) as f64;
        let avail_x = (size.width - 1) as f64 - 2.0 * pad;
        let avail_y = (size.height - 1) as f64 - 2.0 * pad;
        let extent = max - min;
        let sx = if extent.x > 0.0 { avail_x / extent.x } else { f64::INFINITY };
        let sy = if extent.y > 0.0 { avail_y / extent.y } else { f64::INFINITY };
        let scale = sx.min(sy);
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::EmptyDataset);
        }
        let center = Vec2::new(0.5 * (min.x + max.x), 0.5 * (min.y + max.y));
        Ok(Self {
            scale,
            offset_x: 0.5 * (size.width - 1) as f64 - scale * center.x,
            offset_y: 0.5 * (size.height - 1) as f64 + scale * center.y,
        })
    }
}

/// Maps every line into grid coordinates. Lines that collapse to a single
/// point after the transform are dropped.
pub fn fit_to_grid(
    lines: &[Polyline],
    size: GridSize,
    margin: f64,
) -> Result<(Vec<Polyline>, GridTransform)> {
    let transform = GridTransform::fit(lines, size, margin)?;
    let mapped: Vec<Polyline> = lines
        .iter()
        .filter_map(|l| {
            Polyline::new(
                l.id,
                l.vertices.iter().map(|&v| transform.apply(v)).collect(),
                l.cluster,
            )
        })
        .collect();
    if mapped.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((mapped, transform))
}
