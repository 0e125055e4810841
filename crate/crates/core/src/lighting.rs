//! Per-bin light directions and the diffuse intensity map.
//!
//! Angles follow the image convention: the grid is y-down, azimuth is
//! measured counter-clockwise from +x as seen on screen, so 90 degrees
//! points up and 135 degrees is the top-left corner.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::density::LineField;
use crate::error::{Error, Result};
use crate::geom::{GridSize, Vec2, Vec3};
use crate::grid::{check_size, NormalGrid, ScalarGrid};
use crate::math;
use crate::normals::HighFreqMap;
use crate::params::{ClusterLight, Lighting};
use crate::raster::check_kernel;

pub const ADAPTIVE_ELEVATION_DEG: f64 = 60.0;
pub const DEFAULT_AZIMUTH_DEG: f64 = 135.0;

/// Unit light vector for an azimuth/elevation pair in degrees.
pub fn light_from_angles(azimuth: f64, elevation: f64) -> Vec3 {
    let (az, el) = (math::to_radians(azimuth), math::to_radians(elevation));
    let ce = math::cos(el);
    Vec3::new(ce * math::cos(az), -ce * math::sin(az), math::sin(el))
}

/// The global default light used on empty bins.
pub fn default_light() -> Vec3 {
    light_from_angles(DEFAULT_AZIMUTH_DEG, ADAPTIVE_ELEVATION_DEG)
}

/// Light striking `dominant` at a right angle: the +90 degree rotation of
/// the dominant orientation, lifted to 60 degrees of elevation.
pub fn light_perpendicular(dominant: Vec2) -> Vec3 {
    let el = math::to_radians(ADAPTIVE_ELEVATION_DEG);
    let h = dominant.perp() * math::cos(el);
    Vec3::new(h.x, h.y, math::sin(el))
}

/// Weighted orientation tensor `sum w t t^T` plus the weighted mean tangent.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OrientationTensor {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
    pub mean: Vec2,
    pub weight: f64,
}

impl OrientationTensor {
    pub fn add(&mut self, t: Vec2, w: f64) {
        self.xx += w * t.x * t.x;
        self.xy += w * t.x * t.y;
        self.yy += w * t.y * t.y;
        self.mean += t * w;
        self.weight += w;
    }

    pub fn merge(&mut self, other: &Self) {
        self.xx += other.xx;
        self.xy += other.xy;
        self.yy += other.yy;
        self.mean += other.mean;
        self.weight += other.weight;
    }

    /// Principal eigenvector with its sign aligned to the weighted mean, or
    /// `None` when the total weight is zero.
    pub fn dominant(&self) -> Option<Vec2> {
        if !(self.weight > 0.0) {
            return None;
        }
        let (a, b, c) = (self.xx, self.xy, self.yy);
        let half = 0.5 * (a - c);
        let lambda = 0.5 * (a + c) + math::hypot(half, b);
        let v1 = Vec2::new(lambda - c, b);
        let v2 = Vec2::new(b, lambda - a);
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        let d = v.normalized().unwrap_or(if a >= c {
            Vec2::new(1.0, 0.0)
        } else {
            Vec2::new(0.0, 1.0)
        });
        let align = d.dot(self.mean);
        let tol = 1e-12 * self.weight;
        let flip = if align > tol {
            false
        } else if align < -tol {
            true
        } else {
            d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)
        };
        Some(if flip { -d } else { d })
    }
}

/// Dominant orientation of a set of `(tangent, weight)` samples.
pub fn dominant_orientation(samples: impl IntoIterator<Item = (Vec2, f64)>) -> Option<Vec2> {
    let mut t = OrientationTensor::default();
    for (tangent, w) in samples {
        t.add(tangent, w);
    }
    t.dominant()
}

/// Per-pixel dominant orientation from all lines' band samples in a
/// `kernel_n x kernel_n` window, weighted by influence.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationField {
    pub size: GridSize,
    pub dominant: Vec<Option<Vec2>>,
}

impl OrientationField {
    pub fn build(fields: &[LineField], size: GridSize, kernel_n: usize) -> Result<Self> {
        check_kernel(kernel_n)?;
        let mut acc = vec![OrientationTensor::default(); size.len()];
        for f in fields {
            check_size(f.size, size)?;
            for s in &f.samples {
                if s.value > 0.0 {
                    acc[s.index as usize].add(s.tangent, s.value);
                }
            }
        }
        let summed = box_sum(&acc, size, kernel_n / 2);
        Ok(Self {
            size,
            dominant: summed.iter().map(OrientationTensor::dominant).collect(),
        })
    }
}

fn box_sum(acc: &[OrientationTensor], size: GridSize, r: usize) -> Vec<OrientationTensor> {
    if r == 0 {
        return acc.to_vec();
    }
    let (w, h) = (size.width, size.height);
    let mut rows = vec![OrientationTensor::default(); acc.len()];
    for y in 0..h {
        for x in 0..w {
            let out = &mut rows[y * w + x];
            for xx in x.saturating_sub(r)..=(x + r).min(w - 1) {
                out.merge(&acc[y * w + xx]);
            }
        }
    }
    let mut cols = vec![OrientationTensor::default(); acc.len()];
    for y in 0..h {
        for x in 0..w {
            let mut out = OrientationTensor::default();
            for yy in y.saturating_sub(r)..=(y + r).min(h - 1) {
                out.merge(&rows[yy * w + x]);
            }
            cols[y * w + x] = out;
        }
    }
    cols
}

/// Per-pixel light vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LightField {
    pub size: GridSize,
    pub directions: Vec<Vec3>,
    /// Orientation the light was made perpendicular to; `None` on empty bins.
    pub dominant: Vec<Option<Vec2>>,
    pub mode: Lighting,
    /// Light used on empty bins, which fixes `I_empty`.
    pub empty_light: Vec3,
}

/// Builds the light field.
///
/// High-frequency pixels take the contributor's tangent as dominant
/// orientation, the rest take the windowed wPCA orientation. `pixel_clusters`
/// is required for [`Lighting::PerClusterManual`]; clusters without an
/// entry in `cluster_lights` stay adaptive.
pub fn light_field(
    high: &HighFreqMap,
    orientation: &OrientationField,
    lighting: &Lighting,
    cluster_lights: &BTreeMap<u32, ClusterLight>,
    pixel_clusters: Option<&[Option<u32>]>,
) -> Result<LightField> {
    let size = orientation.size;
    check_size(high.normals.size, size)?;
    let empty_light = match *lighting {
        Lighting::FixedGlobal { azimuth, elevation } => light_from_angles(azimuth, elevation),
        _ => default_light(),
    };
    if matches!(lighting, Lighting::PerClusterManual) {
        match pixel_clusters {
            Some(c) if c.len() == size.len() => {}
            _ => {
                return Err(Error::invalid(
                    "lighting",
                    "per-cluster lighting needs cluster labels",
                ))
            }
        }
        for light in cluster_lights.values() {
            light.validate()?;
        }
    }
    let manual: BTreeMap<u32, Vec3> = cluster_lights
        .iter()
        .map(|(&c, l)| (c, light_from_angles(l.clamped_azimuth(), l.elevation)))
        .collect();

    let mut directions = Vec::with_capacity(size.len());
    let mut dominant = Vec::with_capacity(size.len());
    for idx in 0..size.len() {
        let d = if high.contributor(idx).is_some() {
            high.tangents[idx].normalized().or(orientation.dominant[idx])
        } else {
            orientation.dominant[idx]
        };
        dominant.push(d);
        let light = match *lighting {
            Lighting::FixedGlobal { .. } => empty_light,
            Lighting::Adaptive => d.map_or(empty_light, light_perpendicular),
            Lighting::PerClusterManual => {
                let cluster = pixel_clusters.and_then(|c| c[idx]);
                match (d, cluster.and_then(|c| manual.get(&c))) {
                    (None, _) => empty_light,
                    (Some(_), Some(&l)) => l,
                    (Some(d), None) => light_perpendicular(d),
                }
            }
        };
        directions.push(light);
    }
    Ok(LightField {
        size,
        directions,
        dominant,
        mode: *lighting,
        empty_light,
    })
}

/// Diffuse intensity `I = n . l` with the anchors of the shading scale.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    pub grid: ScalarGrid,
    /// Intensity of a flat normal under the empty-bin light.
    pub i_empty: f64,
    pub i_min: f64,
}

pub fn intensity(normals: &NormalGrid, lights: &LightField) -> Result<IntensityMap> {
    check_size(normals.size, lights.size)?;
    let values: Vec<f64> = normals
        .normals
        .iter()
        .zip(&lights.directions)
        .map(|(n, l)| n.dot(*l))
        .collect();
    let grid = ScalarGrid {
        size: normals.size,
        values,
    };
    let i_min = grid.min();
    Ok(IntensityMap {
        grid,
        i_empty: Vec3::UP.dot(lights.empty_light),
        i_min,
    })
}
