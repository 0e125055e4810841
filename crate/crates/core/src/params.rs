//! User-steerable render state.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::colormap::{ColorStop, Colormap, DensityScale};
use crate::error::{Error, Result};
use crate::math;
use crate::normals::check_unit;
use crate::raster::check_kernel;

/// Signed difference `a - b` of two azimuths in degrees, in `[-180, 180)`.
pub fn azimuth_offset(a: f64, b: f64) -> f64 {
    math::rem_euclid(a - b + 540.0, 360.0) - 180.0
}

/// A manual light for one cluster, constrained to a sector of azimuths
/// `center +- half_width` (degrees).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterLight {
    pub center: f64,
    pub half_width: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

impl ClusterLight {
    pub fn new(center: f64, half_width: f64, azimuth: f64, elevation: f64) -> Result<Self> {
        let light = Self {
            center,
            half_width,
            azimuth,
            elevation,
        };
        light.validate()?;
        Ok(light)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center.is_finite() && self.azimuth.is_finite()) {
            return Err(Error::invalid("azimuth", "must be finite"));
        }
        if !(0.0..=180.0).contains(&self.half_width) {
            return Err(Error::invalid("sector", "half-width must lie in [0, 180]"));
        }
        check_elevation(self.elevation)?;
        if !self.contains(self.azimuth) {
            return Err(Error::invalid("azimuth", "outside the cluster's sector"));
        }
        Ok(())
    }

    pub fn contains(&self, azimuth: f64) -> bool {
        math::abs(azimuth_offset(azimuth, self.center)) <= self.half_width + 1e-9
    }

    /// The configured azimuth pulled back into the sector.
    pub fn clamped_azimuth(&self) -> f64 {
        let off = azimuth_offset(self.azimuth, self.center).clamp(-self.half_width, self.half_width);
        math::rem_euclid(self.center + off, 360.0)
    }
}

fn check_elevation(elevation: f64) -> Result<()> {
    if elevation > 0.0 && elevation <= 90.0 {
        Ok(())
    } else {
        Err(Error::invalid("elevation", "must lie in (0, 90] degrees"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "mode", rename_all = "snake_case"))]
pub enum Lighting {
    /// Per-bin light perpendicular to the dominant line orientation.
    Adaptive,
    /// One light for the whole image (ablation baseline).
    FixedGlobal { azimuth: f64, elevation: f64 },
    /// Adaptive, except clusters with a configured [`ClusterLight`].
    PerClusterManual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ColormapChoice {
    MultiHue,
    SingleHuePerCluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ShadingSpace {
    /// Shift CIELAB L (or HCL lightness) only.
    LuminanceOnly,
    /// Multiply sRGB channels by the intensity (ablation baseline).
    DirectRgbBaseline,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RenderParams {
    /// Outlier focus on the normalized rank scale.
    pub mu: f64,
    /// Fraction of lines contributing high-frequency normals.
    pub sigma: f64,
    /// Low-frequency normal exaggeration.
    pub eta: f64,
    /// High-frequency normal exaggeration; `None` uses `eta`.
    pub eta_high: Option<f64>,
    /// Shading magnitude in L units, `<= 0`.
    pub phi: f64,
    pub kernel_n: usize,
    pub bandwidth: f64,
    pub colormap: ColormapChoice,
    pub density_scale: DensityScale,
    /// Custom multi-hue stops; `None` uses the built-in map.
    pub stops: Option<Vec<ColorStop>>,
    /// Hue in degrees per cluster for single-hue rendering.
    pub cluster_hues: BTreeMap<u32, f64>,
    pub lighting: Lighting,
    pub shading: ShadingSpace,
    pub cluster_lights: BTreeMap<u32, ClusterLight>,
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            mu: 0.5,
            sigma: 0.5,
            eta: 3.0,
            eta_high: None,
            phi: -20.0,
            kernel_n: 3,
            bandwidth: 1.0,
            colormap: ColormapChoice::MultiHue,
            density_scale: DensityScale::Log,
            stops: None,
            cluster_hues: BTreeMap::new(),
            lighting: Lighting::Adaptive,
            shading: ShadingSpace::LuminanceOnly,
            cluster_lights: BTreeMap::new(),
        }
    }
}

impl RenderParams {
    /// Checks every field; the error names the first offending one.
    pub fn validate(&self) -> Result<()> {
        check_unit("mu", self.mu)?;
        check_unit("sigma", self.sigma)?;
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid("eta", "must be > 0"));
        }
        if let Some(e) = self.eta_high {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::invalid("eta_high", "must be > 0"));
            }
        }
        if !(self.phi <= 0.0 && self.phi.is_finite()) {
            return Err(Error::invalid("phi", "must be a finite value <= 0"));
        }
        check_kernel(self.kernel_n)?;
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::invalid("bandwidth", "must be > 0"));
        }
        if let Some(stops) = &self.stops {
            Colormap::multi_hue(stops.clone())?;
        }
        if self.cluster_hues.values().any(|h| !h.is_finite()) {
            return Err(Error::invalid("cluster_hues", "hues must be finite"));
        }
        if let Lighting::FixedGlobal { azimuth, elevation } = self.lighting {
            if !azimuth.is_finite() {
                return Err(Error::invalid("azimuth", "must be finite"));
            }
            check_elevation(elevation)?;
        }
        for light in self.cluster_lights.values() {
            light.validate()?;
        }
        Ok(())
    }

    pub fn effective_eta_high(&self) -> f64 {
        self.eta_high.unwrap_or(self.eta)
    }

    /// Colormap described by these parameters.
    pub fn build_colormap(&self) -> Result<Colormap> {
        let mut cmap = match self.colormap {
            ColormapChoice::MultiHue => match &self.stops {
                Some(stops) => Colormap::multi_hue(stops.clone())?,
                None => Colormap::default_multi_hue(),
            },
            ColormapChoice::SingleHuePerCluster => Colormap::single_hue(self.cluster_hues.clone()),
        };
        cmap.scale = self.density_scale;
        Ok(cmap)
    }
}
