//! End-to-end rendering.
//!
//! A [`Scene`] holds everything that depends only on the dataset, the grid,
//! the bandwidth and the kernel size: rasterized lines, influence fields,
//! the density field, the outlierness index and the windowed orientation
//! field. [`Scene::render`] runs the cheap, parameter-dependent remainder.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::colormap::{map_density, ColorImage, ColormapKind};
use crate::compose::{
    baseline_rgb_lambert, compose_luminance, scale_intensity, BaselineVariant, LightnessSpace,
};
use crate::density::{aggregate, line_density, DensityField, FieldParams, FieldScratch, LineField};
use crate::error::{Error, Result};
use crate::geom::GridSize;
use crate::grid::{NormalGrid, ScalarGrid};
use crate::lighting::{intensity, light_field, IntensityMap, LightField, OrientationField};
use crate::math;
use crate::normals::{compose, high_freq_normals, low_freq_normals, select_lines, HighFreqMap, Selection};
use crate::outlier::{outlierness_from_fields, OutlierIndex};
use crate::params::{RenderParams, ShadingSpace};
use crate::polyline::Polyline;
use crate::raster::{check_kernel, rasterize, RasterizedLine};

/// Dataset-level settings; changing any of them means rebuilding the scene.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SceneConfig {
    pub size: GridSize,
    pub bandwidth: f64,
    pub kernel_n: usize,
    /// Overrides the default band radius.
    pub band_radius: Option<usize>,
}

impl SceneConfig {
    pub fn new(size: GridSize, bandwidth: f64, kernel_n: usize) -> Self {
        Self {
            size,
            bandwidth,
            kernel_n,
            band_radius: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_kernel(self.kernel_n)?;
        if self.size.is_empty() {
            return Err(Error::invalid("size", "grid must not be empty"));
        }
        FieldParams::new(self.bandwidth)?;
        Ok(())
    }

    /// Field parameters. The default band is widened when needed so that
    /// every footprint pixel lies inside its line's band.
    pub fn field_params(&self) -> Result<FieldParams> {
        let mut p = FieldParams::new(self.bandwidth)?;
        let half = (self.kernel_n / 2) as f64;
        let footprint_reach = math::ceil(half * core::f64::consts::SQRT_2) as usize;
        p.band_radius = match self.band_radius {
            Some(r) => r.max(1),
            None => p.band_radius.max(footprint_reach),
        };
        Ok(p)
    }
}

/// Selection and normal maps for one `(mu, sigma, eta)` setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    pub selection: Selection,
    pub low: NormalGrid,
    pub high: HighFreqMap,
    pub composed: NormalGrid,
}

/// Output of [`Scene::render`] with its intermediate layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Render {
    pub image: ColorImage,
    /// The unshaded density plot.
    pub base: ColorImage,
    pub structure: Structure,
    pub lights: LightField,
    pub intensity: IntensityMap,
    /// `I'`, the lightness shift.
    pub shift: ScalarGrid,
    pub gamut_clamped: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub config: SceneConfig,
    pub field_params: FieldParams,
    /// Lines with at least one pixel on the grid, in input order.
    pub lines: Vec<RasterizedLine>,
    pub fields: Vec<LineField>,
    pub density: DensityField,
    pub outliers: OutlierIndex,
    pub orientation: OrientationField,
    /// Cluster of the most influential line per pixel, when labels exist.
    pub pixel_clusters: Option<Vec<Option<u32>>>,
}

impl Scene {
    /// Rasterizes `lines` and builds all dataset-level state sequentially.
    pub fn build(lines: &[Polyline], config: &SceneConfig) -> Result<Self> {
        config.validate()?;
        let params = config.field_params()?;
        let rasterized = rasterize_all(lines, config)?;
        let mut scratch = FieldScratch::new();
        let fields = rasterized
            .iter()
            .map(|l| line_density(l, config.size, &params, &mut scratch))
            .collect();
        Self::from_fields(config, rasterized, fields)
    }

    /// Assembles a scene from lines and their influence fields (built, for
    /// example, in parallel by the caller with [`SceneConfig::field_params`]).
    pub fn from_fields(
        config: &SceneConfig,
        lines: Vec<RasterizedLine>,
        fields: Vec<LineField>,
    ) -> Result<Self> {
        config.validate()?;
        let field_params = config.field_params()?;
        if lines.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let density = aggregate(&fields, config.size, config.bandwidth)?;
        let outliers = outlierness_from_fields(&lines, &fields)?;
        let orientation = OrientationField::build(&fields, config.size, config.kernel_n)?;
        let pixel_clusters = if lines.iter().any(|l| l.cluster.is_some()) {
            Some(dominant_clusters(&lines, &fields, config.size))
        } else {
            None
        };
        Ok(Self {
            config: *config,
            field_params,
            lines,
            fields,
            density,
            outliers,
            orientation,
            pixel_clusters,
        })
    }

    pub fn size(&self) -> GridSize {
        self.config.size
    }

    /// Cluster labels present in the scene, ascending.
    pub fn clusters(&self) -> Vec<u32> {
        let mut c: Vec<u32> = self.lines.iter().filter_map(|l| l.cluster).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    fn check_params(&self, params: &RenderParams) -> Result<()> {
        params.validate()?;
        if params.kernel_n != self.config.kernel_n {
            return Err(Error::SceneMismatch {
                field: "kernel_n",
                scene: format!("{}", self.config.kernel_n),
                requested: format!("{}", params.kernel_n),
            });
        }
        if params.bandwidth != self.config.bandwidth {
            return Err(Error::SceneMismatch {
                field: "bandwidth",
                scene: format!("{}", self.config.bandwidth),
                requested: format!("{}", params.bandwidth),
            });
        }
        Ok(())
    }

    /// Density normalized by its maximum, the height field of the
    /// low-frequency normals.
    pub fn normalized_density(&self) -> ScalarGrid {
        let mut grid = self.density.grid.clone();
        let max = self.density.max();
        if max > 0.0 {
            for v in &mut grid.values {
                *v /= max;
            }
        }
        grid
    }

    pub fn structure(&self, params: &RenderParams) -> Result<Structure> {
        self.check_params(params)?;
        let selection = select_lines(&self.outliers, params.mu, params.sigma)?;
        let low = low_freq_normals(&self.normalized_density(), params.eta)?;
        let high = high_freq_normals(
            &selection,
            &self.lines,
            &self.fields,
            self.size(),
            params.effective_eta_high(),
        )?;
        let composed = compose(&low, &high.normals)?;
        Ok(Structure {
            selection,
            low,
            high,
            composed,
        })
    }

    pub fn lighting(&self, structure: &Structure, params: &RenderParams) -> Result<LightField> {
        light_field(
            &structure.high,
            &self.orientation,
            &params.lighting,
            &params.cluster_lights,
            self.pixel_clusters.as_deref(),
        )
    }

    /// The plain density plot.
    pub fn base_image(&self, params: &RenderParams) -> Result<ColorImage> {
        let cmap = params.build_colormap()?;
        map_density(&self.density, self.pixel_clusters.as_deref(), &cmap)
    }

    pub fn render(&self, params: &RenderParams) -> Result<Render> {
        let structure = self.structure(params)?;
        let lights = self.lighting(&structure, params)?;
        let intensity = intensity(&structure.composed, &lights)?;
        let base = self.base_image(params)?;
        let shift = scale_intensity(&intensity, params.phi)?;
        let (image, gamut_clamped) = match params.shading {
            ShadingSpace::LuminanceOnly => {
                let space = match params.build_colormap()?.kind {
                    ColormapKind::MultiHue => LightnessSpace::Lab,
                    ColormapKind::SingleHue(_) => LightnessSpace::Hcl,
                };
                let c = compose_luminance(&base, &shift, space)?;
                (c.image, c.gamut_clamped)
            }
            ShadingSpace::DirectRgbBaseline => (
                baseline_rgb_lambert(&base, &intensity, BaselineVariant::Direct)?,
                vec![false; base.pixels.len()],
            ),
        };
        Ok(Render {
            image,
            base,
            structure,
            lights,
            intensity,
            shift,
            gamut_clamped,
        })
    }
}

/// Rasterizes every line and drops the ones that miss the grid.
pub fn rasterize_all(lines: &[Polyline], config: &SceneConfig) -> Result<Vec<RasterizedLine>> {
    let mut out = Vec::with_capacity(lines.len());
    for line in lines {
        let r = rasterize(line, config.size, config.kernel_n)?;
        if !r.is_empty() {
            out.push(r);
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(out)
}

/// Per pixel, the cluster of the line with the largest influence there
/// (first line wins ties).
pub fn dominant_clusters(
    lines: &[RasterizedLine],
    fields: &[LineField],
    size: GridSize,
) -> Vec<Option<u32>> {
    let mut best = vec![0.0f64; size.len()];
    let mut out = vec![None; size.len()];
    for (line, field) in lines.iter().zip(fields) {
        for s in &field.samples {
            let i = s.index as usize;
            if s.value > best[i] {
                best[i] = s.value;
                out[i] = line.cluster;
            }
        }
    }
    out
}
