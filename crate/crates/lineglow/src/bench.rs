//! Stage timings against line count.

use std::time::Instant;

use lineglow_core::lighting::{intensity, light_field, OrientationField};
use lineglow_core::outlier::outlierness_from_fields;
use lineglow_core::pipeline::rasterize_all;
use lineglow_core::stats::{linear_fit, median, LinearFit};
use lineglow_core::{GridSize, Polyline, RasterizedLine, RenderParams, Scene, SceneConfig};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::build_fields;
use crate::synth::random_walks;

pub const DEFAULT_COUNTS: [usize; 5] = [100, 500, 1000, 2000, 5000];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub size: GridSize,
    pub line_length: f64,
    pub segments: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            size: GridSize::new(512, 512),
            line_length: 120.0,
            segments: 8,
            repeats: 5,
            seed: 2024,
        }
    }
}

/// Median seconds per stage for one line count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub count: usize,
    /// Influence fields plus outlierness index.
    pub outlierness: f64,
    /// Selection, low- and high-frequency maps and their composition.
    pub normal_map: f64,
    /// Orientation field, light field and intensity.
    pub lighting: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub outlierness_fit: FitSummary,
    pub normal_map_fit: FitSummary,
    pub lighting_fit: FitSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl From<LinearFit> for FitSummary {
    fn from(f: LinearFit) -> Self {
        Self {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
        }
    }
}

impl ScalingReport {
    /// `t(2n) / t(n)` of the outlierness stage for every count whose double
    /// was also measured.
    pub fn doubling_ratios(&self) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter_map(|a| {
                let b = self.rows.iter().find(|b| b.count == 2 * a.count)?;
                Some((a.count, b.outlierness / a.outlierness))
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("count,outlierness_s,normal_map_s,lighting_s\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.6},{:.6},{:.6}\n", r.count, r.outlierness, r.normal_map, r.lighting));
        }
        out
    }
}

fn time<T>(f: impl FnOnce() -> Result<T>) -> Result<(f64, T)> {
    let start = Instant::now();
    let out = f()?;
    Ok((start.elapsed().as_secs_f64(), out))
}

fn scene_config(cfg: &BenchConfig) -> SceneConfig {
    let params = RenderParams::default();
    SceneConfig::new(cfg.size, params.bandwidth, params.kernel_n)
}

fn bench_lines(count: usize, cfg: &BenchConfig) -> Vec<Polyline> {
    random_walks(cfg.size, count, cfg.line_length, cfg.segments, cfg.seed ^ count as u64)
}

fn outlierness_once(raster: &[RasterizedLine], scene_cfg: &SceneConfig) -> Result<f64> {
    Ok(time(|| {
        let fields = build_fields(raster, scene_cfg)?;
        Ok(outlierness_from_fields(raster, &fields)?)
    })?
    .0)
}

/// Median outlierness-stage time for `count` random lines.
pub fn time_outlierness(count: usize, cfg: &BenchConfig) -> Result<f64> {
    let scene_cfg = scene_config(cfg);
    let raster = rasterize_all(&bench_lines(count, cfg), &scene_cfg)?;
    outlierness_once(&raster, &scene_cfg)?;
    let samples = (0..cfg.repeats)
        .map(|_| outlierness_once(&raster, &scene_cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(median(&samples))
}

/// Times every stage at every count.
///
/// Repeats run as rounds over all counts after one untimed warm-up round,
/// so slow stretches on a shared machine spread over the counts instead of
/// landing on one of them.
pub fn bench_scaling(counts: &[usize], cfg: &BenchConfig) -> Result<ScalingReport> {
    if counts.len() < 2 || counts.windows(2).any(|w| w[0] >= w[1]) || counts[0] < 2 {
        return Err(Error::Usage("counts must be at least two strictly increasing values >= 2".into()));
    }
    if cfg.repeats < 3 {
        return Err(Error::Usage("repeats must be >= 3".into()));
    }
    let scene_cfg = scene_config(cfg);
    let params = RenderParams::default();
    let mut inputs = Vec::with_capacity(counts.len());
    for &count in counts {
        let lines = bench_lines(count, cfg);
        let raster = rasterize_all(&lines, &scene_cfg)?;
        let scene = crate::parallel::build_scene(&lines, &scene_cfg)?;
        inputs.push((raster, scene));
    }
    let mut samples = vec![[Vec::new(), Vec::new(), Vec::new()]; counts.len()];
    for round in 0..=cfg.repeats {
        for ((raster, scene), out) in inputs.iter().zip(&mut samples) {
            let t_out = outlierness_once(raster, &scene_cfg)?;
            let (t_normal, structure) = time(|| Ok(scene.structure(&params)?))?;
            let (t_light, _) = time(|| lighting_stage(scene, &structure, &params))?;
            if round > 0 {
                out[0].push(t_out);
                out[1].push(t_normal);
                out[2].push(t_light);
            }
        }
    }
    let rows: Vec<ScalingRow> = counts
        .iter()
        .zip(&samples)
        .map(|(&count, s)| ScalingRow {
            count,
            outlierness: median(&s[0]),
            normal_map: median(&s[1]),
            lighting: median(&s[2]),
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.count as f64).collect();
    let fit = |f: fn(&ScalingRow) -> f64| -> Result<FitSummary> {
        let ys: Vec<f64> = rows.iter().map(f).collect();
        Ok(linear_fit(&xs, &ys)?.into())
    };
    Ok(ScalingReport {
        outlierness_fit: fit(|r| r.outlierness)?,
        normal_map_fit: fit(|r| r.normal_map)?,
        lighting_fit: fit(|r| r.lighting)?,
        rows,
    })
}

fn lighting_stage(
    scene: &Scene,
    structure: &lineglow_core::pipeline::Structure,
    params: &RenderParams,
) -> Result<lineglow_core::IntensityMap> {
    let orientation = OrientationField::build(&scene.fields, scene.size(), scene.config.kernel_n)?;
    let lights = light_field(
        &structure.high,
        &orientation,
        &params.lighting,
        &params.cluster_lights,
        scene.pixel_clusters.as_deref(),
    )?;
    Ok(intensity(&structure.composed, &lights)?)
}
