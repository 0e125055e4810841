//! Color fidelity of the shading: mean CIEDE2000 against the unshaded plot.

use lineglow_core::compose::{baseline_rgb_lambert, mean_delta_e00, BaselineVariant};
use lineglow_core::stats::first_crossing;
use lineglow_core::{RenderParams, Scene, ShadingSpace};
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 3.0;

/// `0, -5, ..., -40`.
pub fn default_phis() -> Vec<f64> {
    (0..=8).map(|i| -5.0 * i as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityRow {
    pub phi: f64,
    /// Mean delta E 2000 of the luminance-only composition.
    pub ours: f64,
    /// Mean delta E 2000 of direct RGB Lambertian shading.
    pub baseline: f64,
    /// Share of non-empty pixels whose shifted color left the gamut.
    pub clamped_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub rows: Vec<FidelityRow>,
    pub threshold: f64,
    /// Interpolated `phi` where `ours` first reaches the threshold.
    pub crossing_phi: Option<f64>,
}

impl FidelityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi,ours,baseline,clamped_fraction\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.6},{:.6},{:.6}\n", r.phi, r.ours, r.baseline, r.clamped_fraction));
        }
        out
    }
}

/// Renders `scene` at every `phi` and measures both shadings against the
/// unshaded image over non-empty pixels. The baseline uses the same
/// intensity map as ours.
pub fn fidelity_sweep(scene: &Scene, params: &RenderParams, phis: &[f64], threshold: f64) -> Result<FidelityReport> {
    if phis.is_empty() {
        return Err(Error::Usage("at least one phi value required".into()));
    }
    let mut rows = Vec::with_capacity(phis.len());
    for &phi in phis {
        let p = RenderParams {
            phi,
            shading: ShadingSpace::LuminanceOnly,
            ..params.clone()
        };
        let render = scene.render(&p)?;
        let ours = mean_delta_e00(&render.base, &render.image)?;
        let baseline_img = baseline_rgb_lambert(&render.base, &render.intensity, BaselineVariant::Direct)?;
        let baseline = mean_delta_e00(&render.base, &baseline_img)?;
        let non_empty = render.base.non_empty_count().max(1);
        let clamped = render.gamut_clamped.iter().filter(|c| **c).count();
        rows.push(FidelityRow {
            phi,
            ours,
            baseline,
            clamped_fraction: clamped as f64 / non_empty as f64,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.phi).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ours).collect();
    Ok(FidelityReport {
        crossing_phi: first_crossing(&xs, &ys, threshold),
        rows,
        threshold,
    })
}
