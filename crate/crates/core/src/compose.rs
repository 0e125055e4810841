//! Applying the intensity map to a colored density image.

use alloc::vec::Vec;

use crate::color::{
    encode_channel, gamut_limited, in_gamut, lab_from_linear, lab_from_srgb, linear_from_lab,
    Lab, Lch, Srgb,
};
use crate::colormap::ColorImage;
use crate::error::{Error, Result};
use crate::grid::{check_size, ScalarGrid};
use crate::lighting::IntensityMap;
use crate::math;

/// `I' = phi (I_empty - I) / (I_empty - I_min)`; all zeros when the
/// intensity map has no contrast below `I_empty`.
pub fn scale_intensity(map: &IntensityMap, phi: f64) -> Result<ScalarGrid> {
    if !(phi <= 0.0) {
        return Err(Error::invalid("phi", "must be <= 0"));
    }
    let span = map.i_empty - map.i_min;
    let mut out = ScalarGrid::zeros(map.grid.size);
    if span > 0.0 && phi != 0.0 {
        for (o, &i) in out.values.iter_mut().zip(&map.grid.values) {
            *o = phi * (map.i_empty - i) / span;
        }
    }
    Ok(out)
}

/// Color space in which the lightness shift is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LightnessSpace {
    /// CIELAB `L`; `a, b` are kept, channels clamped on the way back.
    Lab,
    /// Polar CIELAB; hue kept, chroma reduced when out of gamut.
    Hcl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Composite {
    pub image: ColorImage,
    /// Pixels whose shifted color had to be pulled into the sRGB gamut.
    pub gamut_clamped: Vec<bool>,
}

impl Composite {
    pub fn clamped_count(&self) -> usize {
        self.gamut_clamped.iter().filter(|c| **c).count()
    }
}

/// Adds `shift` to the lightness of every non-empty pixel.
pub fn compose_luminance(
    base: &ColorImage,
    shift: &ScalarGrid,
    space: LightnessSpace,
) -> Result<Composite> {
    check_size(base.size, shift.size)?;
    let mut image = base.clone();
    let mut gamut_clamped = alloc::vec![false; base.pixels.len()];
    #[allow(clippy::needless_range_loop)]
    for idx in 0..base.pixels.len() {
        let s = shift.values[idx];
        if base.empty[idx] || s == 0.0 {
            continue;
        }
        let lab = lab_from_srgb(base.pixels[idx]);
        let l = (lab.l + s).clamp(0.0, 100.0);
        let (color, clamped) = match space {
            LightnessSpace::Lab => encode_lab(Lab { l, ..lab }),
            LightnessSpace::Hcl => {
                let lch = Lch { l, ..lab.to_lch() };
                let limited = gamut_limited(lch);
                let (c, _) = encode_lab(limited.to_lab());
                (c, limited.c < lch.c)
            }
        };
        image.pixels[idx] = color;
        gamut_clamped[idx] = clamped;
    }
    Ok(Composite {
        image,
        gamut_clamped,
    })
}

/// Nearest 8-bit color to `lab` and whether `lab` was out of gamut.
///
/// In gamut, the eight floor/ceil neighbours of the exact encoded value are
/// compared in Lab and the closest wins, which keeps quantization drift in
/// `a, b` well below one unit. Out of gamut, channels are clamped.
pub fn encode_lab(lab: Lab) -> (Srgb, bool) {
    let linear = linear_from_lab(lab);
    if !in_gamut(linear) {
        return (crate::color::quantize_linear(linear), true);
    }
    let exact: [f64; 3] = core::array::from_fn(|k| encode_channel(linear[k].clamp(0.0, 1.0)) * 255.0);
    let lo: [u8; 3] = core::array::from_fn(|k| math::floor(exact[k]).clamp(0.0, 255.0) as u8);
    let mut best = (f64::INFINITY, [0u8; 3]);
    for mask in 0..8u8 {
        let cand: [u8; 3] = core::array::from_fn(|k| {
            let up = (mask >> k) & 1 == 1;
            if up {
                lo[k].saturating_add(1)
            } else {
                lo[k]
            }
        });
        let c = lab_from_linear(crate::color::linear_from_srgb(cand));
        let (dl, da, db) = (c.l - lab.l, c.a - lab.a, c.b - lab.b);
        let d = dl * dl + da * da + db * db;
        if d < best.0 {
            best = (d, cand);
        }
    }
    (best.1, false)
}

/// Variants of the direct RGB shading baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BaselineVariant {
    /// Each channel times `clamp(I, 0, 1)`.
    #[default]
    Direct,
    /// Each channel times `0.5 + 0.5 clamp(I, 0, 1)`.
    ScaledDarkening,
}

/// Lambertian shading applied straight to the sRGB channels.
pub fn baseline_rgb_lambert(
    base: &ColorImage,
    map: &IntensityMap,
    variant: BaselineVariant,
) -> Result<ColorImage> {
    check_size(base.size, map.grid.size)?;
    let mut out = base.clone();
    for (idx, px) in out.pixels.iter_mut().enumerate() {
        if base.empty[idx] {
            continue;
        }
        let i = map.grid.values[idx].clamp(0.0, 1.0);
        let k = match variant {
            BaselineVariant::Direct => i,
            BaselineVariant::ScaledDarkening => 0.5 + 0.5 * i,
        };
        for c in px.iter_mut() {
            *c = math::round_half_up(*c as f64 * k).clamp(0.0, 255.0) as u8;
        }
    }
    Ok(out)
}

/// Mean CIEDE2000 between two images over the pixels non-empty in `a`.
pub fn mean_delta_e00(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    check_size(a.size, b.size)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for idx in 0..a.pixels.len() {
        if a.empty[idx] {
            continue;
        }
        sum += crate::ciede2000::ciede2000(a.pixels[idx], b.pixels[idx]);
        n += 1;
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::GridSize;
    use alloc::vec;

    fn image(pixels: Vec<Srgb>) -> ColorImage {
        let n = pixels.len();
        ColorImage {
            size: GridSize::new(n, 1),
            pixels,
            empty: vec![false; n],
            background: [255, 255, 255],
        }
    }

    fn imap(values: Vec<f64>, i_empty: f64) -> IntensityMap {
        let grid = ScalarGrid {
            size: GridSize::new(values.len(), 1),
            values,
        };
        let i_min = grid.min();
        IntensityMap { grid, i_empty, i_min }
    }

    #[test]
    fn scaled_endpoints() {
        let m = imap(vec![0.8, 0.2, 0.5], 0.8);
        let s = scale_intensity(&m, -20.0).unwrap();
        assert_eq!(s.values[0], 0.0);
        assert!((s.values[1] + 20.0).abs() < 1e-12);
        assert!((s.values[2] + 10.0).abs() < 1e-12);
        let z = scale_intensity(&m, 0.0).unwrap();
        assert!(z.values.iter().all(|&v| v == 0.0));
        assert!(scale_intensity(&m, 1.0).is_err());
    }

    #[test]
    fn no_contrast_gives_zero() {
        let m = imap(vec![0.9, 0.95], 0.9);
        let s = scale_intensity(&m, -20.0).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_shift_is_identity() {
        let base = image(vec![[10, 20, 30], [200, 100, 0]]);
        let out = compose_luminance(&base, &ScalarGrid::zeros(base.size), LightnessSpace::Lab).unwrap();
        assert_eq!(out.image, base);
        assert_eq!(out.clamped_count(), 0);
    }

    #[test]
    fn grey_shift_keeps_chroma() {
        let base = image(vec![[128, 128, 128]]);
        let l0 = lab_from_srgb(base.pixels[0]).l;
        let out = compose_luminance(&base, &ScalarGrid::filled(base.size, -20.0), LightnessSpace::Lab).unwrap();
        let lab = lab_from_srgb(out.image.pixels[0]);
        assert!((lab.l - (l0 - 20.0)).abs() < 0.5, "{}", lab.l);
        assert!(lab.a.abs() < 0.5 && lab.b.abs() < 0.5);
        assert!(!out.gamut_clamped[0]);
    }

    #[test]
    fn empty_pixels_untouched() {
        let mut base = image(vec![[255, 255, 255], [90, 60, 30]]);
        base.empty[0] = true;
        let shift = ScalarGrid::filled(base.size, -30.0);
        let out = compose_luminance(&base, &shift, LightnessSpace::Lab).unwrap();
        assert_eq!(out.image.pixels[0], [255, 255, 255]);
        let m = imap(vec![0.0, 0.0], 0.8);
        let b = baseline_rgb_lambert(&base, &m, BaselineVariant::Direct).unwrap();
        assert_eq!(b.pixels, vec![[255, 255, 255], [0, 0, 0]]);
    }

    #[test]
    fn hcl_keeps_hue() {
        let base = image(vec![[40, 160, 60]]);
        let h0 = lab_from_srgb(base.pixels[0]).to_lch().h;
        let out = compose_luminance(&base, &ScalarGrid::filled(base.size, 35.0), LightnessSpace::Hcl).unwrap();
        let h1 = lab_from_srgb(out.image.pixels[0]).to_lch().h;
        assert!((h1 - h0).abs() < 1.5, "{h0} {h1}");
    }

    #[test]
    fn baseline_variants() {
        let base = image(vec![[200, 100, 50]]);
        let one = imap(vec![1.0], 0.8);
        assert_eq!(baseline_rgb_lambert(&base, &one, BaselineVariant::Direct).unwrap(), base);
        let half = imap(vec![0.5], 0.8);
        let d = baseline_rgb_lambert(&base, &half, BaselineVariant::Direct).unwrap();
        assert_eq!(d.pixels[0], [100, 50, 25]);
        let s = baseline_rgb_lambert(&base, &half, BaselineVariant::ScaledDarkening).unwrap();
        assert_eq!(s.pixels[0], [150, 75, 38]);
    }

    #[test]
    fn mean_delta_counts_non_empty_only() {
        let mut a = image(vec![[0, 0, 0], [255, 255, 255]]);
        a.empty[1] = true;
        let mut b = a.clone();
        b.pixels[1] = [0, 0, 0];
        assert_eq!(mean_delta_e00(&a, &b).unwrap(), 0.0);
    }
}
