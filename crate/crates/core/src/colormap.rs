//! Density to color.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::color::{gamut_limited, quantize_linear, linear_from_lab, Lch, Srgb};
use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::geom::GridSize;
use crate::math;

pub const WHITE: Srgb = [255, 255, 255];

/// Lightness range of single-hue maps, from faint to dense.
pub const SINGLE_HUE_LIGHTNESS: (f64, f64) = (88.0, 28.0);
/// Requested chroma of single-hue maps before gamut limiting.
pub const SINGLE_HUE_CHROMA: f64 = 45.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ColorStop {
    pub t: f64,
    pub color: Srgb,
}

impl ColorStop {
    pub const fn new(t: f64, color: Srgb) -> Self {
        Self { t, color }
    }
}

/// How density is normalized to `t` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DensityScale {
    /// `ln(1 + F) / ln(1 + F_max)`
    #[default]
    Log,
    /// `F / F_max`
    Linear,
}

impl DensityScale {
    pub fn normalize(self, f: f64, f_max: f64) -> f64 {
        if !(f_max > 0.0) || !(f > 0.0) {
            return 0.0;
        }
        let t = match self {
            Self::Log => math::ln_1p(f) / math::ln_1p(f_max),
            Self::Linear => f / f_max,
        };
        t.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColormapKind {
    MultiHue,
    /// Hue in degrees per cluster label.
    SingleHue(BTreeMap<u32, f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Colormap {
    pub kind: ColormapKind,
    pub stops: Vec<ColorStop>,
    pub scale: DensityScale,
}

/// Purple to yellow along the viridis hue path, with chroma held back so
/// every interpolated color can move 20 units of L down or 7 up and stay in
/// gamut.
const DEFAULT_STOPS: [Srgb; 7] = [
    [82, 67, 117],
    [75, 96, 142],
    [74, 126, 146],
    [94, 156, 144],
    [113, 187, 129],
    [163, 210, 107],
    [233, 225, 91],
];

impl Colormap {
    /// A multi-hue map from explicit stops. Stops must start at `t = 0`,
    /// end at `t = 1` and be non-decreasing.
    pub fn multi_hue(stops: Vec<ColorStop>) -> Result<Self> {
        if stops.len() < 2 {
            return Err(Error::invalid("stops", "at least two stops required"));
        }
        if stops.first().map(|s| s.t) != Some(0.0) || stops.last().map(|s| s.t) != Some(1.0) {
            return Err(Error::invalid("stops", "must cover t = 0 and t = 1"));
        }
        if stops.windows(2).any(|w| !(w[0].t <= w[1].t)) {
            return Err(Error::invalid("stops", "t must be non-decreasing"));
        }
        Ok(Self {
            kind: ColormapKind::MultiHue,
            stops,
            scale: DensityScale::default(),
        })
    }

    /// Seven-stop viridis-like map.
    pub fn default_multi_hue() -> Self {
        let n = DEFAULT_STOPS.len() - 1;
        let stops = DEFAULT_STOPS
            .iter()
            .enumerate()
            .map(|(i, &c)| ColorStop::new(i as f64 / n as f64, c))
            .collect();
        Self {
            kind: ColormapKind::MultiHue,
            stops,
            scale: DensityScale::default(),
        }
    }

    pub fn single_hue(hues: BTreeMap<u32, f64>) -> Self {
        Self {
            kind: ColormapKind::SingleHue(hues),
            stops: Vec::new(),
            scale: DensityScale::default(),
        }
    }

    /// Multi-hue lookup with linear interpolation of sRGB components.
    pub fn lookup(&self, t: f64) -> Srgb {
        let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
        let Some(first) = self.stops.first() else {
            return [0, 0, 0];
        };
        if t <= first.t {
            return first.color;
        }
        for w in self.stops.windows(2) {
            let (a, b) = (w[0], w[1]);
            if t <= b.t {
                if b.t == a.t {
                    return b.color;
                }
                let u = (t - a.t) / (b.t - a.t);
                let mix = |x: u8, y: u8| -> u8 {
                    math::round_half_up(x as f64 + u * (y as f64 - x as f64)).clamp(0.0, 255.0) as u8
                };
                return [
                    mix(a.color[0], b.color[0]),
                    mix(a.color[1], b.color[1]),
                    mix(a.color[2], b.color[2]),
                ];
            }
        }
        self.stops[self.stops.len() - 1].color
    }

    /// Single-hue lookup: lightness falls with density at a fixed hue.
    pub fn lookup_hue(t: f64, hue: Option<f64>) -> Srgb {
        let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
        let (l0, l1) = SINGLE_HUE_LIGHTNESS;
        let l = l0 + t * (l1 - l0);
        let lch = match hue {
            Some(h) => gamut_limited(Lch {
                l,
                c: SINGLE_HUE_CHROMA,
                h: math::rem_euclid(h, 360.0),
            }),
            None => Lch { l, c: 0.0, h: 0.0 },
        };
        quantize_linear(linear_from_lab(lch.to_lab()))
    }
}

/// An 8-bit sRGB image plus its empty-pixel mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    pub size: GridSize,
    pub pixels: Vec<Srgb>,
    pub empty: Vec<bool>,
    pub background: Srgb,
}

impl ColorImage {
    pub fn non_empty_count(&self) -> usize {
        self.empty.iter().filter(|e| !**e).count()
    }

    /// Raw `RGBRGB...` bytes, row-major.
    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.iter().copied()).collect()
    }
}

/// Colors the density field. `pixel_clusters` gives each pixel's cluster
/// and is required for single-hue maps.
pub fn map_density(
    field: &DensityField,
    pixel_clusters: Option<&[Option<u32>]>,
    cmap: &Colormap,
) -> Result<ColorImage> {
    let size = field.grid.size;
    let f_max = field.max();
    let hues = match &cmap.kind {
        ColormapKind::SingleHue(hues) => match pixel_clusters {
            Some(c) if c.len() == size.len() => Some((hues, c)),
            _ => {
                return Err(Error::invalid(
                    "colormap",
                    "single-hue colormap needs cluster labels",
                ))
            }
        },
        ColormapKind::MultiHue => None,
    };
    let mut pixels = Vec::with_capacity(size.len());
    let mut empty = Vec::with_capacity(size.len());
    for (idx, &f) in field.grid.values.iter().enumerate() {
        if field.is_empty_at(idx) {
            pixels.push(WHITE);
            empty.push(true);
            continue;
        }
        let t = cmap.scale.normalize(f, f_max);
        let color = match hues {
            None => cmap.lookup(t),
            Some((hues, clusters)) => {
                let hue = clusters[idx].and_then(|c| hues.get(&c).copied().or(Some(default_hue(c))));
                Colormap::lookup_hue(t, hue)
            }
        };
        pixels.push(color);
        empty.push(false);
    }
    Ok(ColorImage {
        size,
        pixels,
        empty,
        background: WHITE,
    })
}

/// Hue assigned to a cluster without an explicit one: golden-angle steps.
pub fn default_hue(cluster: u32) -> f64 {
    math::rem_euclid(20.0 + 137.507_764 * cluster as f64, 360.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ScalarGrid;
    use alloc::vec;

    fn field(values: Vec<f64>, w: usize, h: usize) -> DensityField {
        DensityField {
            grid: ScalarGrid {
                size: GridSize::new(w, h),
                values,
            },
            bandwidth: 1.0,
            per_line_max: BTreeMap::new(),
        }
    }

    #[test]
    fn endpoints() {
        let cmap = Colormap::default_multi_hue();
        assert_eq!(cmap.lookup(0.0), DEFAULT_STOPS[0]);
        assert_eq!(cmap.lookup(1.0), DEFAULT_STOPS[6]);
        assert_eq!(cmap.lookup(0.5), DEFAULT_STOPS[3]);
    }

    #[test]
    fn default_map_has_lightness_headroom() {
        use crate::color::{in_gamut, lab_from_srgb, Lab};
        let cmap = Colormap::default_multi_hue();
        for i in 0..=400 {
            let lab = lab_from_srgb(cmap.lookup(i as f64 / 400.0));
            for dl in [-20.0, 7.0] {
                let moved = Lab { l: lab.l + dl, ..lab };
                assert!(in_gamut(linear_from_lab(moved)), "t={} dl={dl}", i as f64 / 400.0);
            }
        }
    }

    #[test]
    fn interpolation() {
        let cmap = Colormap::multi_hue(vec![
            ColorStop::new(0.0, [0, 0, 0]),
            ColorStop::new(1.0, [200, 100, 50]),
        ])
        .unwrap();
        assert_eq!(cmap.lookup(0.5), [100, 50, 25]);
    }

    #[test]
    fn invalid_stops() {
        assert!(Colormap::multi_hue(vec![ColorStop::new(0.0, [0, 0, 0])]).is_err());
        assert!(Colormap::multi_hue(vec![ColorStop::new(0.1, [0, 0, 0]), ColorStop::new(1.0, [1, 1, 1])]).is_err());
        assert!(Colormap::multi_hue(vec![
            ColorStop::new(0.0, [0, 0, 0]),
            ColorStop::new(0.7, [0, 0, 0]),
            ColorStop::new(0.5, [0, 0, 0]),
            ColorStop::new(1.0, [1, 1, 1])
        ])
        .is_err());
    }

    #[test]
    fn zero_field_is_all_background() {
        let img = map_density(&field(vec![0.0; 6], 3, 2), None, &Colormap::default_multi_hue()).unwrap();
        assert!(img.empty.iter().all(|&e| e));
        assert!(img.pixels.iter().all(|&p| p == WHITE));
    }

    #[test]
    fn peak_gets_last_stop() {
        let img = map_density(&field(vec![0.0, 0.2, 3.0], 3, 1), None, &Colormap::default_multi_hue()).unwrap();
        assert_eq!(img.pixels[2], DEFAULT_STOPS[6]);
        assert!(img.empty[0] && !img.empty[1]);
    }

    #[test]
    fn log_scale_lifts_low_density() {
        assert!(DensityScale::Log.normalize(1.0, 10.0) > DensityScale::Linear.normalize(1.0, 10.0));
        assert_eq!(DensityScale::Log.normalize(10.0, 10.0), 1.0);
        assert_eq!(DensityScale::Linear.normalize(0.0, 0.0), 0.0);
    }

    #[test]
    fn single_hue_requires_clusters() {
        let cmap = Colormap::single_hue(BTreeMap::new());
        assert!(map_density(&field(vec![1.0], 1, 1), None, &cmap).is_err());
        let img = map_density(&field(vec![1.0], 1, 1), Some(&[Some(3)]), &cmap).unwrap();
        assert!(!img.empty[0]);
    }
}
