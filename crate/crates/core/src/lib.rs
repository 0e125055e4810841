//! Structure-aware, direction-adaptive illumination for line density plots.
//!
//! The crate is `no_std` (with `alloc`) and contains the whole numerical
//! pipeline: rasterization and curve density estimation, line outlierness,
//! structural normal maps, per-bin lighting, luminance-only color
//! composition and the CIEDE2000 color difference. File formats, PNG
//! encoding, the CLI and the local service live in the `lineglow` crate.
//!
//! A typical render goes through [`Scene`]:
//!
//! ```
//! use lineglow_core::{GridSize, Polyline, RenderParams, Scene, SceneConfig, Vec2};
//!
//! let lines: Vec<Polyline> = (0..4)
//!     .map(|i| {
//!         let y = 10.0 + 3.0 * i as f64;
//!         Polyline::new(i, vec![Vec2::new(4.0, y), Vec2::new(40.0, y + 1.0)], None).unwrap()
//!     })
//!     .collect();
//! let config = SceneConfig::new(GridSize::new(48, 32), 1.0, 3);
//! let scene = Scene::build(&lines, &config).unwrap();
//! let render = scene.render(&RenderParams::default()).unwrap();
//! assert_eq!(render.image.pixels.len(), 48 * 32);
//! ```
#![no_std]
#![forbid(unsafe_code)]
// Negated comparisons are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod ciede2000;
pub mod color;
pub mod colormap;
pub mod compose;
pub mod density;
mod error;
pub mod geom;
pub mod grid;
pub mod lighting;
mod math;
pub mod normals;
pub mod outlier;
pub mod params;
pub mod pipeline;
pub mod polyline;
pub mod raster;
pub mod stats;

pub use ciede2000::{ciede2000, delta_e00};
pub use color::{Lab, Lch, Srgb};
pub use colormap::{ColorImage, ColorStop, Colormap, DensityScale};
pub use density::{aggregate, line_density, DensityField, FieldParams, FieldScratch, LineField};
pub use error::{Error, Result};
pub use geom::{GridSize, Pixel, Vec2, Vec3};
pub use grid::{NormalGrid, Provenance, ScalarGrid};
pub use lighting::{IntensityMap, LightField, OrientationField};
pub use normals::{HighFreqMap, Selection};
pub use outlier::{outlierness_all, similarity, OutlierIndex};
pub use params::{ClusterLight, ColormapChoice, Lighting, RenderParams, ShadingSpace};
pub use pipeline::{Render, Scene, SceneConfig};
pub use polyline::{GridTransform, Polyline};
pub use raster::{rasterize, RasterizedLine};
