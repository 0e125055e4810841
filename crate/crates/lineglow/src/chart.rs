//! Minimal line charts drawn with the engine's own rasterizer.

use lineglow_core::colormap::WHITE;
use lineglow_core::{rasterize, ColorImage, GridSize, Polyline, Srgb, Vec2};

use crate::error::Result;
use crate::export::rgb_png;

pub struct Series {
    pub color: Srgb,
    pub points: Vec<(f64, f64)>,
}

pub struct Chart {
    pub size: GridSize,
    pub series: Vec<Series>,
    /// Horizontal reference line in data units.
    pub reference: Option<(f64, Srgb)>,
}

const PAD: f64 = 24.0;
const AXIS: Srgb = [60, 60, 60];
const GRID: Srgb = [225, 225, 225];

impl Chart {
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let ys = self.reference.iter().map(|r| r.0);
        for (x, y) in self.series.iter().flat_map(|s| s.points.iter().copied()) {
            b.0 = b.0.min(x);
            b.1 = b.1.max(x);
            b.2 = b.2.min(y);
            b.3 = b.3.max(y);
        }
        for y in ys {
            b.2 = b.2.min(y);
            b.3 = b.3.max(y);
        }
        b.2 = b.2.min(0.0);
        if !(b.1 > b.0) {
            b.1 = b.0 + 1.0;
        }
        if !(b.3 > b.2) {
            b.3 = b.2 + 1.0;
        }
        b
    }

    pub fn draw(&self) -> ColorImage {
        let size = self.size;
        let mut img = ColorImage {
            size,
            pixels: vec![WHITE; size.len()],
            empty: vec![false; size.len()],
            background: WHITE,
        };
        let (x0, x1, y0, y1) = self.bounds();
        let w = size.width as f64 - 1.0 - 2.0 * PAD;
        let h = size.height as f64 - 1.0 - 2.0 * PAD;
        let map = |x: f64, y: f64| Vec2::new(PAD + w * (x - x0) / (x1 - x0), PAD + h * (1.0 - (y - y0) / (y1 - y0)));

        for k in 1..5 {
            let y = y0 + (y1 - y0) * k as f64 / 5.0;
            stroke(&mut img, &[map(x0, y), map(x1, y)], GRID, 1);
        }
        if let Some((y, color)) = self.reference {
            stroke(&mut img, &[map(x0, y), map(x1, y)], color, 1);
        }
        stroke(&mut img, &[map(x0, y1), map(x0, y0), map(x1, y0)], AXIS, 1);
        for s in &self.series {
            let pts: Vec<Vec2> = s.points.iter().map(|&(x, y)| map(x, y)).collect();
            stroke(&mut img, &pts, s.color, 3);
            for &p in &pts {
                stroke(&mut img, &[p, p + Vec2::new(0.01, 0.0)], s.color, 5);
            }
        }
        img
    }

    pub fn png(&self) -> Result<Vec<u8>> {
        rgb_png(&self.draw())
    }
}

fn stroke(img: &mut ColorImage, pts: &[Vec2], color: Srgb, width: usize) {
    let Some(line) = Polyline::new(0, pts.to_vec(), None) else { return };
    let Ok(r) = rasterize(&line, img.size, width) else { return };
    for p in &r.footprint {
        if let Some(i) = img.size.index(*p) {
            img.pixels[i] = color;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_series_and_reference() {
        let chart = Chart {
            size: GridSize::new(200, 120),
            series: vec![Series {
                color: [200, 30, 30],
                points: vec![(0.0, 0.0), (-20.0, 2.0), (-40.0, 5.0)],
            }],
            reference: Some((3.0, [120, 120, 120])),
        };
        let img = chart.draw();
        assert!(img.pixels.contains(&[200, 30, 30]));
        assert!(img.pixels.contains(&[120, 120, 120]));
        assert!(chart.png().unwrap().starts_with(b"\x89PNG"));
    }
}
