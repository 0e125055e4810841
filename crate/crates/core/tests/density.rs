mod common;

use common::oracle;
use lineglow_core::density::gaussian_peak;
use lineglow_core::{
    aggregate, line_density, rasterize, FieldParams, FieldScratch, GridSize, Pixel, Polyline, Vec2,
};

fn line(id: u32, pts: &[(f64, f64)]) -> Polyline {
    Polyline::new(id, pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect(), None).unwrap()
}

#[test]
fn five_pixel_line_matches_direct_summation() {
    let size = GridSize::new(24, 24);
    let params = FieldParams::with_band_radius(2.0, 5).unwrap();
    let r = rasterize(&line(0, &[(3.0, 5.0), (7.0, 5.0)]), size, 3).unwrap();
    assert_eq!(r.len(), 5);
    let f = line_density(&r, size, &params, &mut FieldScratch::new());
    let p = Pixel::new(5, 10);
    let got = f.get_pixel(p).expect("in band").value;
    let want: f64 = (3..=7)
        .map(|c| {
            let d2 = ((c - 5) * (c - 5) + 25) as f64;
            0.2 * (-d2 / 8.0).exp() / (8.0 * std::f64::consts::PI)
        })
        .sum();
    assert!((got - want).abs() < 1e-3 * gaussian_peak(2.0), "{got} vs {want}");
    assert!((got - oracle::full_sum(&r, 2.0, p)).abs() < 1e-12);
}

#[test]
fn fields_match_oracle_on_polylines() {
    let size = GridSize::new(40, 32);
    let shapes: [&[(f64, f64)]; 4] = [
        &[(2.0, 3.0), (30.0, 20.0), (35.0, 4.0)],
        &[(10.0, 30.0), (10.0, 2.0)],
        &[(5.0, 5.0), (20.0, 25.0), (5.0, 25.0), (20.0, 5.0)],
        &[(0.0, 0.0), (39.0, 31.0)],
    ];
    for h in [0.7, 1.0, 1.8] {
        let params = FieldParams::new(h).unwrap();
        let mut scratch = FieldScratch::new();
        for (i, s) in shapes.iter().enumerate() {
            let r = rasterize(&line(i as u32, s), size, 3).unwrap();
            let f = line_density(&r, size, &params, &mut scratch);
            let o = oracle::band(&r, size, &params);
            assert_eq!(f.samples.len(), o.len(), "band size h={h} line {i}");
            for s in &f.samples {
                let want = &o[&(s.index as usize)];
                assert!((s.value - want.value).abs() < 1e-12);
                assert!((s.dist - want.dist).abs() < 1e-12);
                assert!((s.tangent.x - want.tangent.x).abs() < 1e-12);
                assert!((s.tangent.y - want.tangent.y).abs() < 1e-12);
                // Truncation at the kernel reach stays far below the peak.
                let full = oracle::full_sum(&r, h, size.pixel(s.index as usize));
                assert!((full - s.value).abs() < 1e-3 * f.peak.max(params.peak() * 1e-3));
            }
        }
    }
}

#[test]
fn far_region_is_zero_and_identical_lines_double() {
    let size = GridSize::new(64, 64);
    let params = FieldParams::new(1.0).unwrap();
    let r = rasterize(&line(0, &[(4.0, 4.0), (20.0, 10.0)]), size, 3).unwrap();
    let mut s = FieldScratch::new();
    let a = line_density(&r, size, &params, &mut s);
    let b = line_density(&r, size, &params, &mut s);
    let one = aggregate(std::slice::from_ref(&a), size, 1.0).unwrap();
    let two = aggregate(&[a, b], size, 1.0).unwrap();
    for (x, y) in one.grid.values.iter().zip(&two.grid.values) {
        assert_eq!(2.0 * x, *y);
    }
    assert_eq!(two.grid.at(60, 60), 0.0);
}
