//! PNG and raw-grid encoders.

use std::path::Path;

use lineglow_core::{ColorImage, GridSize, NormalGrid, Provenance, ScalarGrid};

use crate::error::{Error, Result};

fn encode(size: GridSize, color: png::ColorType, depth: png::BitDepth, palette: Option<Vec<u8>>, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, size.width as u32, size.height as u32);
        enc.set_color(color);
        enc.set_depth(depth);
        if let Some(p) = palette {
            enc.set_palette(p);
        }
        let mut writer = enc.write_header()?;
        writer.write_image_data(data)?;
        writer.finish()?;
    }
    Ok(out)
}

/// 8-bit RGB PNG of a color image.
pub fn rgb_png(image: &ColorImage) -> Result<Vec<u8>> {
    encode(image.size, png::ColorType::Rgb, png::BitDepth::Eight, None, &image.to_rgb_bytes())
}

/// Normals encoded as `(n + 1) / 2` per channel.
pub fn normals_png(normals: &NormalGrid) -> Result<Vec<u8>> {
    let q = |v: f64| ((v + 1.0) * 0.5 * 255.0).round().clamp(0.0, 255.0) as u8;
    let data: Vec<u8> = normals
        .normals
        .iter()
        .flat_map(|n| [q(n.x), q(n.y), q(n.z)])
        .collect();
    encode(normals.size, png::ColorType::Rgb, png::BitDepth::Eight, None, &data)
}

/// Palette index of a provenance: 0 empty, 1 low frequency, 2..=255 a
/// high-frequency line (`2 + id % 254`).
pub fn provenance_index(p: Provenance) -> u8 {
    match p {
        Provenance::Empty => 0,
        Provenance::LowFreq => 1,
        Provenance::HighFreq(id) => 2 + (id % 254) as u8,
    }
}

fn provenance_palette() -> Vec<u8> {
    let mut pal = vec![255, 255, 255, 160, 160, 160];
    for i in 0..254u32 {
        let h = (i as f64 * 137.507_764).rem_euclid(360.0);
        let (r, g, b) = hsv(h, 0.75, 0.9);
        pal.extend([r, g, b]);
    }
    pal
}

fn hsv(h: f64, s: f64, v: f64) -> (u8, u8, u8) {
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let q = |u: f64| ((u + m) * 255.0).round() as u8;
    (q(r), q(g), q(b))
}

/// Indexed PNG of the provenance layer.
pub fn provenance_png(normals: &NormalGrid) -> Result<Vec<u8>> {
    let data: Vec<u8> = normals.provenance.iter().map(|&p| provenance_index(p)).collect();
    encode(
        normals.size,
        png::ColorType::Indexed,
        png::BitDepth::Eight,
        Some(provenance_palette()),
        &data,
    )
}

/// 16-bit greyscale PNG of a grid with values in `[-1, 1]`.
pub fn intensity_png(grid: &ScalarGrid) -> Result<Vec<u8>> {
    let data: Vec<u8> = grid
        .values
        .iter()
        .flat_map(|&v| {
            let q = ((v.clamp(-1.0, 1.0) + 1.0) * 0.5 * 65535.0).round() as u16;
            q.to_be_bytes()
        })
        .collect();
    encode(grid.size, png::ColorType::Grayscale, png::BitDepth::Sixteen, None, &data)
}

/// Row-major little-endian `f32` dump.
pub fn f32_grid(grid: &ScalarGrid) -> Vec<u8> {
    grid.values.iter().flat_map(|&v| (v as f32).to_le_bytes()).collect()
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Decodes an 8-bit RGB PNG into its size and raw bytes.
pub fn decode_rgb(bytes: &[u8]) -> Result<(GridSize, Vec<u8>)> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| Error::Usage(e.to_string()))?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf).map_err(|e| Error::Usage(e.to_string()))?;
    if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Usage("not an 8-bit RGB PNG".into()));
    }
    buf.truncate(info.buffer_size());
    Ok((GridSize::new(info.width as usize, info.height as usize), buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use lineglow_core::Vec3;

    #[test]
    fn rgb_round_trip() {
        let img = ColorImage {
            size: GridSize::new(2, 1),
            pixels: vec![[1, 2, 3], [250, 128, 0]],
            empty: vec![false, false],
            background: [255, 255, 255],
        };
        let (size, bytes) = decode_rgb(&rgb_png(&img).unwrap()).unwrap();
        assert_eq!(size, img.size);
        assert_eq!(bytes, img.to_rgb_bytes());
    }

    #[test]
    fn layers_encode() {
        let size = GridSize::new(3, 2);
        let mut n = NormalGrid::flat(size, Provenance::LowFreq);
        n.provenance[0] = Provenance::HighFreq(300);
        n.normals[1] = Vec3::new(-1.0, 0.0, 0.0);
        assert!(normals_png(&n).unwrap().starts_with(b"\x89PNG"));
        assert!(provenance_png(&n).unwrap().starts_with(b"\x89PNG"));
        assert_eq!(provenance_index(n.provenance[0]), 2 + 46);
        let g = ScalarGrid::filled(size, 0.5);
        assert!(intensity_png(&g).unwrap().starts_with(b"\x89PNG"));
        assert_eq!(f32_grid(&g).len(), 24);
        assert_eq!(&f32_grid(&g)[..4], &0.5f32.to_le_bytes());
    }
}
