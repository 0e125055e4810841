//! Structural normal map: density-gradient normals overlaid, by
//! prioritized replacement, with per-line normals of the lines selected
//! around the outlierness focus.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::density::LineField;
use crate::error::{Error, Result};
use crate::geom::{GridSize, Pixel, Vec2};
use crate::grid::{check_size, gradient_normal, NormalGrid, Provenance, ScalarGrid};
use crate::math;
use crate::outlier::OutlierIndex;
use crate::raster::RasterizedLine;

/// Lines chosen by focus `mu` and emphasis `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub mu: f64,
    pub sigma: f64,
    /// Ascending `delta`, ties by line id.
    pub selected: Vec<u32>,
    /// `|l' - mu|` for every line.
    pub delta: BTreeMap<u32, f64>,
}

impl Selection {
    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, line_id: u32) -> bool {
        self.selected.contains(&line_id)
    }
}

pub(crate) fn check_unit(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(field, "must lie in [0, 1]"))
    }
}

/// Selects the `round(sigma * n)` lines whose normalized rank is closest
/// to `mu`.
pub fn select_lines(index: &OutlierIndex, mu: f64, sigma: f64) -> Result<Selection> {
    check_unit("mu", mu)?;
    check_unit("sigma", sigma)?;
    let n = index.len();
    let mut order: Vec<(f64, u32)> = index
        .entries()
        .iter()
        .map(|e| (math::abs(e.normalized - mu), e.line_id))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let count = (math::floor(sigma * n as f64 + 0.5) as usize).min(n);
    Ok(Selection {
        mu,
        sigma,
        selected: order[..count].iter().map(|&(_, id)| id).collect(),
        delta: order.iter().map(|&(d, id)| (id, d)).collect(),
    })
}

fn check_eta(field: &'static str, eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, "must be > 0"))
    }
}

/// `normalize(-dF/dx, -dF/dy, 1/eta)` at every pixel.
pub fn low_freq_normals(field: &ScalarGrid, eta: f64) -> Result<NormalGrid> {
    check_eta("eta", eta)?;
    let size = field.size;
    let mut out = NormalGrid::flat(size, Provenance::LowFreq);
    for row in 0..size.height {
        for col in 0..size.width {
            out.normals[row * size.width + col] = gradient_normal(field.gradient(col, row), eta);
        }
    }
    Ok(out)
}

/// High-frequency normals over the union of selected footprints.
#[derive(Debug, Clone, PartialEq)]
pub struct HighFreqMap {
    /// `Provenance::HighFreq(id)` on covered pixels, `Empty` elsewhere.
    pub normals: NormalGrid,
    /// Contributor tangent at covered pixels, zero elsewhere.
    pub tangents: Vec<Vec2>,
}

impl HighFreqMap {
    pub fn empty(size: GridSize) -> Self {
        Self {
            normals: NormalGrid::flat(size, Provenance::Empty),
            tangents: vec![Vec2::ZERO; size.len()],
        }
    }

    pub fn contributor(&self, index: usize) -> Option<u32> {
        match self.normals.provenance[index] {
            Provenance::HighFreq(id) => Some(id),
            _ => None,
        }
    }

    pub fn covered(&self) -> usize {
        self.normals
            .provenance
            .iter()
            .filter(|p| matches!(p, Provenance::HighFreq(_)))
            .count()
    }
}

/// Gradient of `field / scale` at `p` with central differences, one-sided
/// on the grid border. Values outside the band are zero.
pub fn field_gradient(field: &LineField, p: Pixel, scale: f64) -> Vec2 {
    let size = field.size;
    let v = |c: i32, r: i32| -> f64 {
        size.index(Pixel::new(c, r))
            .map_or(0.0, |i| field.value(i as u32))
            / scale
    };
    let (c, r) = (p.col, p.row);
    let w = size.width as i32;
    let h = size.height as i32;
    let gx = if w < 2 {
        0.0
    } else if c == 0 {
        v(1, r) - v(0, r)
    } else if c == w - 1 {
        v(c, r) - v(c - 1, r)
    } else {
        0.5 * (v(c + 1, r) - v(c - 1, r))
    };
    let gy = if h < 2 {
        0.0
    } else if r == 0 {
        v(c, 1) - v(c, 0)
    } else if r == h - 1 {
        v(c, r) - v(c, r - 1)
    } else {
        0.5 * (v(c, r + 1) - v(c, r - 1))
    };
    Vec2::new(gx, gy)
}

/// Normal of a single line's peak-normalized influence field at `p`.
pub fn line_normal(field: &LineField, p: Pixel, eta_high: f64) -> crate::geom::Vec3 {
    let scale = if field.peak > 0.0 { field.peak } else { 1.0 };
    gradient_normal(field_gradient(field, p, scale), eta_high)
}

/// Builds the high-frequency map. `lines[i]` and `fields[i]` must describe
/// the same line.
///
/// Each covered pixel is owned by the selected line minimizing
/// `(delta, distance to the line, id)`; its normal comes from that line's
/// influence field alone, normalized by the line's peak.
pub fn high_freq_normals(
    selection: &Selection,
    lines: &[RasterizedLine],
    fields: &[LineField],
    size: GridSize,
    eta_high: f64,
) -> Result<HighFreqMap> {
    check_eta("eta_high", eta_high)?;
    if lines.len() != fields.len() {
        return Err(Error::invalid("fields", "one influence field per line required"));
    }
    let mut map = HighFreqMap::empty(size);
    if selection.is_empty() {
        return Ok(map);
    }
    let by_id: BTreeMap<u32, usize> = lines.iter().enumerate().map(|(i, l)| (l.line_id, i)).collect();

    const NONE: u32 = u32::MAX;
    let mut owner = vec![NONE; size.len()];
    let mut best = vec![(f64::INFINITY, f64::INFINITY, u32::MAX); size.len()];
    for &id in &selection.selected {
        let Some(&li) = by_id.get(&id) else {
            return Err(Error::invalid("selection", "selected line is not in the scene"));
        };
        check_size(fields[li].size, size)?;
        let delta = selection.delta.get(&id).copied().unwrap_or(f64::INFINITY);
        for &p in &lines[li].footprint {
            let Some(idx) = size.index(p) else { continue };
            let dist = fields[li]
                .get(idx as u32)
                .map_or_else(|| nearest_distance(&lines[li], p), |s| s.dist);
            let key = (delta, dist, id);
            let cur = best[idx];
            let better = key.0 < cur.0
                || (key.0 == cur.0 && (key.1 < cur.1 || (key.1 == cur.1 && key.2 < cur.2)));
            if better {
                best[idx] = key;
                owner[idx] = li as u32;
            }
        }
    }

    for (idx, &li) in owner.iter().enumerate() {
        if li == NONE {
            continue;
        }
        let li = li as usize;
        let p = size.pixel(idx);
        let field = &fields[li];
        map.normals.normals[idx] = line_normal(field, p, eta_high);
        map.normals.provenance[idx] = Provenance::HighFreq(lines[li].line_id);
        map.tangents[idx] = field
            .get(idx as u32)
            .map_or_else(|| nearest_tangent(&lines[li], p), |s| s.tangent);
    }
    Ok(map)
}

fn nearest_distance(line: &RasterizedLine, p: Pixel) -> f64 {
    line.pixels
        .iter()
        .map(|&q| q.dist2(p))
        .min()
        .map_or(f64::INFINITY, |d2| math::sqrt(d2 as f64))
}

fn nearest_tangent(line: &RasterizedLine, p: Pixel) -> Vec2 {
    line.pixels
        .iter()
        .zip(&line.tangents)
        .min_by_key(|(q, _)| q.dist2(p))
        .map_or(Vec2::new(1.0, 0.0), |(_, &t)| t)
}

/// Prioritized replacement: the high-frequency normal wherever one exists,
/// the low-frequency normal everywhere else.
pub fn compose(low: &NormalGrid, high: &NormalGrid) -> Result<NormalGrid> {
    check_size(low.size, high.size)?;
    let mut out = low.clone();
    for i in 0..out.normals.len() {
        match high.provenance[i] {
            Provenance::HighFreq(id) => {
                out.normals[i] = high.normals[i];
                out.provenance[i] = Provenance::HighFreq(id);
            }
            _ => out.provenance[i] = Provenance::LowFreq,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{line_density, FieldParams, FieldScratch};
    use crate::geom::Vec3;
    use crate::polyline::Polyline;
    use crate::raster::rasterize;

    fn index_of(normalized: &[f64]) -> OutlierIndex {
        // Scores in the same order as ranks produce the requested l'.
        OutlierIndex::from_scores(
            normalized
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as u32, v, Vec::new()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sigma_bounds() {
        let idx = index_of(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(select_lines(&idx, 0.3, 0.0).unwrap().is_empty());
        assert_eq!(select_lines(&idx, 0.3, 1.0).unwrap().selected.len(), 5);
        assert!(select_lines(&idx, 1.2, 0.5).is_err());
        assert!(select_lines(&idx, 0.5, -0.1).is_err());
    }

    #[test]
    fn selection_by_delta() {
        // l' = {0, .25, .5, .75, 1}, mu = .6, sigma = .4: deltas are
        // .6, .35, .1, .15, .4, so the two closest are l' = .5 and .75.
        let idx = index_of(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        let sel = select_lines(&idx, 0.6, 0.4).unwrap();
        assert_eq!(sel.selected, vec![2, 3]);
        assert!((sel.delta[&2] - 0.1).abs() < 1e-12);
        assert!((sel.delta[&3] - 0.15).abs() < 1e-12);
    }

    #[test]
    fn selection_tie_uses_line_id() {
        let idx = index_of(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        // mu = .5 ties .25 and .75 at delta .25.
        let sel = select_lines(&idx, 0.5, 0.6).unwrap();
        assert_eq!(sel.selected, vec![2, 1, 3]);
    }

    #[test]
    fn flat_field_normals_point_up() {
        let f = ScalarGrid::filled(GridSize::new(8, 6), 0.7);
        for eta in [0.5, 1.0, 3.0, 10.0] {
            let n = low_freq_normals(&f, eta).unwrap();
            assert!(n.normals.iter().all(|&v| v == Vec3::UP));
        }
    }

    #[test]
    fn ramp_normals_closed_form() {
        let f = ScalarGrid::from_fn(GridSize::new(9, 7), |c, _| c as f64);
        let n1 = low_freq_normals(&f, 1.0).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        for row in 1..6 {
            for col in 1..8 {
                let v = n1.at(col, row);
                assert!((v.x + s).abs() < 1e-12 && v.y.abs() < 1e-12 && (v.z - s).abs() < 1e-12);
            }
        }
        let n3 = low_freq_normals(&f, 3.0).unwrap();
        let z = (1.0 / 3.0) / math::sqrt(1.0 + 1.0 / 9.0);
        assert!((n3.at(4, 3).z - z).abs() < 1e-12);
        assert!(n3.at(4, 3).z < n1.at(4, 3).z);
        assert!(low_freq_normals(&f, 0.0).is_err());
    }

    fn scene(lines: &[Polyline], size: GridSize) -> (Vec<RasterizedLine>, Vec<LineField>) {
        let params = FieldParams::new(1.0).unwrap();
        let mut scratch = FieldScratch::new();
        let r: Vec<RasterizedLine> = lines.iter().map(|l| rasterize(l, size, 3).unwrap()).collect();
        let f = r.iter().map(|l| line_density(l, size, &params, &mut scratch)).collect();
        (r, f)
    }

    fn selection(ids: &[u32], deltas: &[(u32, f64)]) -> Selection {
        Selection {
            mu: 0.0,
            sigma: 1.0,
            selected: ids.to_vec(),
            delta: deltas.iter().copied().collect(),
        }
    }

    #[test]
    fn single_line_normals_mirror_across_crest() {
        let size = GridSize::new(40, 40);
        let l = Polyline::new(0, vec![Vec2::new(2.0, 20.0), Vec2::new(37.0, 20.0)], None).unwrap();
        let (r, f) = scene(&[l], size);
        let map = high_freq_normals(&selection(&[0], &[(0, 0.0)]), &r, &f, size, 3.0).unwrap();
        let up = map.normals.at(20, 19);
        let down = map.normals.at(20, 21);
        assert!((up.y + down.y).abs() < 1e-12 && (up.z - down.z).abs() < 1e-12);
        assert!(up.y < 0.0, "normal above the crest leans away from it");
        assert_eq!(map.normals.at(20, 20), Vec3::UP);
        assert_eq!(map.covered(), 38 * 3);
    }

    #[test]
    fn overlap_goes_to_smaller_delta() {
        let size = GridSize::new(40, 40);
        let a = Polyline::new(10, vec![Vec2::new(2.0, 20.0), Vec2::new(37.0, 20.0)], None).unwrap();
        let b = Polyline::new(11, vec![Vec2::new(20.0, 2.0), Vec2::new(20.0, 37.0)], None).unwrap();
        let (r, f) = scene(&[a, b], size);
        let sel = selection(&[11, 10], &[(10, 0.1), (11, 0.3)]);
        let map = high_freq_normals(&sel, &r, &f, size, 3.0).unwrap();
        for row in 19..=21 {
            for col in 19..=21 {
                assert_eq!(map.contributor(row * 40 + col), Some(10));
            }
        }
        assert_eq!(map.contributor(5 * 40 + 20), Some(11));
    }

    #[test]
    fn compose_rules() {
        let size = GridSize::new(6, 4);
        let low = low_freq_normals(&ScalarGrid::from_fn(size, |c, r| (c * r) as f64), 1.0).unwrap();
        let empty = HighFreqMap::empty(size);
        assert_eq!(compose(&low, &empty.normals).unwrap().normals, low.normals);

        let mut high = NormalGrid::flat(size, Provenance::Empty);
        for i in 0..size.len() {
            high.normals[i] = Vec3::new(0.6, 0.0, 0.8);
            if (i / 6 + i % 6) % 2 == 0 {
                high.provenance[i] = Provenance::HighFreq(1);
            }
        }
        let mixed = compose(&low, &high).unwrap();
        for i in 0..size.len() {
            let expect = if (i / 6 + i % 6) % 2 == 0 { high.normals[i] } else { low.normals[i] };
            assert_eq!(mixed.normals[i], expect);
        }
        high.provenance.iter_mut().for_each(|p| *p = Provenance::HighFreq(1));
        assert_eq!(compose(&low, &high).unwrap().normals, high.normals);
        assert!(compose(&low, &NormalGrid::flat(GridSize::new(3, 3), Provenance::Empty)).is_err());
    }
}
