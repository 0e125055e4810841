//! Direction-modulated line similarity and per-line outlierness.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::density::{line_density, FieldParams, FieldScratch, LineField};
use crate::error::{Error, Result};
use crate::geom::{GridSize, Vec2};
use crate::math;
use crate::raster::RasterizedLine;

/// Raw similarity of `other` to the line owning `field`: the mean over
/// `other`'s pixels of `|t_l . t_other| * L_l`, zero outside the band.
///
/// Not symmetric: the field belongs to the first line, the path to the
/// second.
pub fn similarity(field: &LineField, other: &RasterizedLine) -> f64 {
    if other.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for (&p, &t) in other.pixels.iter().zip(&other.tangents) {
        if let Some(s) = field.get_pixel(p) {
            sum += math::abs(s.tangent.dot(t)) * s.value;
        }
    }
    sum / other.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierEntry {
    pub line_id: u32,
    /// Outlierness in `[0, 1]`.
    pub score: f64,
    /// 0 is the strongest inlier.
    pub rank: usize,
    /// `rank / (n - 1)`.
    pub normalized: f64,
    /// Ids of lines with at least one pixel inside this line's band, sorted.
    pub neighbors: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierIndex {
    entries: Vec<OutlierEntry>,
    by_id: BTreeMap<u32, usize>,
}

impl OutlierIndex {
    /// Ranks `scores` ascending, ties broken by lower line id.
    pub fn from_scores(scores: Vec<(u32, f64, Vec<u32>)>) -> Result<Self> {
        let n = scores.len();
        if n < 2 {
            return Err(Error::TooFewLines(n));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            scores[a]
                .1
                .total_cmp(&scores[b].1)
                .then(scores[a].0.cmp(&scores[b].0))
        });
        let mut rank = vec![0usize; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let mut by_id = BTreeMap::new();
        let entries: Vec<OutlierEntry> = scores
            .into_iter()
            .enumerate()
            .map(|(i, (line_id, score, neighbors))| {
                by_id.insert(line_id, i);
                OutlierEntry {
                    line_id,
                    score,
                    rank: rank[i],
                    normalized: rank[i] as f64 / (n - 1) as f64,
                    neighbors,
                }
            })
            .collect();
        if by_id.len() != n {
            return Err(Error::invalid("line_id", "ids must be unique"));
        }
        Ok(Self { entries, by_id })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in input line order.
    pub fn entries(&self) -> &[OutlierEntry] {
        &self.entries
    }

    pub fn get(&self, line_id: u32) -> Option<&OutlierEntry> {
        self.by_id.get(&line_id).map(|&i| &self.entries[i])
    }

    pub fn score(&self, line_id: u32) -> Option<f64> {
        self.get(line_id).map(|e| e.score)
    }

    pub fn rank(&self, line_id: u32) -> Option<usize> {
        self.get(line_id).map(|e| e.rank)
    }

    pub fn normalized(&self, line_id: u32) -> Option<f64> {
        self.get(line_id).map(|e| e.normalized)
    }

    pub fn neighbors(&self, line_id: u32) -> Option<&[u32]> {
        self.get(line_id).map(|e| e.neighbors.as_slice())
    }

    /// Line ids from strongest inlier to strongest outlier.
    pub fn ranked(&self) -> Vec<u32> {
        let mut ids = vec![0u32; self.entries.len()];
        for e in &self.entries {
            ids[e.rank] = e.line_id;
        }
        ids
    }

    /// Counts of scores in `bins` equal-width bins over `[0, 1]`.
    pub fn histogram(&self, bins: usize) -> Vec<usize> {
        let mut counts = vec![0usize; bins];
        if bins == 0 {
            return counts;
        }
        for e in &self.entries {
            let b = ((e.score * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
        counts
    }
}

/// `1 - mean(sim / peak)` over `neighbor_count` neighbors, where `sim_sum`
/// is the summed raw similarity and `peak` the line's largest influence
/// value. Lines without neighbors score 1.
pub fn outlierness_score(sim_sum: f64, neighbor_count: usize, peak: f64) -> f64 {
    if neighbor_count == 0 || peak <= 0.0 {
        return 1.0;
    }
    (1.0 - sim_sum / (peak * neighbor_count as f64)).clamp(0.0, 1.0)
}

/// Outlierness of every line, building the influence fields first.
pub fn outlierness_all(
    lines: &[RasterizedLine],
    size: GridSize,
    params: &FieldParams,
) -> Result<OutlierIndex> {
    let mut scratch = FieldScratch::new();
    let fields: Vec<LineField> = lines
        .iter()
        .map(|l| line_density(l, size, params, &mut scratch))
        .collect();
    outlierness_from_fields(lines, &fields)
}

/// Outlierness from precomputed influence fields (`fields[i]` belongs to
/// `lines[i]`).
///
/// Every pixel keeps the list of lines passing through it with their
/// tangent and `1 / |P|`. Each line then makes one pass over its own band,
/// so the work is linear in the number of lines plus the number of
/// band/pixel contacts, never a loop over all line pairs.
pub fn outlierness_from_fields(
    lines: &[RasterizedLine],
    fields: &[LineField],
) -> Result<OutlierIndex> {
    let n = lines.len();
    if n < 2 {
        return Err(Error::TooFewLines(n));
    }
    if fields.len() != n {
        return Err(Error::invalid("fields", "one influence field per line required"));
    }
    let size = fields[0].size;

    // Per-pixel occupancy in CSR layout.
    let mut offsets = vec![0u32; size.len() + 1];
    for line in lines {
        for &p in &line.pixels {
            if let Some(i) = size.index(p) {
                offsets[i + 1] += 1;
            }
        }
    }
    for i in 0..size.len() {
        offsets[i + 1] += offsets[i];
    }
    let total = offsets[size.len()] as usize;
    let mut cursor: Vec<u32> = offsets[..size.len()].to_vec();
    let mut owner = vec![0u32; total];
    let mut tangent = vec![Vec2::ZERO; total];
    let mut inv_len = vec![0.0f64; total];
    for (li, line) in lines.iter().enumerate() {
        let w = 1.0 / line.len().max(1) as f64;
        for (&p, &t) in line.pixels.iter().zip(&line.tangents) {
            if let Some(i) = size.index(p) {
                let e = cursor[i] as usize;
                cursor[i] += 1;
                owner[e] = li as u32;
                tangent[e] = t;
                inv_len[e] = w;
            }
        }
    }

    let mut seen = vec![u32::MAX; n];
    let mut scores = Vec::with_capacity(n);
    let mut neighbors = Vec::new();
    for (li, field) in fields.iter().enumerate() {
        let me = li as u32;
        let mut sum = 0.0;
        neighbors.clear();
        for s in &field.samples {
            let range = offsets[s.index as usize] as usize..offsets[s.index as usize + 1] as usize;
            if range.is_empty() {
                continue;
            }
            let mut acc = 0.0;
            for e in range {
                let other = owner[e];
                if other == me {
                    continue;
                }
                acc += math::abs(s.tangent.dot(tangent[e])) * inv_len[e];
                if seen[other as usize] != me {
                    seen[other as usize] = me;
                    neighbors.push(lines[other as usize].line_id);
                }
            }
            sum += s.value * acc;
        }
        let score = outlierness_score(sum, neighbors.len(), field.peak);
        let mut ids = neighbors.clone();
        ids.sort_unstable();
        scores.push((lines[li].line_id, score, ids));
    }
    OutlierIndex::from_scores(scores)
}
