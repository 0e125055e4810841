//! Parallel scene construction on a pool sized by `LINEGLOW_THREADS`.

use std::sync::OnceLock;

use lineglow_core::pipeline::rasterize_all;
use lineglow_core::{line_density, FieldScratch, LineField, Polyline, Scene, SceneConfig};
use rayon::prelude::*;

use crate::error::Result;

pub const THREADS_ENV: &str = "LINEGLOW_THREADS";

/// Worker count: `LINEGLOW_THREADS` when set to a positive integer,
/// otherwise the available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(thread_count())
            .thread_name(|i| format!("lineglow-{i}"))
            .build()
            .expect("thread pool")
    })
}

/// Influence fields of `lines`, in order.
pub fn build_fields(
    lines: &[lineglow_core::RasterizedLine],
    config: &SceneConfig,
) -> Result<Vec<LineField>> {
    let params = config.field_params()?;
    Ok(pool().install(|| {
        lines
            .par_iter()
            .map_init(FieldScratch::new, |scratch, l| {
                line_density(l, config.size, &params, scratch)
            })
            .collect()
    }))
}

/// Same result as [`Scene::build`], with per-line work spread over the pool.
pub fn build_scene(lines: &[Polyline], config: &SceneConfig) -> Result<Scene> {
    config.validate()?;
    let rasterized = rasterize_all(lines, config)?;
    let fields = build_fields(&rasterized, config)?;
    Ok(Scene::from_fields(config, rasterized, fields)?)
}
