//! Local HTTP service: loads a dataset once, keeps the outlierness index,
//! and re-renders on parameter changes.
//!
//! Renders are serialized by a single lock and always use the newest
//! parameter state; a render request for an epoch that is no longer
//! current answers 409.

use std::path::{Component, Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lineglow_core::{ClusterLight, Lighting, Polyline, RenderParams, Scene, SceneConfig};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::export::{intensity_png, normals_png, rgb_png};
use crate::parallel::build_scene;

pub const HISTOGRAM_BINS: usize = 20;
const DEFAULT_LIGHT_ELEVATION: f64 = 60.0;

struct Layers {
    epoch: u64,
    image: Bytes,
    normals: Bytes,
    intensity: Bytes,
}

struct Session {
    scene: Arc<Scene>,
    params: RenderParams,
    epoch: u64,
    layers: Option<Arc<Layers>>,
}

pub struct Service {
    lines: Vec<Polyline>,
    session: Mutex<Session>,
    render_lock: tokio::sync::Mutex<()>,
    scene_builds: AtomicUsize,
    ui_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    field: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            field: None,
        }
    }

    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
            field: Some(field.into()),
        }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

impl From<lineglow_core::Error> for ApiError {
    fn from(e: lineglow_core::Error) -> Self {
        match &e {
            lineglow_core::Error::InvalidParam { field, .. } => Self::field(*field, e.to_string()),
            _ => Self::internal(e),
        }
    }
}

impl From<crate::Error> for ApiError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Core(c) => c.into(),
            other => Self::internal(other),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = match self.field {
            Some(f) => json!({ "error": self.message, "field": f }),
            None => json!({ "error": self.message }),
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

impl Service {
    /// Builds the scene for `params` from grid-space `lines`.
    pub fn new(lines: Vec<Polyline>, size: lineglow_core::GridSize, params: RenderParams, ui_dir: Option<PathBuf>) -> crate::Result<Arc<Self>> {
        params.validate()?;
        let config = SceneConfig::new(size, params.bandwidth, params.kernel_n);
        let scene = build_scene(&lines, &config)?;
        Ok(Arc::new(Self {
            lines,
            session: Mutex::new(Session {
                scene: Arc::new(scene),
                params,
                epoch: 0,
                layers: None,
            }),
            render_lock: tokio::sync::Mutex::new(()),
            scene_builds: AtomicUsize::new(1),
            ui_dir,
        }))
    }

    /// How many times the dataset-level state (fields and outlierness
    /// index) has been computed.
    pub fn scene_builds(&self) -> usize {
        self.scene_builds.load(Ordering::SeqCst)
    }

    pub fn epoch(&self) -> u64 {
        self.session.lock().unwrap().epoch
    }

    fn snapshot(&self) -> (Arc<Scene>, RenderParams, u64, Option<Arc<Layers>>) {
        let s = self.session.lock().unwrap();
        (s.scene.clone(), s.params.clone(), s.epoch, s.layers.clone())
    }
}

pub fn router(service: Arc<Service>) -> Router {
    let mut r = Router::new()
        .route("/meta", get(meta))
        .route("/params", post(set_params))
        .route("/light", post(set_light))
        .route("/render.png", get(render_png))
        .route("/layers/normals.png", get(normals_layer))
        .route("/layers/intensity.png", get(intensity_layer));
    if service.ui_dir.is_some() {
        r = r.route("/ui", get(ui_index)).route("/ui/{*path}", get(ui_file));
    }
    r.with_state(service)
}

/// Serves until the process is stopped.
pub async fn serve(service: Arc<Service>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    axum::serve(listener, router(service)).await
}

async fn meta(State(svc): State<Arc<Service>>) -> Json<Value> {
    let (scene, params, epoch, _) = svc.snapshot();
    Json(json!({
        "width": scene.size().width,
        "height": scene.size().height,
        "line_count": scene.lines.len(),
        "clusters": scene.clusters(),
        "outlierness_histogram": scene.outliers.histogram(HISTOGRAM_BINS),
        "epoch": epoch,
        "params": params,
    }))
}

fn merge_params(current: &RenderParams, delta: &Value) -> ApiResult<RenderParams> {
    let Value::Object(delta) = delta else {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "expected a JSON object"));
    };
    let Value::Object(mut merged) = serde_json::to_value(current).map_err(ApiError::internal)? else {
        return Err(ApiError::internal("parameters did not serialize to an object"));
    };
    for (k, v) in delta {
        if !merged.contains_key(k) {
            return Err(ApiError::field(k.clone(), format!("unknown parameter `{k}`")));
        }
        merged.insert(k.clone(), v.clone());
    }
    let params: RenderParams = serde_json::from_value(Value::Object(merged)).map_err(|e| {
        let field = delta.keys().find(|k| {
            let mut one = Map::new();
            one.insert((*k).clone(), delta[*k].clone());
            serde_json::to_value(current)
                .ok()
                .and_then(|mut v| {
                    v.as_object_mut()?.extend(one);
                    serde_json::from_value::<RenderParams>(v).err()
                })
                .is_some()
        });
        match field {
            Some(f) => ApiError::field(f.clone(), e.to_string()),
            None => ApiError::new(StatusCode::BAD_REQUEST, e.to_string()),
        }
    })?;
    params.validate()?;
    Ok(params)
}

async fn set_params(State(svc): State<Arc<Service>>, body: Bytes) -> ApiResult<Json<Value>> {
    let delta: Value = serde_json::from_slice(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let _guard = svc.render_lock.lock().await;
    let (scene, current, _, _) = svc.snapshot();
    let params = merge_params(&current, &delta)?;
    let rebuilt = if params.kernel_n != scene.config.kernel_n || params.bandwidth != scene.config.bandwidth {
        let config = SceneConfig {
            bandwidth: params.bandwidth,
            kernel_n: params.kernel_n,
            ..scene.config
        };
        let svc2 = svc.clone();
        let scene = tokio::task::spawn_blocking(move || build_scene(&svc2.lines, &config))
            .await
            .map_err(ApiError::internal)??;
        svc.scene_builds.fetch_add(1, Ordering::SeqCst);
        Some(Arc::new(scene))
    } else {
        None
    };
    let mut s = svc.session.lock().unwrap();
    if let Some(scene) = rebuilt {
        s.scene = scene;
    }
    s.params = params;
    s.epoch += 1;
    s.layers = None;
    Ok(Json(json!({ "epoch": s.epoch })))
}

#[derive(Deserialize)]
struct LightRequest {
    cluster: u32,
    azimuth: f64,
    #[serde(default)]
    elevation: Option<f64>,
    /// Sector half-width in degrees.
    sector: f64,
    center: f64,
}

async fn set_light(State(svc): State<Arc<Service>>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: LightRequest = serde_json::from_slice(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let _guard = svc.render_lock.lock().await;
    let mut s = svc.session.lock().unwrap();
    if !s.scene.clusters().contains(&req.cluster) {
        return Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown cluster {}", req.cluster)));
    }
    let light = ClusterLight::new(
        req.center,
        req.sector,
        req.azimuth,
        req.elevation.unwrap_or(DEFAULT_LIGHT_ELEVATION),
    )?;
    s.params.cluster_lights.insert(req.cluster, light);
    s.params.lighting = Lighting::PerClusterManual;
    s.epoch += 1;
    s.layers = None;
    Ok(Json(json!({ "epoch": s.epoch })))
}

#[derive(Deserialize)]
struct EpochQuery {
    epoch: Option<u64>,
}

async fn layers(svc: &Arc<Service>, requested: Option<u64>) -> ApiResult<Arc<Layers>> {
    let _guard = svc.render_lock.lock().await;
    let (scene, params, epoch, cached) = svc.snapshot();
    if let Some(e) = requested {
        if e != epoch {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                format!("epoch {e} is not current (current is {epoch})"),
            ));
        }
    }
    if let Some(c) = cached.filter(|c| c.epoch == epoch) {
        return Ok(c);
    }
    let layers = tokio::task::spawn_blocking(move || -> crate::Result<Layers> {
        let r = scene.render(&params)?;
        Ok(Layers {
            epoch,
            image: rgb_png(&r.image)?.into(),
            normals: normals_png(&r.structure.composed)?.into(),
            intensity: intensity_png(&r.intensity.grid)?.into(),
        })
    })
    .await
    .map_err(ApiError::internal)??;
    let layers = Arc::new(layers);
    let mut s = svc.session.lock().unwrap();
    if s.epoch == epoch {
        s.layers = Some(layers.clone());
    }
    Ok(layers)
}

fn png_response(bytes: Bytes) -> Response {
    ([(header::CONTENT_TYPE, "image/png")], bytes).into_response()
}

async fn render_png(State(svc): State<Arc<Service>>, Query(q): Query<EpochQuery>) -> ApiResult<Response> {
    Ok(png_response(layers(&svc, q.epoch).await?.image.clone()))
}

async fn normals_layer(State(svc): State<Arc<Service>>, Query(q): Query<EpochQuery>) -> ApiResult<Response> {
    Ok(png_response(layers(&svc, q.epoch).await?.normals.clone()))
}

async fn intensity_layer(State(svc): State<Arc<Service>>, Query(q): Query<EpochQuery>) -> ApiResult<Response> {
    Ok(png_response(layers(&svc, q.epoch).await?.intensity.clone()))
}

async fn ui_index(State(svc): State<Arc<Service>>) -> ApiResult<Response> {
    serve_static(&svc, "index.html").await
}

async fn ui_file(State(svc): State<Arc<Service>>, UrlPath(path): UrlPath<String>) -> ApiResult<Response> {
    serve_static(&svc, &path).await
}

async fn serve_static(svc: &Service, rel: &str) -> ApiResult<Response> {
    let root = svc.ui_dir.as_ref().ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no ui"))?;
    let rel = Path::new(rel);
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "not found"));
    }
    let path = root.join(rel);
    let bytes = tokio::fs::read(&path)
        .await
        .map_err(|_| ApiError::new(StatusCode::NOT_FOUND, "not found"))?;
    let mime = match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("png") => "image/png",
        Some("svg") => "image/svg+xml",
        _ => "application/octet-stream",
    };
    Ok(([(header::CONTENT_TYPE, mime)], bytes).into_response())
}
