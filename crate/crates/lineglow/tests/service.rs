use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use lineglow::export::{decode_rgb, rgb_png};
use lineglow::service::{router, Service};
use lineglow::synth;
use lineglow_core::polyline::{fit_to_grid, DEFAULT_MARGIN};
use lineglow_core::{GridSize, Polyline, RenderParams, Scene, SceneConfig};
use serde_json::Value;
use tower::ServiceExt;

const SIZE: GridSize = GridSize::new(120, 96);

fn lines() -> Vec<Polyline> {
    let raw = synth::corridor(SIZE, 48, 9);
    fit_to_grid(&raw, SIZE, DEFAULT_MARGIN).unwrap().0
}

fn app() -> (Arc<Service>, Router) {
    let svc = Service::new(lines(), SIZE, RenderParams::default(), None).unwrap();
    (svc.clone(), router(svc))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_owned())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[tokio::test]
async fn meta_describes_the_scene() {
    let (_, app) = app();
    let (status, body) = call(&app, "GET", "/meta", None).await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["width"], 120);
    assert_eq!(v["height"], 96);
    assert_eq!(v["line_count"], 48);
    assert_eq!(v["clusters"], serde_json::json!([0, 1, 2, 3]));
    let hist = v["outlierness_histogram"].as_array().unwrap();
    assert_eq!(hist.len(), 20);
    assert_eq!(hist.iter().map(|h| h.as_u64().unwrap()).sum::<u64>(), 48);
    assert_eq!(v["epoch"], 0);
}

#[tokio::test]
async fn params_bump_the_epoch() {
    let (svc, app) = app();
    let (status, body) = call(&app, "POST", "/params", Some(r#"{"mu": 0.9}"#)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body)["epoch"], 1);
    assert_eq!(svc.epoch(), 1);
    let meta = json(&call(&app, "GET", "/meta", None).await.1);
    assert_eq!(meta["params"]["mu"], 0.9);
}

#[tokio::test]
async fn out_of_range_params_name_the_field() {
    let (svc, app) = app();
    for (body, field) in [
        (r#"{"phi": 5}"#, "phi"),
        (r#"{"mu": 1.5}"#, "mu"),
        (r#"{"kernel_n": 4}"#, "kernel_n"),
        (r#"{"sigma": "lots"}"#, "sigma"),
        (r#"{"gamma": 1}"#, "gamma"),
    ] {
        let (status, resp) = call(&app, "POST", "/params", Some(body)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(json(&resp)["field"], field, "{body}");
    }
    assert_eq!(svc.epoch(), 0);
}

#[tokio::test]
async fn sigma_zero_matches_a_low_frequency_render() {
    let (_, app) = app();
    call(&app, "POST", "/params", Some(r#"{"sigma": 0}"#)).await;
    let (status, png) = call(&app, "GET", "/render.png?epoch=1", None).await;
    assert_eq!(status, StatusCode::OK);

    let params = RenderParams {
        sigma: 0.0,
        ..RenderParams::default()
    };
    let scene = Scene::build(&lines(), &SceneConfig::new(SIZE, params.bandwidth, params.kernel_n)).unwrap();
    let r = scene.render(&params).unwrap();
    assert_eq!(r.structure.composed, r.structure.low);
    assert_eq!(png, rgb_png(&r.image).unwrap());
    let (size, _) = decode_rgb(&png).unwrap();
    assert_eq!(size, SIZE);
}

#[tokio::test]
async fn light_errors() {
    let (svc, app) = app();
    let (status, _) = call(&app, "POST", "/light", Some(r#"{"cluster": 9, "azimuth": 90, "sector": 30, "center": 90}"#)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, body) = call(&app, "POST", "/light", Some(r#"{"cluster": 2, "azimuth": 200, "sector": 30, "center": 150}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["field"], "azimuth");
    let (status, _) = call(&app, "POST", "/light", Some(r#"{"cluster": 2, "azimuth": 160, "elevation": 95, "sector": 30, "center": 150}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(svc.epoch(), 0);
}

#[tokio::test]
async fn light_switches_to_manual() {
    let (_, app) = app();
    let (status, body) = call(&app, "POST", "/light", Some(r#"{"cluster": 2, "azimuth": 170, "sector": 30, "center": 150}"#)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body)["epoch"], 1);
    let meta = json(&call(&app, "GET", "/meta", None).await.1);
    assert_eq!(meta["params"]["lighting"]["mode"], "per_cluster_manual");
    let (status, _) = call(&app, "GET", "/render.png?epoch=1", None).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn stale_epoch_conflicts() {
    let (_, app) = app();
    call(&app, "POST", "/params", Some(r#"{"eta": 2}"#)).await;
    for uri in ["/render.png?epoch=0", "/layers/normals.png?epoch=0", "/layers/intensity.png?epoch=7"] {
        assert_eq!(call(&app, "GET", uri, None).await.0, StatusCode::CONFLICT, "{uri}");
    }
    for uri in ["/render.png", "/layers/normals.png?epoch=1", "/layers/intensity.png"] {
        assert_eq!(call(&app, "GET", uri, None).await.0, StatusCode::OK, "{uri}");
    }
}

#[tokio::test]
async fn outlierness_survives_shading_changes() {
    let (svc, app) = app();
    for body in [
        r#"{"mu": 0.2}"#,
        r#"{"sigma": 0.9, "eta": 4}"#,
        r#"{"phi": -30}"#,
        r#"{"lighting": {"mode": "fixed_global", "azimuth": 45, "elevation": 50}}"#,
    ] {
        assert_eq!(call(&app, "POST", "/params", Some(body)).await.0, StatusCode::OK, "{body}");
    }
    call(&app, "POST", "/light", Some(r#"{"cluster": 0, "azimuth": 10, "sector": 20, "center": 0}"#)).await;
    assert_eq!(svc.scene_builds(), 1);
    call(&app, "POST", "/params", Some(r#"{"bandwidth": 1.5}"#)).await;
    assert_eq!(svc.scene_builds(), 2);
    call(&app, "POST", "/params", Some(r#"{"kernel_n": 9}"#)).await;
    assert_eq!(svc.scene_builds(), 3);
}

#[tokio::test]
async fn replayed_session_is_byte_identical() {
    let script = [
        ("POST", "/params", Some(r#"{"mu": 1.0, "sigma": 0.5}"#)),
        ("GET", "/render.png?epoch=1", None),
        ("POST", "/params", Some(r#"{"phi": -30}"#)),
        ("GET", "/layers/intensity.png", None),
        ("GET", "/meta", None),
    ];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let (_, app) = app();
        let mut replies = Vec::new();
        for (m, uri, body) in script {
            replies.push(call(&app, m, uri, body).await);
        }
        runs.push(replies);
    }
    assert!(runs[0].iter().all(|(s, _)| *s == StatusCode::OK));
    assert_eq!(runs[0], runs[1]);
}

#[tokio::test]
async fn ui_is_optional_and_sandboxed() {
    let (_, app) = app();
    assert_eq!(call(&app, "GET", "/ui", None).await.0, StatusCode::NOT_FOUND);

    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>hi</p>").unwrap();
    std::fs::write(dir.path().join("app.js"), "1").unwrap();
    let svc = Service::new(lines(), SIZE, RenderParams::default(), Some(dir.path().to_path_buf())).unwrap();
    let app = router(svc);
    let (status, body) = call(&app, "GET", "/ui", None).await;
    assert_eq!((status, body), (StatusCode::OK, b"<p>hi</p>".to_vec()));
    assert_eq!(call(&app, "GET", "/ui/app.js", None).await.0, StatusCode::OK);
    assert_eq!(call(&app, "GET", "/ui/../Cargo.toml", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/ui/missing.css", None).await.0, StatusCode::NOT_FOUND);
}
