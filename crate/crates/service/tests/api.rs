use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use tower::ServiceExt;

use spherecut::evalkit::{make_phantom, PhantomSpec};
use spherecut::volume::{load_mask, save_volume};
use spherecut_service::rle;
use spherecut_service::server::{router, AppState, Meta, SegmentResponse, QUEUE_LIMIT};

fn state(spec: &PhantomSpec) -> Arc<AppState> {
    let (vol, _) = make_phantom(spec).unwrap();
    AppState::new(vol, "phantom.nii".into())
}

fn small() -> PhantomSpec {
    PhantomSpec { dims: [40, 36, 32], ..PhantomSpec::sphere(9.0) }
}

async fn send(app: axum::Router, req: Request<Body>) -> (StatusCode, Vec<u8>, Option<String>) {
    let res = app.oneshot(req).await.unwrap();
    let status = res.status();
    let ctype = res.headers().get("content-type").map(|v| v.to_str().unwrap().to_string());
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, body, ctype)
}

fn get(uri: &str) -> Request<Body> {
    Request::get(uri).body(Body::empty()).unwrap()
}

fn post_json(uri: &str, body: serde_json::Value) -> Request<Body> {
    Request::post(uri).header("content-type", "application/json").body(Body::from(body.to_string())).unwrap()
}

#[tokio::test]
async fn health_and_meta() {
    let st = state(&small());
    let (status, _, _) = send(router(st.clone(), None), get("/api/health")).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body, _) = send(router(st, None), get("/api/meta")).await;
    assert_eq!(status, StatusCode::OK);
    let meta: Meta = serde_json::from_slice(&body).unwrap();
    assert_eq!(meta.dims, [40, 36, 32]);
    assert_eq!(meta.spacing, [1.0; 3]);
    assert_eq!((meta.intensity_min, meta.intensity_max), (0.0, 200.0));
}

#[tokio::test]
async fn slices_are_png() {
    let st = state(&small());
    let (status, body, ctype) = send(router(st.clone(), None), get("/api/slice/axial/16?wc=100&ww=200")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ctype.as_deref(), Some("image/png"));
    let img = image::load_from_memory(&body).unwrap().to_luma8();
    assert_eq!(img.dimensions(), (40, 36));
    // disc in the middle, background at the corner
    assert_eq!(img.get_pixel(20, 18)[0], 255);
    assert_eq!(img.get_pixel(0, 0)[0], 0);

    let (_, body, _) = send(router(st.clone(), None), get("/api/slice/sagittal/3")).await;
    assert_eq!(image::load_from_memory(&body).unwrap().to_luma8().dimensions(), (36, 32));
    let (status, _, _) = send(router(st.clone(), None), get("/api/slice/axial/32")).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _, _) = send(router(st, None), get("/api/slice/oblique/3")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn out_of_bounds_seed_is_unprocessable() {
    let st = state(&small());
    let (status, body, _) = send(router(st.clone(), None), post_json("/api/segment", serde_json::json!({"seed_mm": [-3.0, 1.0, 1.0]}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let err: serde_json::Value = serde_json::from_slice(&body).unwrap();
    assert!(err["error"].as_str().unwrap().contains("outside"));
    let (status, _, _) = send(router(st, None), post_json("/api/segment", serde_json::json!({"seed_mm": [20.0, 18.0, 16.0], "delta_r": 80}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn full_queue_is_rejected() {
    let st = state(&small());
    let held: Vec<_> = (0..=QUEUE_LIMIT).map(|_| st.queue.try_admit().unwrap()).collect();
    let (status, _, _) = send(router(st.clone(), None), post_json("/api/segment", serde_json::json!({"seed_mm": [19.5, 17.5, 15.5]}))).await;
    assert_eq!(status, StatusCode::TOO_MANY_REQUESTS);
    drop(held);
    let (status, _, _) = send(router(st, None), post_json("/api/segment", serde_json::json!({"seed_mm": [19.5, 17.5, 15.5], "mesh_level": 2}))).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn segmentation_matches_the_cli() {
    let spec = PhantomSpec::sphere(20.0);
    let (vol, _) = make_phantom(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sphere.nii");
    save_volume(&vol, &input).unwrap();
    let c = vol.center();

    let st = AppState::new(vol, input.clone());
    let (status, body, _) = send(router(st.clone(), None), post_json("/api/segment", serde_json::json!({"seed_mm": [c.x, c.y, c.z]}))).await;
    assert_eq!(status, StatusCode::OK);
    let res: SegmentResponse = serde_json::from_slice(&body).unwrap();
    let api_mask = rle::decode(&res.mask_rle, 128 * 128 * 128).unwrap();
    assert_eq!(api_mask.iter().filter(|&&b| b).count(), res.voxel_count);
    assert!((res.volume_cm3 - 33.51).abs() / 33.51 < 0.02);

    let mask_path = dir.path().join("cli_mask.nii");
    let seed = format!("{},{},{}", c.x, c.y, c.z);
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_spherecut"))
        .args(["segment", "-i", input.to_str().unwrap(), "--seed", &seed, "-o", mask_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(load_mask(&mask_path).unwrap().data(), api_mask.as_slice());

    let (_, body, _) = send(router(st, None), get("/api/jobs")).await;
    let jobs: serde_json::Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(jobs[0]["job_id"], res.job_id);
    assert_eq!(jobs[0]["status"], "done");
}

#[tokio::test]
async fn static_files_are_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>viewer</html>").unwrap();
    let (status, body, _) = send(router(state(&small()), Some(dir.path())), get("/index.html")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<html>viewer</html>");
}
