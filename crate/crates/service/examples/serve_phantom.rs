//! Serves a generated sphere phantom over HTTP and runs one segmentation
//! request against it through the router.
//!
//! cargo run --example serve_phantom -- [port]
//! With a port the server keeps running; without one it exits after the
//! in-process request.

use axum::body::Body;
use axum::http::Request;
use spherecut::evalkit::{make_phantom, PhantomSpec};
use spherecut_service::server::{router, AppState};
use tower::ServiceExt;

#[tokio::main]
async fn main() {
    let (vol, _) = make_phantom(&PhantomSpec::sphere(20.0).with_noise(20.0, 5)).expect("phantom");
    let c = vol.center();
    let state = AppState::new(vol, "phantom".into());

    let body = serde_json::json!({ "seed_mm": [c.x, c.y, c.z] }).to_string();
    let req = Request::post("/api/segment").header("content-type", "application/json").body(Body::from(body)).unwrap();
    let res = router(state.clone(), None).oneshot(req).await.unwrap();
    println!("POST /api/segment -> {}", res.status());

    if let Some(port) = std::env::args().nth(1) {
        let addr = format!("127.0.0.1:{port}");
        let listener = tokio::net::TcpListener::bind(&addr).await.expect("bind");
        println!("listening on http://{addr}/api/meta");
        axum::serve(listener, router(state, None)).await.expect("serve");
    }
}
