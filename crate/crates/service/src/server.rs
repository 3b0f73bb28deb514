//! HTTP API around one loaded volume.
//!
//! - `GET  /api/health`
//! - `GET  /api/meta`: grid and intensity range
//! - `GET  /api/slice/{axis}/{index}?wc=&ww=`: grayscale PNG
//! - `POST /api/segment`: run a segmentation, mask returned run-length encoded
//! - `GET  /api/jobs`: jobs run in this session
//!
//! Segmentations run one at a time; up to [`QUEUE_LIMIT`] more wait in
//! arrival order and further requests get `429 Too Many Requests`.

use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

use spherecut::graphbuild::SegmentationParams;
use spherecut::segmenter::{segment, SegmentationReport, Timings};
use spherecut::volume::{extract_slice, Axis, Volume3D, Window};
use spherecut::{Error, WorldPoint};

use crate::rle;

/// Segmentations allowed to wait behind the running one.
pub const QUEUE_LIMIT: usize = 4;

/// Single-runner FIFO with bounded waiting room.
#[derive(Debug)]
pub struct JobQueue {
    runner: Semaphore,
    admitted: AtomicUsize,
    limit: usize,
}

/// Place in the queue; dropping it frees the slot.
#[derive(Debug)]
pub struct Ticket<'a> {
    queue: &'a JobQueue,
}

impl Drop for Ticket<'_> {
    fn drop(&mut self) {
        self.queue.admitted.fetch_sub(1, Ordering::SeqCst);
    }
}

impl JobQueue {
    pub fn new(waiting: usize) -> Self {
        Self { runner: Semaphore::new(1), admitted: AtomicUsize::new(0), limit: waiting + 1 }
    }

    /// Reserves a slot, or `None` when one job runs and the waiting room
    /// is full.
    pub fn try_admit(&self) -> Option<Ticket<'_>> {
        self.admitted
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| (n < self.limit).then_some(n + 1))
            .ok()
            .map(|_| Ticket { queue: self })
    }

    pub fn admitted(&self) -> usize {
        self.admitted.load(Ordering::SeqCst)
    }

    /// Waits for the runner (tokio semaphores are fair, so this is FIFO)
    /// and runs `job` on the blocking pool.
    pub async fn run<T: Send + 'static>(&self, _ticket: &Ticket<'_>, job: impl FnOnce() -> T + Send + 'static) -> T {
        let _permit = self.runner.acquire().await.expect("runner semaphore is never closed");
        tokio::task::spawn_blocking(job).await.expect("segmentation task panicked")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Done,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct JobRecord {
    pub job_id: u64,
    pub input: PathBuf,
    pub seed: WorldPoint,
    pub params: SegmentationParams,
    pub status: JobStatus,
    pub report: Option<SegmentationReport>,
    pub error: Option<String>,
    /// Seconds since the Unix epoch.
    pub created_at: f64,
}

pub struct AppState {
    pub volume: Arc<Volume3D>,
    pub input: PathBuf,
    pub queue: JobQueue,
    jobs: Mutex<Vec<JobRecord>>,
    next_id: AtomicU64,
}

impl AppState {
    pub fn new(volume: Volume3D, input: PathBuf) -> Arc<Self> {
        Arc::new(Self {
            volume: Arc::new(volume),
            input,
            queue: JobQueue::new(QUEUE_LIMIT),
            jobs: Mutex::new(Vec::new()),
            next_id: AtomicU64::new(1),
        })
    }

    pub fn jobs(&self) -> Vec<JobRecord> {
        self.jobs.lock().expect("job list lock").clone()
    }
}

pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/meta", get(meta))
        .route("/slice/{axis}/{index}", get(slice))
        .route("/segment", post(segment_handler))
        .route("/jobs", get(jobs));
    let mut app = Router::new().nest("/api", api);
    if let Some(dir) = static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app.layer(TraceLayer::new_for_http()).with_state(state)
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, Json(ErrorBody { error: msg.into() })).into_response()
}

async fn health() -> &'static str {
    "ok"
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Meta {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub intensity_min: f32,
    pub intensity_max: f32,
}

async fn meta(State(state): State<Arc<AppState>>) -> Json<Meta> {
    let vol = &state.volume;
    let (intensity_min, intensity_max) = vol.intensity_range();
    Json(Meta { dims: vol.dims(), spacing: vol.spacing(), origin: vol.origin(), intensity_min, intensity_max })
}

#[derive(Debug, Deserialize)]
struct WindowQuery {
    wc: Option<f64>,
    ww: Option<f64>,
}

async fn slice(
    State(state): State<Arc<AppState>>,
    UrlPath((axis, index)): UrlPath<(String, usize)>,
    Query(q): Query<WindowQuery>,
) -> Response {
    let Ok(axis) = axis.parse::<Axis>() else {
        return error(StatusCode::BAD_REQUEST, format!("unknown axis {axis:?}"));
    };
    let (lo, hi) = state.volume.intensity_range();
    let window = Window {
        center: q.wc.unwrap_or((lo as f64 + hi as f64) / 2.0),
        width: q.ww.unwrap_or(((hi - lo) as f64).max(1.0)),
    };
    if !(window.width > 0.0 && window.center.is_finite()) {
        return error(StatusCode::BAD_REQUEST, "window width must be positive");
    }
    let img = match extract_slice(&state.volume, axis, index, window) {
        Ok(img) => img,
        Err(e @ Error::IndexOutOfRange { .. }) => return error(StatusCode::NOT_FOUND, e.to_string()),
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let Some(gray) = image::GrayImage::from_raw(img.width as u32, img.height as u32, img.pixels) else {
        return error(StatusCode::INTERNAL_SERVER_ERROR, "slice buffer size");
    };
    let mut png = Vec::new();
    if let Err(e) = gray.write_to(&mut Cursor::new(&mut png), image::ImageFormat::Png) {
        return error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string());
    }
    ([(header::CONTENT_TYPE, "image/png")], png).into_response()
}

/// `POST /api/segment` body; omitted parameters take the defaults.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct SegmentRequest {
    pub seed_mm: [f64; 3],
    pub mesh_level: Option<usize>,
    pub nodes_per_ray: Option<usize>,
    pub ray_length_mm: Option<f64>,
    pub delta_r: Option<usize>,
}

impl SegmentRequest {
    pub fn params(&self) -> SegmentationParams {
        let d = SegmentationParams::default();
        SegmentationParams {
            mesh_level: self.mesh_level.unwrap_or(d.mesh_level),
            nodes_per_ray: self.nodes_per_ray.unwrap_or(d.nodes_per_ray),
            ray_length_mm: self.ray_length_mm.unwrap_or(d.ray_length_mm),
            delta_r: self.delta_r.unwrap_or(d.delta_r),
            ..d
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SegmentResponse {
    pub job_id: u64,
    pub objective: f64,
    pub timings_ms: Timings,
    /// Alternating run lengths over the x-fastest voxel array, starting
    /// with a (possibly empty) run of unset voxels.
    pub mask_rle: Vec<u64>,
    pub volume_cm3: f64,
    pub voxel_count: usize,
}

async fn segment_handler(State(state): State<Arc<AppState>>, Json(req): Json<SegmentRequest>) -> Response {
    let seed = WorldPoint::from(req.seed_mm);
    let params = req.params();
    if let Err(e) = params.validate() {
        return error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string());
    }
    if !seed.is_finite() || !state.volume.geometry().contains(seed) {
        return error(StatusCode::UNPROCESSABLE_ENTITY, Error::SeedOutOfBounds(seed).to_string());
    }
    let Some(ticket) = state.queue.try_admit() else {
        return error(StatusCode::TOO_MANY_REQUESTS, "segmentation queue is full");
    };
    let job_id = state.next_id.fetch_add(1, Ordering::SeqCst);
    let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let volume = Arc::clone(&state.volume);
    let outcome = state.queue.run(&ticket, move || segment(&volume, seed, &params)).await;
    drop(ticket);

    let mut record = JobRecord {
        job_id,
        input: state.input.clone(),
        seed,
        params,
        status: JobStatus::Failed,
        report: None,
        error: None,
        created_at,
    };
    let response = match outcome {
        Ok(res) => {
            let report = res.report();
            record.status = JobStatus::Done;
            record.report = Some(report.clone());
            tracing::info!(job_id, voxels = report.voxel_count, total_ms = res.timings.total, "segmentation done");
            Json(SegmentResponse {
                job_id,
                objective: res.objective,
                timings_ms: res.timings,
                mask_rle: rle::encode(res.mask.data()),
                volume_cm3: report.volume_cm3,
                voxel_count: report.voxel_count,
            })
            .into_response()
        }
        Err(e) => {
            record.error = Some(e.to_string());
            let status = match e {
                Error::SeedOutOfBounds(_) | Error::InvalidParams(_) | Error::MeshLevelTooLarge(_) => {
                    StatusCode::UNPROCESSABLE_ENTITY
                }
                _ => StatusCode::INTERNAL_SERVER_ERROR,
            };
            error(status, e.to_string())
        }
    };
    state.jobs.lock().expect("job list lock").push(record);
    response
}

async fn jobs(State(state): State<Arc<AppState>>) -> Json<Vec<JobRecord>> {
    Json(state.jobs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn queue_admits_one_runner_plus_waiting_room() {
        let q = JobQueue::new(QUEUE_LIMIT);
        let tickets: Vec<_> = (0..QUEUE_LIMIT + 1).map(|_| q.try_admit().unwrap()).collect();
        assert!(q.try_admit().is_none());
        drop(tickets);
        assert_eq!(q.admitted(), 0);
        assert!(q.try_admit().is_some());
    }

    #[tokio::test]
    async fn queued_jobs_run_in_order() {
        let q = Arc::new(JobQueue::new(QUEUE_LIMIT));
        let order = Arc::new(Mutex::new(Vec::new()));
        let mut handles = Vec::new();
        for i in 0..4 {
            let (q, order) = (Arc::clone(&q), Arc::clone(&order));
            handles.push(tokio::spawn(async move {
                let ticket = q.try_admit().unwrap();
                q.run(&ticket, move || {
                    std::thread::sleep(std::time::Duration::from_millis(5));
                    order.lock().unwrap().push(i);
                })
                .await;
            }));
            // let each task reach the semaphore before the next one
            tokio::task::yield_now().await;
            tokio::time::sleep(std::time::Duration::from_millis(1)).await;
        }
        for h in handles {
            h.await.unwrap();
        }
        assert_eq!(*order.lock().unwrap(), vec![0, 1, 2, 3]);
    }
}
