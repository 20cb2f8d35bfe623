//! HTTP/JSON API over the store and live sessions.

use std::collections::BTreeMap;
use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use breeder_core::metrics::{module_assignments, NullModelConfig};
use breeder_core::neat::{next_generation, MutationConfig, Origin, Session, DEFAULT_POPULATION};
use breeder_core::probe::{
    annotate_export, decomposition, sweep, ImpactSummary, Label, LabelStore, SweepSpec,
};
use breeder_core::stats::{corpus_report, score_corpus, ReportConfig};
use breeder_core::store::{PublishRecord, Store, StoreError};
use breeder_core::{CompiledCppn, CppnConfig, Genome, Innovation, Palette};
use parking_lot::RwLock;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::analysis::{score_genome, store_genomes, MetricsReport};
use crate::error::ApiError;
use crate::labels::LabelRepo;
use crate::sessions::{LiveSession, SessionManager};

pub const DEFAULT_IMAGE_SIZE: usize = 256;
pub const MAX_IMAGE_SIZE: usize = 1024;
pub const MAX_NULLS: usize = 1000;

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub mutation: MutationConfig,
    pub population: usize,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            mutation: MutationConfig::default(),
            population: DEFAULT_POPULATION,
            static_dir: None,
        }
    }
}

#[derive(Debug)]
pub struct AppState {
    pub store: RwLock<Store>,
    pub sessions: SessionManager,
    pub labels: LabelRepo,
    pub config: ServiceConfig,
}

impl AppState {
    pub fn new(store: Store, config: ServiceConfig) -> Self {
        let labels = match store.path() {
            Some(dir) => LabelRepo::at(dir),
            None => LabelRepo::in_memory(),
        };
        Self {
            store: RwLock::new(store),
            sessions: SessionManager::default(),
            labels,
            config,
        }
    }

    fn genome(&self, id: &str) -> ApiResult<Genome> {
        self.store
            .read()
            .get(id)
            .map(|r| r.genome.clone())
            .ok_or_else(|| ApiError::unknown_image(id))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let static_dir = state.config.static_dir.clone();
    let app = Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_info))
        .route("/sessions/{id}/population", get(population))
        .route("/sessions/{id}/images/{file}", get(session_image))
        .route("/sessions/{id}/select", post(select))
        .route("/sessions/{id}/next", post(next))
        .route("/sessions/{id}/publish", post(publish))
        .route("/images", get(list_images))
        .route("/images/{id}", get(image_record))
        .route("/images/{id}/genome", get(image_genome))
        .route("/images/{id}/image.png", get(image_png))
        .route("/images/{id}/nodes/{file}", get(node_png))
        .route("/images/{id}/lineage", get(lineage))
        .route("/images/{id}/sweep", get(sweep_view))
        .route("/images/{id}/sweep/frame.png", get(sweep_frame))
        .route("/images/{id}/labels", get(get_labels).put(put_labels))
        .route("/images/{id}/decomposition", get(image_decomposition))
        .route("/images/{id}/annotated.svg", get(annotated_svg))
        .route("/images/{id}/metrics", get(metrics))
        .route("/corpus/report", get(corpus))
        .with_state(state);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("port already in use: {0}")]
    PortInUse(SocketAddr),
    #[error("store is corrupt: {0}")]
    StoreCorrupt(StoreError),
    #[error("store: {0}")]
    Store(StoreError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Opens the store, refusing to start on a checksum failure.
pub fn open_store(dir: Option<&std::path::Path>) -> Result<Store, ServeError> {
    match dir {
        None => Ok(Store::in_memory()),
        Some(d) => Store::open(d).map_err(|e| match e {
            StoreError::Corrupt { .. } => ServeError::StoreCorrupt(e),
            other => ServeError::Store(other),
        }),
    }
}

/// Serves until `shutdown` resolves, then flushes the store.
pub async fn serve(
    state: Arc<AppState>,
    addr: SocketAddr,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::AddrInUse => ServeError::PortInUse(addr),
            _ => ServeError::Io(e),
        })?;
    let sweeper = {
        let state = state.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(Duration::from_secs(600));
            loop {
                tick.tick().await;
                state.sessions.evict_idle(Instant::now());
            }
        })
    };
    let result = axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(shutdown)
        .await;
    sweeper.abort();
    state.store.read().flush().map_err(ServeError::Store)?;
    result.map_err(ServeError::Io)
}

fn canonical(json: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], json).into_response()
}

fn png(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "image/png")], bytes).into_response()
}

fn check_size(size: Option<usize>) -> ApiResult<usize> {
    let s = size.unwrap_or(DEFAULT_IMAGE_SIZE);
    if (1..=MAX_IMAGE_SIZE).contains(&s) {
        Ok(s)
    } else {
        Err(ApiError::bad_request(
            "invalid_size",
            format!("size {s} outside 1..={MAX_IMAGE_SIZE}"),
        ))
    }
}

/// Parses `<n>.png`.
fn png_index(file: &str) -> Option<u64> {
    file.strip_suffix(".png")?.parse().ok()
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok",
        version: env!("CARGO_PKG_VERSION"),
    })
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub from: String,
    #[serde(default)]
    pub palette: Option<Palette>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub size: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub seed: u64,
    pub palette: Palette,
    pub origin: Origin,
    pub generation: u64,
    pub size: usize,
    pub selected: Vec<usize>,
}

fn summary(live: &LiveSession) -> SessionSummary {
    let s = &live.session;
    SessionSummary {
        session_id: s.id.clone(),
        seed: s.rng_seed,
        palette: s.palette,
        origin: s.origin.clone(),
        generation: s.generation,
        size: s.size(),
        selected: live.selected.iter().copied().collect(),
    }
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    Json(req): Json<CreateSession>,
) -> ApiResult<(StatusCode, Json<SessionSummary>)> {
    let seed = req.seed.unwrap_or_else(rand::random);
    let size = req.size.unwrap_or(state.config.population);
    let cfg = state.config.mutation;
    let id = uuid::Uuid::new_v4().to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let session = {
        let mut store = state.store.write();
        if req.from == "scratch" {
            let palette = req.palette.unwrap_or(Palette::Gray);
            Session::scratch(id, palette, size, seed, store.registry_mut(), &mut rng)?
        } else {
            let parent = store
                .get(&req.from)
                .map(|r| r.genome.clone())
                .ok_or_else(|| ApiError::unknown_image(&req.from))?;
            if req.palette.is_some_and(|p| p != parent.palette) {
                return Err(ApiError::bad_request(
                    "palette_mismatch",
                    "a branch keeps the palette of its parent",
                ));
            }
            Session::branched(
                id,
                &parent,
                size,
                seed,
                &cfg,
                store.registry_mut(),
                &mut rng,
            )?
        }
    };
    let live = LiveSession::new(session, rng, cfg);
    let body = summary(&live);
    state.sessions.insert(live);
    Ok((StatusCode::CREATED, Json(body)))
}

async fn session_info(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionSummary>> {
    let handle = state
        .sessions
        .get(&id)
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let live = handle.lock();
    Ok(Json(summary(&live)))
}

#[derive(Debug, Deserialize)]
struct SizeQuery {
    size: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Grid {
    pub columns: usize,
    pub rows: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Slot {
    pub slot: usize,
    pub genome_id: String,
    pub selected: bool,
    pub image_url: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PopulationView {
    pub session_id: String,
    pub generation: u64,
    pub palette: Palette,
    pub image_size: usize,
    pub grid: Grid,
    pub slots: Vec<Slot>,
}

async fn population(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SizeQuery>,
) -> ApiResult<Json<PopulationView>> {
    let size = check_size(q.size)?;
    let handle = state
        .sessions
        .get(&id)
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let live = handle.lock();
    let s = &live.session;
    let n = s.size();
    let columns = (n as f64).sqrt().ceil() as usize;
    let slots = s
        .population
        .iter()
        .enumerate()
        .map(|(k, g)| Slot {
            slot: k,
            genome_id: g.id.clone(),
            selected: live.selected.contains(&k),
            image_url: format!(
                "/sessions/{id}/images/{k}.png?size={size}&generation={}",
                s.generation
            ),
        })
        .collect();
    Ok(Json(PopulationView {
        session_id: s.id.clone(),
        generation: s.generation,
        palette: s.palette,
        image_size: size,
        grid: Grid {
            columns,
            rows: n.div_ceil(columns.max(1)),
        },
        slots,
    }))
}

#[derive(Debug, Deserialize)]
struct SlotImageQuery {
    size: Option<usize>,
    generation: Option<u64>,
}

async fn session_image(
    State(state): State<Arc<AppState>>,
    Path((id, file)): Path<(String, String)>,
    Query(q): Query<SlotImageQuery>,
) -> ApiResult<Response> {
    let size = check_size(q.size)?;
    let slot = png_index(&file)
        .ok_or_else(|| ApiError::not_found("not_found", format!("no image {file}")))?
        as usize;
    let handle = state
        .sessions
        .get(&id)
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let genome = {
        let live = handle.lock();
        if let Some(g) = q.generation.filter(|&g| g != live.session.generation) {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "stale_generation",
                format!(
                    "session is at generation {}, not {g}",
                    live.session.generation
                ),
            ));
        }
        live.session
            .population
            .get(slot)
            .cloned()
            .ok_or_else(|| invalid_slot(slot, live.session.size()))?
    };
    let bytes = blocking(move || Ok(breeder_core::render(&genome, size, size)?.to_png())).await?;
    Ok(png(bytes))
}

fn invalid_slot(slot: usize, len: usize) -> ApiError {
    ApiError::bad_request(
        "invalid_slot",
        format!("slot {slot} out of range for population of {len}"),
    )
}

#[derive(Debug, Deserialize)]
pub struct SelectRequest {
    pub slots: Vec<usize>,
}

async fn select(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<SelectRequest>,
) -> ApiResult<StatusCode> {
    let handle = state
        .sessions
        .get(&id)
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let mut live = handle.lock();
    let len = live.session.size();
    if let Some(&bad) = req.slots.iter().find(|&&s| s >= len) {
        return Err(invalid_slot(bad, len));
    }
    live.selected = req.slots.into_iter().collect();
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Generation {
    pub generation: u64,
}

async fn next(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<Generation>> {
    let handle = state
        .sessions
        .get(&id)
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let mut guard = handle.lock();
    let live = &mut *guard;
    let selected: Vec<usize> = live.selected.iter().copied().collect();
    let stepped = {
        let mut store = state.store.write();
        next_generation(
            &live.session,
            &selected,
            &live.config,
            store.registry_mut(),
            &mut live.rng,
        )?
    };
    live.session = stepped;
    live.selected.clear();
    Ok(Json(Generation {
        generation: live.session.generation,
    }))
}

#[derive(Debug, Deserialize)]
pub struct PublishRequest {
    pub slot: usize,
    pub title: String,
    #[serde(default)]
    pub author: String,
}

async fn publish(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<PublishRequest>,
) -> ApiResult<(StatusCode, Response)> {
    let handle = state
        .sessions
        .get(&id)
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let live = handle.lock();
    let mut genome = live
        .session
        .population
        .get(req.slot)
        .cloned()
        .ok_or_else(|| invalid_slot(req.slot, live.session.size()))?;
    if req.title.trim().is_empty() {
        return Err(StoreError::EmptyTitle.into());
    }
    // every publish is a new image, even of a genome published before
    genome.id = uuid::Uuid::new_v4().to_string();
    genome.parent_id = live.session.origin.parent_id().map(str::to_string);
    genome.title = req.title.clone();
    genome.author = req.author.clone();
    let record = PublishRecord {
        genome_id: genome.id.clone(),
        parent_id: genome.parent_id.clone(),
        title: req.title,
        author: req.author,
        created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        config: live.config,
        genome,
    };
    let mut store = state.store.write();
    let json = store.publish(record)?.to_canonical_json();
    Ok((StatusCode::CREATED, canonical(json)))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ImageEntry {
    pub genome_id: String,
    pub parent_id: Option<String>,
    pub title: String,
    pub author: String,
    pub created_at: String,
    pub children: usize,
}

async fn list_images(State(state): State<Arc<AppState>>) -> Json<Vec<ImageEntry>> {
    let store = state.store.read();
    Json(
        store
            .records()
            .iter()
            .map(|r| ImageEntry {
                genome_id: r.genome_id.clone(),
                parent_id: r.parent_id.clone(),
                title: r.title.clone(),
                author: r.author.clone(),
                created_at: r.created_at.clone(),
                children: store.children(&r.genome_id).len(),
            })
            .collect(),
    )
}

async fn image_record(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let store = state.store.read();
    let r = store.get(&id).ok_or_else(|| ApiError::unknown_image(&id))?;
    Ok(canonical(r.to_canonical_json()))
}

async fn image_genome(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    Ok(canonical(state.genome(&id)?.to_canonical_json()))
}

async fn image_png(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SizeQuery>,
) -> ApiResult<Response> {
    let size = check_size(q.size)?;
    let genome = state.genome(&id)?;
    let bytes = blocking(move || Ok(breeder_core::render(&genome, size, size)?.to_png())).await?;
    Ok(png(bytes))
}

async fn node_png(
    State(state): State<Arc<AppState>>,
    Path((id, file)): Path<(String, String)>,
    Query(q): Query<SizeQuery>,
) -> ApiResult<Response> {
    let size = check_size(q.size)?;
    let node = png_index(&file)
        .ok_or_else(|| ApiError::not_found("not_found", format!("no image {file}")))?;
    let genome = state.genome(&id)?;
    let bytes = blocking(move || {
        Ok(breeder_core::render_node(&genome, Innovation(node), size, size)?.to_png())
    })
    .await?;
    Ok(png(bytes))
}

async fn lineage(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let chain = state.store.read().lineage(&id)?;
    Ok(canonical(
        serde_json::to_string(&chain).expect("serializes"),
    ))
}

#[derive(Debug, Deserialize)]
struct SweepQuery {
    connection: u64,
    lo: Option<f64>,
    hi: Option<f64>,
    step: Option<f64>,
    size: Option<usize>,
    #[serde(default)]
    fine: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FrameLink {
    pub index: usize,
    pub weight: f64,
    pub url: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepView {
    pub image_id: String,
    pub spec: SweepSpec,
    pub baseline_weight: f64,
    pub baseline_url: String,
    pub frames: Vec<FrameLink>,
    pub impact: ImpactSummary,
}

fn frame_url(id: &str, connection: Innovation, weight: f64, size: usize) -> String {
    format!("/images/{id}/sweep/frame.png?connection={connection}&weight={weight}&size={size}")
}

async fn sweep_view(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SweepQuery>,
) -> ApiResult<Json<SweepView>> {
    let size = check_size(q.size)?;
    let genome = state.genome(&id)?;
    let mut spec = SweepSpec::new(Innovation(q.connection), size, size);
    if q.fine {
        spec = spec.fine();
    }
    spec.lo = q.lo.unwrap_or(spec.lo);
    spec.hi = q.hi.unwrap_or(spec.hi);
    spec.step = q.step.unwrap_or(spec.step);
    let result = blocking(move || Ok(sweep(&genome, &spec, CppnConfig::default())?)).await?;
    let conn = result.spec.connection;
    Ok(Json(SweepView {
        baseline_url: frame_url(&id, conn, result.baseline_weight, size),
        frames: result
            .frames
            .iter()
            .enumerate()
            .map(|(index, f)| FrameLink {
                index,
                weight: f.weight,
                url: frame_url(&id, conn, f.weight, size),
            })
            .collect(),
        impact: result.impact.summary(),
        spec: result.spec,
        baseline_weight: result.baseline_weight,
        image_id: id,
    }))
}

#[derive(Debug, Deserialize)]
struct FrameQuery {
    connection: u64,
    weight: f64,
    size: Option<usize>,
}

async fn sweep_frame(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<FrameQuery>,
) -> ApiResult<Response> {
    let size = check_size(q.size)?;
    if !q.weight.is_finite() {
        return Err(ApiError::bad_request(
            "invalid_sweep",
            "weight must be finite",
        ));
    }
    let genome = state.genome(&id)?;
    let conn = Innovation(q.connection);
    match genome.connection(conn) {
        None => {
            return Err(ApiError::bad_request(
                "unknown_connection",
                format!("unknown connection {conn}"),
            ))
        }
        Some(c) if !c.enabled => {
            return Err(ApiError::bad_request(
                "disabled_connection",
                format!("connection {conn} is disabled"),
            ))
        }
        Some(_) => {}
    }
    let bytes = blocking(move || {
        let mut plan = CompiledCppn::new(&genome, CppnConfig::default())?;
        plan.set_weight(conn, q.weight)?;
        Ok(plan.render(size, size)?.to_png())
    })
    .await?;
    Ok(png(bytes))
}

async fn get_labels(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    state.genome(&id)?;
    let labels = state
        .labels
        .get(&id)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(canonical(labels.to_canonical_json()))
}

/// Replacement label set for an image.
#[derive(Debug, Deserialize)]
pub struct LabelsRequest {
    #[serde(default)]
    pub genome_id: Option<String>,
    pub labels: BTreeMap<Innovation, Label>,
}

async fn put_labels(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<LabelsRequest>,
) -> ApiResult<Response> {
    let genome = state.genome(&id)?;
    let mut labels = LabelStore::new(req.genome_id.unwrap_or_else(|| id.clone()));
    for (conn, label) in req.labels {
        labels.assign_label(&genome, conn, label.name, label.color)?;
    }
    labels.check(&genome)?;
    let json = labels.to_canonical_json();
    state
        .labels
        .put(labels)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(canonical(json))
}

async fn image_decomposition(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<breeder_core::probe::Decomposition>> {
    state.genome(&id)?;
    let labels = state
        .labels
        .get(&id)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(Json(decomposition(&labels)))
}

#[derive(Debug, Deserialize)]
struct AnnotatedQuery {
    #[serde(default)]
    modules: bool,
}

async fn annotated_svg(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<AnnotatedQuery>,
) -> ApiResult<Response> {
    let genome = state.genome(&id)?;
    let labels = state
        .labels
        .get(&id)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    let svg = blocking(move || {
        let modules = if q.modules {
            Some(module_assignments(&genome)?)
        } else {
            None
        };
        Ok(annotate_export(&genome, &labels, modules.as_deref()).svg)
    })
    .await?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

#[derive(Debug, Deserialize)]
struct MetricsQuery {
    nulls: Option<usize>,
    seed: Option<u64>,
    #[serde(default)]
    count_disabled: bool,
}

fn null_config(nulls: Option<usize>, count_disabled: bool) -> ApiResult<NullModelConfig> {
    let count = nulls.unwrap_or(NullModelConfig::default().count);
    if !(1..=MAX_NULLS).contains(&count) {
        return Err(ApiError::bad_request(
            "invalid_config",
            format!("nulls {count} outside 1..={MAX_NULLS}"),
        ));
    }
    Ok(NullModelConfig {
        count,
        count_disabled,
    })
}

async fn metrics(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<MetricsQuery>,
) -> ApiResult<Json<MetricsReport>> {
    let cfg = null_config(q.nulls, q.count_disabled)?;
    let (genome, parent) = {
        let store = state.store.read();
        let r = store.get(&id).ok_or_else(|| ApiError::unknown_image(&id))?;
        let parent = r
            .parent_id
            .as_deref()
            .and_then(|p| store.get(p))
            .map(|p| p.genome.clone());
        (r.genome.clone(), parent)
    };
    let seed = q.seed.unwrap_or(0);
    let report = blocking(move || Ok(score_genome(&genome, parent.as_ref(), &cfg, seed)?)).await?;
    Ok(Json(report))
}

#[derive(Debug, Deserialize)]
struct CorpusQuery {
    nulls: Option<usize>,
    seed: Option<u64>,
    resamples: Option<usize>,
    bins: Option<usize>,
    level: Option<f64>,
    #[serde(default)]
    count_disabled: bool,
}

async fn corpus(
    State(state): State<Arc<AppState>>,
    Query(q): Query<CorpusQuery>,
) -> ApiResult<Response> {
    let cfg = null_config(q.nulls, q.count_disabled)?;
    let defaults = ReportConfig::default();
    let report_cfg = ReportConfig {
        bins: q.bins.unwrap_or(defaults.bins),
        resamples: q.resamples.unwrap_or(defaults.resamples),
        level: q.level.unwrap_or(defaults.level),
    };
    let genomes = store_genomes(&state.store.read());
    let seed = q.seed.unwrap_or(0);
    let json = blocking(move || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = score_corpus(&genomes, &cfg, &mut rng);
        let report = corpus_report(&corpus, &report_cfg, &mut rng)?;
        Ok(serde_json::to_string(&report).expect("serializes"))
    })
    .await?;
    Ok(canonical(json))
}
