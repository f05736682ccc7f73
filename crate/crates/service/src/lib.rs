//! Local HTTP service over the Imp slicing engine.
//!
//! A session is created from a program and an input state; the program is
//! evaluated once and the resulting derivation is kept in memory (LRU,
//! 256 sessions by default). Slicing requests then run against the stored
//! trace.
//!
//! | Route                         | Body / query                          |
//! |-------------------------------|---------------------------------------|
//! | `POST /sessions`              | `{program, state, fuel?}`             |
//! | `GET  /sessions/{id}`         |                                       |
//! | `GET  /sessions/{id}/trace`   |                                       |
//! | `POST /sessions/{id}/bwd`     | `{criterion}`                         |
//! | `POST /sessions/{id}/fwd`     | `{partial_program, partial_state}`    |
//! | `GET  /sessions/{id}/check`   | `?bound=N`                            |
//! | `GET  /health`                |                                       |
//!
//! Programs and states may be given as text or as structured JSON. All
//! responses carry `schema_version`. Parse errors answer 400; evaluation,
//! fuel, criterion, lattice and size errors answer 422; unknown sessions 404.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State as AxumState};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lru::LruCache;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use uuid::Uuid;

use imp_slice_core::lattice::DEFAULT_DOWNSET_BOUND;
use imp_slice_core::oracle::check_connection;
use imp_slice_core::schema::{versioned, ErrorKind, ErrorView, ForwardView, RunView, SliceView};
use imp_slice_core::tracer::{eval_cmd, render_trace, Derivation, DEFAULT_FUEL};
use imp_slice_core::{
    parse_command, parse_partial_command, parse_partial_state, parse_state, Command, PartialCommand, PartialState,
    State,
};

pub const DEFAULT_SESSION_CAPACITY: usize = 256;

/// An evaluated program. Immutable once created, except for the cache of
/// check reports, which only memoises a pure function of the session.
pub struct Session {
    pub id: Uuid,
    pub program_text: String,
    pub derivation: Derivation,
    pub created_unix_ms: u128,
    checks: Mutex<HashMap<u64, (StatusCode, Arc<Value>)>>,
}

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<LruCache<Uuid, Arc<Session>>>>,
}

impl AppState {
    pub fn new(capacity: usize) -> Self {
        let capacity = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        AppState {
            sessions: Arc::new(Mutex::new(LruCache::new(capacity))),
        }
    }

    fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        let not_found = || {
            ApiError::new(
                StatusCode::NOT_FOUND,
                ErrorView::new(ErrorKind::NotFound, format!("no session `{id}`")),
            )
        };
        let uuid = Uuid::parse_str(id).map_err(|_| not_found())?;
        let mut sessions = self.sessions.lock().expect("session table poisoned");
        sessions.get(&uuid).cloned().ok_or_else(not_found)
    }

    fn insert(&self, session: Session) -> Arc<Session> {
        let session = Arc::new(session);
        let mut sessions = self.sessions.lock().expect("session table poisoned");
        sessions.put(session.id, session.clone());
        session
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session table poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for AppState {
    fn default() -> Self {
        AppState::new(DEFAULT_SESSION_CAPACITY)
    }
}

/// A JSON error response.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Box<ErrorView>,
}

impl ApiError {
    fn new(status: StatusCode, body: ErrorView) -> Self {
        ApiError {
            status,
            body: Box::new(body),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, ErrorView::new(ErrorKind::BadRequest, message))
    }

    fn parse(source: &str, e: &imp_slice_core::ParseError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, ErrorView::from(e).in_source(source))
    }

    fn unprocessable(body: ErrorView) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, body)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(versioned(*self.body))).into_response()
    }
}

fn ok<T: Serialize>(body: T) -> Response {
    Json(versioned(body)).into_response()
}

fn decode<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

/// A term given either as source text or as its structured JSON encoding.
#[derive(Deserialize)]
#[serde(untagged)]
enum TextOr<T> {
    Text(String),
    Tree(T),
}

impl TextOr<Command> {
    fn resolve(self, source: &str) -> Result<Command, ApiError> {
        match self {
            TextOr::Text(t) => parse_command(&t).map_err(|e| ApiError::parse(source, &e)),
            TextOr::Tree(c) => Ok(c),
        }
    }
}

impl TextOr<PartialCommand> {
    fn resolve(self, source: &str) -> Result<PartialCommand, ApiError> {
        match self {
            TextOr::Text(t) => parse_partial_command(&t).map_err(|e| ApiError::parse(source, &e)),
            TextOr::Tree(c) => Ok(c),
        }
    }
}

impl TextOr<State> {
    fn resolve(self, source: &str) -> Result<State, ApiError> {
        match self {
            TextOr::Text(t) => parse_state(&t).map_err(|e| ApiError::parse(source, &e)),
            TextOr::Tree(s) => Ok(s),
        }
    }
}

impl TextOr<PartialState> {
    fn resolve(self, source: &str) -> Result<PartialState, ApiError> {
        match self {
            TextOr::Text(t) => parse_partial_state(&t).map_err(|e| ApiError::parse(source, &e)),
            TextOr::Tree(s) => Ok(s),
        }
    }
}

#[derive(Deserialize)]
struct CreateSession {
    program: TextOr<Command>,
    state: TextOr<State>,
    fuel: Option<u64>,
}

#[derive(Serialize)]
struct SessionView<'a> {
    session_id: Uuid,
    program_text: &'a str,
    input_state: &'a State,
    input_text: String,
    #[serde(flatten)]
    run: RunView,
    /// Kept for clients that expect this name for the statistics.
    trace_summary: imp_slice_core::tracer::TraceStats,
    created_unix_ms: u128,
}

impl Session {
    fn view(&self) -> SessionView<'_> {
        let run = RunView::new(&self.derivation);
        SessionView {
            session_id: self.id,
            program_text: &self.program_text,
            input_state: &self.derivation.input,
            input_text: self.derivation.input.to_string(),
            trace_summary: run.trace_stats.clone(),
            run,
            created_unix_ms: self.created_unix_ms,
        }
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            ErrorView::new(ErrorKind::BadRequest, format!("worker failed: {e}")),
        )
    })
}

async fn create_session(AxumState(app): AxumState<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateSession = decode(&body)?;
    let program = req.program.resolve("program")?;
    let input = req.state.resolve("state")?;
    let fuel = req.fuel.unwrap_or(DEFAULT_FUEL);
    if fuel == 0 {
        return Err(ApiError::bad_request("fuel must be positive"));
    }
    let derivation = blocking(move || eval_cmd(&input, &program, fuel))
        .await?
        .map_err(|e| ApiError::unprocessable(ErrorView::from(&e)))?;
    let session = app.insert(Session {
        id: Uuid::new_v4(),
        program_text: derivation.program.to_string(),
        derivation,
        created_unix_ms: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
        checks: Mutex::new(HashMap::new()),
    });
    Ok((StatusCode::CREATED, Json(versioned(session.view()))).into_response())
}

async fn get_session(AxumState(app): AxumState<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = app.get(&id)?;
    Ok(ok(session.view()))
}

async fn get_trace(AxumState(app): AxumState<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = app.get(&id)?;
    let body = blocking(move || {
        let d = &session.derivation;
        json!({
            "session_id": session.id,
            "listing": render_trace(&d.trace),
            "trace": d.trace,
            "trace_stats": d.stats(),
        })
    })
    .await?;
    Ok(ok(body))
}

#[derive(Deserialize)]
struct BwdRequest {
    criterion: TextOr<PartialState>,
}

async fn backward(
    AxumState(app): AxumState<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let session = app.get(&id)?;
    let req: BwdRequest = decode(&body)?;
    let criterion = req.criterion.resolve("criterion")?;
    let view = blocking(move || {
        let d = &session.derivation;
        d.backward(&criterion).map(|s| SliceView::new(&d.program, &s))
    })
    .await?
    .map_err(|e| ApiError::unprocessable(ErrorView::from(&e)))?;
    Ok(ok(view))
}

#[derive(Deserialize)]
struct FwdRequest {
    partial_program: TextOr<PartialCommand>,
    partial_state: TextOr<PartialState>,
}

async fn forward(
    AxumState(app): AxumState<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let session = app.get(&id)?;
    let req: FwdRequest = decode(&body)?;
    let program = req.partial_program.resolve("partial_program")?;
    let state = req.partial_state.resolve("partial_state")?;
    let out = blocking(move || session.derivation.forward(&program, &state))
        .await?
        .map_err(|e| ApiError::unprocessable(ErrorView::from(&e)))?;
    Ok(ok(ForwardView::new(out)))
}

#[derive(Deserialize)]
struct CheckQuery {
    bound: Option<u64>,
}

async fn check(
    AxumState(app): AxumState<AppState>,
    Path(id): Path<String>,
    Query(q): Query<CheckQuery>,
) -> Result<Response, ApiError> {
    let session = app.get(&id)?;
    let bound = q.bound.unwrap_or(DEFAULT_DOWNSET_BOUND);
    let cached = session
        .checks
        .lock()
        .expect("check cache poisoned")
        .get(&bound)
        .cloned();
    let (status, body) = match cached {
        Some(hit) => hit,
        None => {
            let s = session.clone();
            let computed = blocking(move || match check_connection(&s.derivation, bound) {
                Ok(report) => (StatusCode::OK, serde_json::to_value(versioned(report))),
                Err(e) => (
                    StatusCode::UNPROCESSABLE_ENTITY,
                    serde_json::to_value(versioned(ErrorView::from(&e))),
                ),
            })
            .await?;
            let value = Arc::new(computed.1.expect("reports serialise"));
            let entry = (computed.0, value);
            session
                .checks
                .lock()
                .expect("check cache poisoned")
                .insert(bound, entry.clone());
            entry
        }
    };
    Ok((status, Json((*body).clone())).into_response())
}

async fn health() -> Response {
    ok(json!({ "status": "ok" }))
}

async fn fallback() -> ApiError {
    ApiError::new(
        StatusCode::NOT_FOUND,
        ErrorView::new(ErrorKind::NotFound, "no such route"),
    )
}

/// The service's routes. When `assets` is given, unmatched paths are served
/// from that directory (the browser client).
pub fn app(state: AppState, assets: Option<PathBuf>) -> Router {
    let router = Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/trace", get(get_trace))
        .route("/sessions/{id}/bwd", post(backward))
        .route("/sessions/{id}/fwd", post(forward))
        .route("/sessions/{id}/check", get(check))
        .with_state(state);
    match assets {
        Some(dir) => router.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => router.fallback(fallback),
    }
}

/// Serves `app` on an already bound listener until the process ends.
pub async fn serve(listener: tokio::net::TcpListener, router: Router) -> std::io::Result<()> {
    axum::serve(listener, router).await
}
