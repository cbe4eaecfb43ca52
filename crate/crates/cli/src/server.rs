//! JSON chat API over a shared [`Runtime`].
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | | 201 `{sessionId, greeting}` |
//! | POST | `/sessions/{id}/messages` | `{text}` | `{replies, status, decision?}` |
//! | GET | `/sessions/{id}` | | session summary |
//! | GET | `/agent` | | decisions and metadata |
//!
//! Unknown or expired sessions give 404, closed ones 409 and blank text 422.
//! Errors carry `{error}`.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dmnbot_core::agent::Metadata;
use dmnbot_core::model::{Assignment, Value};
use dmnbot_core::runtime::{Runtime, RuntimeError, Session, Status, Turn};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;
use tokio::time::Instant;

pub const DEFAULT_IDLE: Duration = Duration::from_secs(30 * 60);

struct Slot {
    session: Session,
    touched: Instant,
}

#[derive(Clone)]
pub struct AppState {
    runtime: Arc<Runtime>,
    sessions: Arc<Mutex<HashMap<String, Arc<Mutex<Slot>>>>>,
    idle: Duration,
}

impl AppState {
    pub fn new(runtime: Runtime, idle: Duration) -> Self {
        AppState {
            runtime: Arc::new(runtime),
            sessions: Arc::new(Mutex::new(HashMap::new())),
            idle,
        }
    }

    /// Drops every session idle for longer than the limit.
    async fn sweep(&self) {
        let now = Instant::now();
        let mut map = self.sessions.lock().await;
        let mut stale = Vec::new();
        for (id, slot) in map.iter() {
            if let Ok(s) = slot.try_lock() {
                if now.duration_since(s.touched) > self.idle {
                    stale.push(id.clone());
                }
            }
        }
        for id in stale {
            map.remove(&id);
        }
    }

    async fn slot(&self, id: &str) -> Result<Arc<Mutex<Slot>>, ApiError> {
        self.sweep().await;
        self.sessions.lock().await.get(id).cloned().ok_or(ApiError::NotFound)
    }
}

#[derive(Debug)]
enum ApiError {
    NotFound,
    Closed,
    EmptyText,
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (code, msg) = match self {
            ApiError::NotFound => (StatusCode::NOT_FOUND, "unknown session".to_owned()),
            ApiError::Closed => (StatusCode::CONFLICT, "session is closed".to_owned()),
            ApiError::EmptyText => (StatusCode::UNPROCESSABLE_ENTITY, "text must not be empty".to_owned()),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (code, Json(serde_json::json!({ "error": msg }))).into_response()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Created {
    pub session_id: String,
    pub greeting: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MessageIn {
    pub text: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Replies {
    pub replies: Vec<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub session_id: String,
    pub status: Status,
    pub active_decision: Option<String>,
    pub collected: Assignment,
    pub pending: Option<String>,
    pub decision: Option<Value>,
    pub transcript: Vec<Turn>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecisionInfo {
    pub name: String,
    pub label: String,
    pub inputs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AgentInfo {
    pub decisions: Vec<DecisionInfo>,
    pub metadata: Metadata,
}

async fn create(State(st): State<AppState>) -> (StatusCode, Json<Created>) {
    st.sweep().await;
    let id = uuid::Uuid::new_v4().to_string();
    let session = st.runtime.start(&id);
    let greeting = session.transcript.first().map(|t| t.text.clone()).unwrap_or_default();
    let slot = Slot {
        session,
        touched: Instant::now(),
    };
    st.sessions.lock().await.insert(id.clone(), Arc::new(Mutex::new(slot)));
    (StatusCode::CREATED, Json(Created { session_id: id, greeting }))
}

async fn message(State(st): State<AppState>, Path(id): Path<String>, Json(body): Json<MessageIn>) -> Result<Json<Replies>, ApiError> {
    let slot = st.slot(&id).await?;
    let mut slot = slot.lock().await;
    slot.touched = Instant::now();
    if slot.session.status == Status::Closed {
        return Err(ApiError::Closed);
    }
    if body.text.trim().is_empty() {
        return Err(ApiError::EmptyText);
    }
    let replies = match st.runtime.step(&mut slot.session, &body.text) {
        Ok(r) => r,
        Err(RuntimeError::Closed) => return Err(ApiError::Closed),
        Err(e) => return Err(ApiError::Internal(e.to_string())),
    };
    let decision = if slot.session.status == Status::Decided {
        slot.session.decision.clone()
    } else {
        None
    };
    Ok(Json(Replies {
        replies,
        status: slot.session.status,
        decision,
    }))
}

async fn summary(State(st): State<AppState>, Path(id): Path<String>) -> Result<Json<Summary>, ApiError> {
    let slot = st.slot(&id).await?;
    let mut slot = slot.lock().await;
    slot.touched = Instant::now();
    let s = &slot.session;
    Ok(Json(Summary {
        session_id: s.id.clone(),
        status: s.status,
        active_decision: s.active_decision.clone(),
        collected: s.collected.clone(),
        pending: s.pending.clone(),
        decision: s.decision.clone(),
        transcript: s.transcript.clone(),
    }))
}

async fn agent(State(st): State<AppState>) -> Json<AgentInfo> {
    let a = st.runtime.agent();
    Json(AgentInfo {
        decisions: a
            .decisions
            .iter()
            .map(|d| DecisionInfo {
                name: d.name.clone(),
                label: d.label.clone(),
                inputs: d.inputs.iter().map(|i| i.name.clone()).collect(),
            })
            .collect(),
        metadata: a.metadata.clone(),
    })
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(summary))
        .route("/sessions/{id}/messages", post(message))
        .route("/agent", get(agent))
        .with_state(state)
}

/// The API, plus static files from `ui_dir` for every other path.
pub fn app(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let r = router(state);
    match ui_dir {
        Some(dir) => r.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => r,
    }
}
