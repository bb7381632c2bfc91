use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, PoisonError};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tasktrace::dataset::dataset_stats;
use tasktrace::model::{suggest_edits, suggest_next, SuggestConfig};
use tasktrace::{
    parse_trace, step_schema, steps_from_value, validate_trace, Dataset, LayoutHint, ParamSlot,
    SchemaError, StatsSummary, StepKind, Suggestion, TaskCategory, ValidationReport,
};

use crate::config::ServiceConfig;
use crate::ServiceError;
use crate::registry::{modeling_traces, RebuildReport, Registry, Snapshot};
use crate::store::{RecordStatus, Store, StoreError, StoreRecord};

/// Request header carrying the acknowledged session token.
pub const SESSION_HEADER: &str = "x-session-token";

/// Shared service state: the single-writer store and the model registry.
#[derive(Debug)]
pub struct AppState {
    config: ServiceConfig,
    store: Mutex<Store>,
    registry: Registry,
    approved_since_rebuild: AtomicUsize,
}

impl AppState {
    /// Opens the store, replays it, and builds the first model generation.
    pub fn open(config: ServiceConfig) -> Result<Arc<Self>, ServiceError> {
        config.validate()?;
        let store = Store::open(&config.data_dir)?;
        let state = Arc::new(AppState {
            config,
            store: Mutex::new(store),
            registry: Registry::default(),
            approved_since_rebuild: AtomicUsize::new(0),
        });
        state.rebuild();
        Ok(state)
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn store(&self) -> MutexGuard<'_, Store> {
        self.store.lock().unwrap_or_else(PoisonError::into_inner)
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.registry.snapshot()
    }

    pub fn rebuild(&self) -> Arc<Snapshot> {
        self.approved_since_rebuild.store(0, Ordering::SeqCst);
        self.registry.rebuild(
            || modeling_traces(self.store().records(), self.config.screening),
            self.config.abstraction,
            self.config.alpha,
        )
    }

    pub fn stats(&self) -> StatsSummary {
        let traces = modeling_traces(self.store().records(), self.config.screening);
        dataset_stats(&Dataset::new(traces).expect("store ids are unique"))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/categories", get(list_categories))
        .route("/categories/{slug}/steps", get(category_steps))
        .route("/categories/{slug}/suggest", post(suggest))
        .route("/traces", post(submit_trace))
        .route("/traces/export", get(export))
        .route("/stats", get(stats))
        .route("/models/rebuild", post(rebuild))
        .route("/sessions/acknowledge", post(acknowledge))
        .with_state(state)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, error: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: error.into(),
                code: code.into(),
                path: None,
            },
        }
    }

    fn schema(err: SchemaError) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                code: err.kind.code().into(),
                path: Some(err.path.clone()),
                error: err.to_string(),
            },
        }
    }

    fn storage(err: StoreError) -> Self {
        tracing::error!(%err, "store write failed");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "STORAGE_FAILURE", err.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

fn category_of(slug: &str) -> Result<TaskCategory, ApiError> {
    slug.parse()
        .map_err(|e| ApiError::new(StatusCode::NOT_FOUND, "UNKNOWN_CATEGORY", format!("{e}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryListing {
    pub slug: TaskCategory,
    pub prompt_text: String,
    pub layout_hints: Vec<LayoutHint>,
}

async fn list_categories(State(state): State<Arc<AppState>>) -> Json<Vec<CategoryListing>> {
    Json(
        state
            .config
            .catalog
            .iter()
            .map(|(slug, info)| CategoryListing {
                slug,
                prompt_text: info.prompt_text.clone(),
                layout_hints: info.layout_hints.clone(),
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolboxStep {
    pub kind: StepKind,
    pub slots: Vec<ParamSlot>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Toolbox {
    pub category: TaskCategory,
    pub steps: Vec<ToolboxStep>,
}

async fn category_steps(Path(slug): Path<String>) -> Result<Json<Toolbox>, ApiError> {
    let category = category_of(&slug)?;
    Ok(Json(Toolbox {
        category,
        steps: StepKind::ALL
            .iter()
            .map(|&kind| ToolboxStep {
                kind,
                slots: step_schema(kind).to_vec(),
                description: kind.description().into(),
            })
            .collect(),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmitResponse {
    pub id: String,
    pub status: RecordStatus,
    pub report: ValidationReport,
}

async fn submit_trace(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: String,
) -> Result<(StatusCode, Json<SubmitResponse>), ApiError> {
    if state.config.require_acknowledgment {
        let session = headers.get(SESSION_HEADER).and_then(|v| v.to_str().ok());
        if !session.is_some_and(|s| state.store().is_acknowledged(s)) {
            return Err(ApiError::new(
                StatusCode::FORBIDDEN,
                "SESSION_NOT_ACKNOWLEDGED",
                "submissions require an acknowledged session token",
            ));
        }
    }
    let trace = parse_trace(&body).map_err(ApiError::schema)?;
    let report = validate_trace(&trace);
    let record = StoreRecord::from_report(trace, report);
    let response = SubmitResponse {
        id: record.trace.id.clone(),
        status: record.status,
        report: record.report.clone(),
    };

    state.store().insert(record).map_err(|e| match e {
        StoreError::DuplicateId(id) => ApiError::new(
            StatusCode::CONFLICT,
            "DUPLICATE_ID",
            format!("trace id {id:?} is already stored"),
        ),
        other => ApiError::storage(other),
    })?;

    let status = if response.status == RecordStatus::Approved {
        let every = state.config.rebuild_every;
        let n = state.approved_since_rebuild.fetch_add(1, Ordering::SeqCst) + 1;
        if every > 0 && n >= every {
            let state = state.clone();
            let _ = tokio::task::spawn_blocking(move || state.rebuild()).await;
        }
        StatusCode::CREATED
    } else {
        StatusCode::UNPROCESSABLE_ENTITY
    };
    Ok((status, Json(response)))
}

async fn export(State(state): State<Arc<AppState>>) -> impl IntoResponse {
    let body = state.store().export();
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body)
}

async fn stats(State(state): State<Arc<AppState>>) -> Json<StatsSummary> {
    Json(state.stats())
}

async fn rebuild(State(state): State<Arc<AppState>>) -> Result<Json<RebuildReport>, ApiError> {
    let snapshot = tokio::task::spawn_blocking(move || state.rebuild())
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "REBUILD_FAILED", e.to_string()))?;
    Ok(Json(snapshot.report()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestResponse {
    pub category: TaskCategory,
    pub model_version: u64,
    pub trace_count: usize,
    /// Probability that the task ends after the hint; absent when the
    /// hint's last step is unknown to the model.
    pub end_probability: Option<f64>,
    pub unknown_state: bool,
    pub suggestions: Vec<Suggestion>,
}

async fn suggest(
    State(state): State<Arc<AppState>>,
    Path(slug): Path<String>,
    body: Bytes,
) -> Result<Json<SuggestResponse>, ApiError> {
    let category = category_of(&slug)?;
    let mut request: serde_json::Value = if body.is_empty() {
        json!({})
    } else {
        serde_json::from_slice(&body).map_err(|e| {
            ApiError::schema(SchemaError {
                kind: tasktrace::SchemaErrorKind::Syntax,
                path: String::new(),
                message: e.to_string(),
            })
        })?
    };
    let Some(fields) = request.as_object_mut() else {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "SCHEMA", "request body must be an object"));
    };
    if let Some(extra) = fields.keys().find(|k| *k != "hint" && *k != "k") {
        let mut e = ApiError::new(StatusCode::BAD_REQUEST, "SCHEMA", format!("unknown field {extra:?}"));
        e.body.path = Some(extra.clone());
        return Err(e);
    }
    let hint = match fields.remove("hint") {
        None | Some(serde_json::Value::Null) => Vec::new(),
        Some(v) => steps_from_value(v, "hint").map_err(ApiError::schema)?,
    };
    let k = match fields.remove("k") {
        None | Some(serde_json::Value::Null) => state.config.suggest.k,
        Some(v) => v.as_u64().ok_or_else(|| {
            let mut e = ApiError::new(StatusCode::BAD_REQUEST, "SCHEMA", "k must be a non-negative integer");
            e.body.path = Some("k".into());
            e
        })? as usize,
    };

    let snapshot = state.snapshot();
    let entry = snapshot.models.get(&category).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "MODEL_NOT_READY",
            format!("no model for category {category}"),
        )
    })?;
    let config = SuggestConfig { k, ..state.config.suggest };
    let next = suggest_next(&entry.model, &hint, k);
    let suggestions = suggest_edits(&entry.model, &entry.traces, &hint, &config);
    Ok(Json(SuggestResponse {
        category,
        model_version: snapshot.version,
        trace_count: entry.traces.len(),
        end_probability: next.end_probability,
        unknown_state: next.unknown_state,
        suggestions,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcknowledgeRequest {
    #[serde(default)]
    pub session: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcknowledgeResponse {
    pub session: String,
    pub acknowledged: bool,
}

async fn acknowledge(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Json<AcknowledgeResponse>, ApiError> {
    let request: AcknowledgeRequest = if body.iter().all(u8::is_ascii_whitespace) {
        AcknowledgeRequest::default()
    } else {
        serde_json::from_slice(&body)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "SCHEMA", e.to_string()))?
    };
    if request.session.as_deref().is_some_and(|s| s.trim().is_empty()) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "SCHEMA", "session must not be blank"));
    }
    let session = state
        .store()
        .acknowledge(request.session)
        .map_err(ApiError::storage)?;
    Ok(Json(AcknowledgeResponse {
        session,
        acknowledged: true,
    }))
}
