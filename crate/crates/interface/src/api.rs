//! JSON HTTP API over [`SessionStore`].
//!
//! | method | path                      | body          |
//! |--------|---------------------------|---------------|
//! | GET    | `/health`                 |               |
//! | POST   | `/sessions`               | `CreateSession` |
//! | GET    | `/sessions/{id}`          |               |
//! | POST   | `/sessions/{id}/rounds`   | `PlayRounds`  |
//! | GET    | `/sessions/{id}/analysis` |               |
//!
//! Errors are `{"error": ..., "field": ...}` with status 404 (unknown
//! session), 409 (session state forbids the request) or 422 (invalid body).

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::session::{CreateSession, PlayRounds, SessionError, SessionStore};

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn invalid(field: Option<String>, error: String) -> Self {
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: ErrorBody { error, field },
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let (status, field) = match &e {
            SessionError::NotFound(_) => (StatusCode::NOT_FOUND, None),
            SessionError::Conflict(_) => (StatusCode::CONFLICT, None),
            SessionError::Invalid(s) => (StatusCode::UNPROCESSABLE_ENTITY, Some(s.field.clone())),
            SessionError::Core(_) => (StatusCode::UNPROCESSABLE_ENTITY, None),
        };
        let error = match &e {
            SessionError::Invalid(s) => s.message.clone(),
            _ => e.to_string(),
        };
        Self {
            status,
            body: ErrorBody { error, field },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = (path != ".").then_some(path);
        ApiError::invalid(field, e.into_inner().to_string())
    })
}

pub fn router(store: SessionStore) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_status))
        .route("/sessions/{id}/rounds", post(play_rounds))
        .route("/sessions/{id}/analysis", get(session_analysis))
        .with_state(store)
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn create_session(
    State(store): State<SessionStore>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let req: CreateSession = parse_body(&body)?;
    let status = store.create(&req)?;
    Ok((StatusCode::CREATED, Json(status)))
}

async fn session_status(
    State(store): State<SessionStore>,
    Path(id): Path<String>,
) -> ApiResult<crate::session::SessionStatus> {
    Ok(Json(store.with_session(&id, |s| Ok(s.status()))?))
}

async fn play_rounds(
    State(store): State<SessionStore>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<crate::session::PlayResponse> {
    // Unknown sessions take precedence over body errors.
    store.with_session(&id, |_| Ok(()))?;
    let req: PlayRounds = parse_body(&body)?;
    Ok(Json(store.with_session(&id, |s| s.play(&req))?))
}

async fn session_analysis(
    State(store): State<SessionStore>,
    Path(id): Path<String>,
) -> ApiResult<crate::session::SessionAnalysis> {
    Ok(Json(store.with_session(&id, |s| s.analysis())?))
}

/// Serves the API until Ctrl-C.
pub async fn serve(addr: std::net::SocketAddr, store: SessionStore) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
