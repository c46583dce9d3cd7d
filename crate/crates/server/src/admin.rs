//! JSON-over-HTTP admin API.
//!
//! - `GET /health`
//! - `GET /devices`, `GET /devices/{id}`
//! - `POST /devices/{id}/approve`, `/ban`, `/rehabilitate` (404 unknown ID, 409 illegal transition)
//! - `GET /events`: server-sent events, backlog first, then live

use std::convert::Infallible;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream, StreamExt};
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;

use crate::context::Context;
use crate::error::RegistryError;
use crate::events::{Event, EventKind};

pub fn router(ctx: Arc<Context>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/devices", get(list_devices))
        .route("/devices/{id}", get(get_device))
        .route("/devices/{id}/approve", post(approve))
        .route("/devices/{id}/ban", post(ban))
        .route("/devices/{id}/rehabilitate", post(rehabilitate))
        .route("/events", get(events))
        .with_state(ctx)
}

async fn health(State(ctx): State<Arc<Context>>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "devices": ctx.registry().len() }))
}

async fn list_devices(State(ctx): State<Arc<Context>>) -> Response {
    Json(ctx.devices()).into_response()
}

async fn get_device(State(ctx): State<Arc<Context>>, Path(id): Path<i64>) -> Response {
    match ctx.registry().get(id) {
        Some(r) => Json(r.clone()).into_response(),
        None => error_response(RegistryError::NotFound(id)),
    }
}

async fn approve(State(ctx): State<Arc<Context>>, Path(id): Path<i64>) -> Response {
    transition(&ctx, id, EventKind::Approve)
}

async fn ban(State(ctx): State<Arc<Context>>, Path(id): Path<i64>) -> Response {
    transition(&ctx, id, EventKind::Ban)
}

async fn rehabilitate(State(ctx): State<Arc<Context>>, Path(id): Path<i64>) -> Response {
    transition(&ctx, id, EventKind::Rehabilitate)
}

fn transition(ctx: &Context, id: i64, kind: EventKind) -> Response {
    match ctx.admin_action(id, kind) {
        Ok(record) => Json(record).into_response(),
        Err(e) => error_response(e),
    }
}

fn error_response(e: RegistryError) -> Response {
    let status = match e {
        RegistryError::NotFound(_) => StatusCode::NOT_FOUND,
        RegistryError::IllegalTransition { .. } => StatusCode::CONFLICT,
        RegistryError::Io(_) | RegistryError::Corrupt(_) => StatusCode::INTERNAL_SERVER_ERROR,
    };
    (status, Json(json!({ "error": e.to_string() }))).into_response()
}

async fn events(State(ctx): State<Arc<Context>>) -> Sse<impl Stream<Item = Result<SseEvent, Infallible>>> {
    let (backlog, rx) = ctx.events.subscribe();
    let live = stream::unfold(rx, |mut rx| async move {
        loop {
            match rx.recv().await {
                Ok(event) => return Some((event, rx)),
                Err(RecvError::Lagged(_)) => continue,
                Err(RecvError::Closed) => return None,
            }
        }
    });
    let all = stream::iter(backlog).chain(live).map(|e| Ok(to_sse(&e)));
    Sse::new(all).keep_alive(KeepAlive::new().interval(Duration::from_secs(15)))
}

fn to_sse(e: &Event) -> SseEvent {
    SseEvent::default()
        .id(e.seq.to_string())
        .event(e.kind.as_str())
        .data(serde_json::to_string(e).expect("event serializes"))
}
