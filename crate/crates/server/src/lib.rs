//! HTTP front end for the dialogue engine. Every route lives under `/v1`
//! except the liveness probe.

mod error;
pub mod wire;

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::routing::{get, post};
use axum::{Json, Router};

use dialogue_core::brain::BrainError;
use dialogue_core::{Brain, SessionState, SessionStatus};

pub use error::ApiError;
use wire::*;

type Api<T> = Result<Json<T>, ApiError>;

/// Runs a brain call off the async executor; brain calls do blocking file IO.
async fn blocking<T, F>(brain: &Arc<Brain>, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&Brain) -> Result<T, BrainError> + Send + 'static,
{
    let brain = brain.clone();
    tokio::task::spawn_blocking(move || f(&brain))
        .await
        .map_err(|e| ApiError::new(axum::http::StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
        .map_err(ApiError::from)
}

pub fn router(brain: Arc<Brain>) -> Router {
    let v1 = Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(start).get(list))
        .route("/sessions/{id}", get(session))
        .route("/sessions/{id}/utterance", post(utterance))
        .route("/sessions/{id}/resume", post(resume))
        .route("/sessions/{id}/suspend", post(suspend))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/sessions/{id}/woz/take", post(woz_take))
        .route("/sessions/{id}/woz/release", post(woz_release))
        .route("/sessions/{id}/woz/override", post(woz_override));
    Router::new()
        .route("/healthz", get(healthz))
        .nest("/v1", v1)
        .with_state(brain)
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn start(State(brain): State<Arc<Brain>>, body: Result<Json<StartRequest>, JsonRejection>) -> Api<SessionTurnResponse> {
    let Json(req) = body?;
    let (state, reply) = blocking(&brain, move |b| b.start_session(&req.user_id, req.session_number)).await?;
    Ok(Json(SessionTurnResponse {
        session_id: state.session_id,
        turn: TurnResponse::from(&reply),
    }))
}

async fn list(State(brain): State<Arc<Brain>>) -> Json<SessionList> {
    let sessions = brain.sessions().iter().map(SessionSummary::from).collect();
    Json(SessionList { sessions })
}

async fn session(State(brain): State<Arc<Brain>>, Path(id): Path<String>) -> Api<SessionState> {
    Ok(Json(brain.state(&id)?))
}

async fn utterance(
    State(brain): State<Arc<Brain>>,
    Path(id): Path<String>,
    body: Result<Json<UtteranceRequest>, JsonRejection>,
) -> Api<TurnResponse> {
    let Json(req) = body?;
    if req.session_id.as_deref().is_some_and(|s| s != id) {
        return Err(ApiError::mismatch("session_id does not match the path"));
    }
    if let Some(user) = &req.user_id {
        if brain.state(&id)?.user_id != *user {
            return Err(ApiError::mismatch(format!("session {id} belongs to another user")));
        }
    }
    let reply = blocking(&brain, move |b| b.respond(&id, &req.text)).await?;
    Ok(Json(TurnResponse::from(&reply)))
}

async fn resume(State(brain): State<Arc<Brain>>, Path(id): Path<String>) -> Api<SessionTurnResponse> {
    let state = brain.state(&id)?;
    if state.status != SessionStatus::Suspended {
        return Err(BrainError::NothingToResume(state.user_id).into());
    }
    let (state, reply) = blocking(&brain, move |b| b.resume_session(&state.user_id)).await?;
    Ok(Json(SessionTurnResponse {
        session_id: state.session_id,
        turn: TurnResponse::from(&reply),
    }))
}

async fn suspend(State(brain): State<Arc<Brain>>, Path(id): Path<String>) -> Api<SessionSummary> {
    let state = blocking(&brain, move |b| b.suspend(&id)).await?;
    Ok(Json(SessionSummary::from(&state)))
}

async fn transcript(
    State(brain): State<Arc<Brain>>,
    Path(id): Path<String>,
    query: Result<Query<TranscriptQuery>, QueryRejection>,
) -> Api<TranscriptResponse> {
    let Query(q) = query?;
    let (state, turns) = blocking(&brain, move |b| {
        let turns = b.transcript(&id, q.from)?;
        Ok((b.state(&id)?, turns))
    })
    .await?;
    let next_from = turns.last().map_or(q.from, |t| t.turn_index + 1);
    Ok(Json(TranscriptResponse {
        session_id: state.session_id,
        status: state.status,
        woz_active: state.woz_active,
        escalation_pending: state.escalation_pending,
        next_from,
        turns,
    }))
}

async fn woz_take(State(brain): State<Arc<Brain>>, Path(id): Path<String>) -> Api<SessionSummary> {
    let state = blocking(&brain, move |b| b.woz_take(&id)).await?;
    Ok(Json(SessionSummary::from(&state)))
}

async fn woz_release(State(brain): State<Arc<Brain>>, Path(id): Path<String>) -> Api<SessionSummary> {
    let state = blocking(&brain, move |b| b.woz_release(&id)).await?;
    Ok(Json(SessionSummary::from(&state)))
}

async fn woz_override(
    State(brain): State<Arc<Brain>>,
    Path(id): Path<String>,
    body: Result<Json<OverrideRequest>, JsonRejection>,
) -> Api<TurnResponse> {
    let Json(req) = body?;
    let reply = blocking(&brain, move |b| b.woz_override(&id, &req.text)).await?;
    Ok(Json(TurnResponse::from(&reply)))
}
