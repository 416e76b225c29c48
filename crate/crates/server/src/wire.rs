//! JSON bodies of the `/v1` API.

use serde::{Deserialize, Serialize};

use dialogue_core::brain::Reply;
use dialogue_core::{SessionState, SessionStatus, TranscriptTurn};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartRequest {
    pub user_id: String,
    pub session_number: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UtteranceRequest {
    /// Optional; checked against the session's owner when present.
    #[serde(default)]
    pub user_id: Option<String>,
    /// Optional; checked against the path when present.
    #[serde(default)]
    pub session_id: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverrideRequest {
    pub text: String,
}

/// One robot turn as the client renders it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnResponse {
    pub text: String,
    pub options: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video: Option<String>,
    pub escalate_to_woz: bool,
    pub session_complete: bool,
    pub turn_index: u64,
}

impl From<&Reply> for TurnResponse {
    fn from(reply: &Reply) -> Self {
        let robot = reply.turn.robot.clone().unwrap_or_default();
        TurnResponse {
            text: reply.turn.text.clone(),
            options: robot.options,
            image: robot.image,
            video: robot.video,
            escalate_to_woz: reply.turn.escalate_to_woz,
            session_complete: reply.turn.session_complete,
            turn_index: reply.turn_index,
        }
    }
}

/// Reply to start and resume: the turn plus the session it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionTurnResponse {
    pub session_id: String,
    #[serde(flatten)]
    pub turn: TurnResponse,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptQuery {
    #[serde(default)]
    pub from: u64,
}

/// A transcript slice together with the session flags an operator console
/// polls for.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptResponse {
    pub session_id: String,
    pub status: SessionStatus,
    pub woz_active: bool,
    pub escalation_pending: bool,
    /// Cursor for the next poll.
    pub next_from: u64,
    pub turns: Vec<TranscriptTurn>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub user_id: String,
    pub session_number: u32,
    pub status: SessionStatus,
    pub woz_active: bool,
    pub escalation_pending: bool,
    pub reprompt_count: u32,
}

impl From<&SessionState> for SessionSummary {
    fn from(s: &SessionState) -> Self {
        SessionSummary {
            session_id: s.session_id.clone(),
            user_id: s.user_id.clone(),
            session_number: s.session_number,
            status: s.status,
            woz_active: s.woz_active,
            escalation_pending: s.escalation_pending,
            reprompt_count: s.reprompt_count,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionList {
    pub sessions: Vec<SessionSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}
