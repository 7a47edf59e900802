//! HTTP JSON API and frame event stream over a single live session.
//!
//! The session sits behind one mutex. Requests and the ticker take it briefly;
//! patch computation runs on the blocking pool between `begin_fix` and
//! `finish_fix`, during which the session reports `patching` and refuses
//! anything that would mutate it.

use std::convert::Infallible;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Duration;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::broadcast;

use patchbot_core::env::{Action, Level, RewardComponents, WorldState};
use patchbot_core::error::{PatchError, SessionError};
use patchbot_core::explain::Question;
use patchbot_core::mdp::StateKey;
use patchbot_core::patch::FixRequest;
use patchbot_core::session::{Brain, Frame, Mode, Outcome, Session, SessionConfig};

/// Simulated ticks per wall-clock second at speed 1.
pub const TICK_HZ: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub level: Level,
    pub brain: Brain,
    pub session: SessionConfig,
    /// Multiplier on the tick rate.
    pub speed: f64,
}

#[derive(Clone)]
pub struct AppState(Arc<Shared>);

struct Shared {
    config: ServerConfig,
    session: Mutex<Option<Session>>,
    events: broadcast::Sender<FrameEvent>,
}

/// One frame as pushed to clients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameEvent {
    pub index: usize,
    pub tick: u64,
    pub world: WorldState,
    pub state_key: StateKey,
    pub action: Option<Action>,
    pub rewards: RewardComponents,
}

impl From<&Frame> for FrameEvent {
    fn from(f: &Frame) -> Self {
        FrameEvent {
            index: f.index,
            tick: f.tick,
            world: f.world.clone(),
            state_key: f.state_key.clone(),
            action: f.action,
            rewards: f.rewards,
        }
    }
}

impl AppState {
    pub fn new(config: ServerConfig) -> AppState {
        let (events, _) = broadcast::channel(1024);
        AppState(Arc::new(Shared { config, session: Mutex::new(None), events }))
    }

    pub fn subscribe(&self) -> broadcast::Receiver<FrameEvent> {
        self.0.events.subscribe()
    }

    fn lock(&self) -> MutexGuard<'_, Option<Session>> {
        self.0.session.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Advances a running session by one frame and broadcasts it.
    pub fn tick(&self) -> Option<FrameEvent> {
        let mut guard = self.lock();
        let frame = guard.as_mut()?.tick()?;
        let event = FrameEvent::from(&frame);
        // Nobody listening is fine.
        let _ = self.0.events.send(event.clone());
        Some(event)
    }

    pub fn tick_period(&self) -> Duration {
        Duration::from_secs_f64(1.0 / (TICK_HZ * self.0.config.speed.max(1e-3)))
    }
}

/// Steps the session at the configured rate for as long as the runtime lives.
pub fn spawn_ticker(state: AppState) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut interval = tokio::time::interval(state.tick_period());
        interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
        loop {
            interval.tick().await;
            state.tick();
        }
    })
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/session", get(get_session))
        .route("/control", post(control))
        .route("/ask", post(ask))
        .route("/fix", post(fix))
        .route("/timeline", get(timeline))
        .route("/events", get(events))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl ToString) -> ApiError {
        ApiError { status, body: json!({ "error": message.to_string(), "kind": kind }) }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        use SessionError::*;
        let (status, kind) = match &e {
            AlreadyStarted => (StatusCode::CONFLICT, "already_started"),
            NotStarted => (StatusCode::CONFLICT, "not_started"),
            Busy => (StatusCode::CONFLICT, "busy"),
            NotPaused => (StatusCode::CONFLICT, "not_paused"),
            FrameOutOfRange { .. } => (StatusCode::BAD_REQUEST, "frame_out_of_range"),
            NoPolicy => (StatusCode::INTERNAL_SERVER_ERROR, "no_policy"),
            Explain(_) => (StatusCode::UNPROCESSABLE_ENTITY, "explain"),
            Patch(PatchError::InfeasibleFix(_)) => (StatusCode::UNPROCESSABLE_ENTITY, "infeasible_fix"),
            Patch(PatchError::PatchFailed(stats)) => {
                let mut err = ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "patch_failed", &e);
                err.body["stats"] = json!(stats);
                return err;
            }
            Patch(_) => (StatusCode::BAD_REQUEST, "invalid_fix"),
            Level(_) | Format(_) | Solve(_) | Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError::new(status, kind, e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelMeta {
    pub width: usize,
    pub height: usize,
    pub finish_column: usize,
    pub rows: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub started: bool,
    pub mode: Option<Mode>,
    pub frames: usize,
    pub current_frame: usize,
    pub outcome: Option<Outcome>,
    pub patches: usize,
    pub level: LevelMeta,
}

fn view(config: &ServerConfig, session: Option<&Session>) -> SessionView {
    let level = &config.level;
    let meta = LevelMeta {
        width: level.width,
        height: level.height,
        finish_column: level.finish_column,
        rows: level.to_text().lines().map(str::to_string).collect(),
    };
    match session {
        None => SessionView {
            started: false,
            mode: None,
            frames: 0,
            current_frame: 0,
            outcome: None,
            patches: 0,
            level: meta,
        },
        Some(s) => SessionView {
            started: true,
            mode: Some(s.mode()),
            frames: s.trace().len(),
            current_frame: s.current_frame(),
            outcome: s.outcome(),
            patches: s.patches().len(),
            level: meta,
        },
    }
}

async fn get_session(State(state): State<AppState>) -> Json<SessionView> {
    let guard = state.lock();
    Json(view(&state.0.config, guard.as_ref()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Start,
    Pause,
    Continue,
    Seek,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControlRequest {
    pub op: Op,
    #[serde(default)]
    pub frame: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ControlResponse {
    pub session: SessionView,
    /// The frame sought to, for `seek`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameEvent>,
}

async fn control(State(state): State<AppState>, Json(req): Json<ControlRequest>) -> ApiResult<ControlResponse> {
    let config = &state.0.config;
    let mut guard = state.lock();
    let mut frame = None;
    match req.op {
        Op::Start => {
            if guard.is_some() {
                return Err(SessionError::AlreadyStarted.into());
            }
            let s = Session::start(config.level.clone(), Some(config.brain.clone()), config.session.clone())?;
            let _ = state.0.events.send(FrameEvent::from(s.frame()));
            *guard = Some(s);
        }
        op => {
            let s = guard.as_mut().ok_or(SessionError::NotStarted)?;
            match op {
                Op::Pause => {
                    s.pause()?;
                }
                Op::Continue => {
                    let restarted = s.outcome().is_some();
                    s.resume()?;
                    if restarted {
                        let _ = state.0.events.send(FrameEvent::from(s.frame()));
                    }
                }
                Op::Seek => {
                    let index = req.frame.ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", "seek needs a frame"))?;
                    frame = Some(FrameEvent::from(s.seek(index)?));
                }
                Op::Start => unreachable!(),
            }
        }
    }
    Ok(Json(ControlResponse { session: view(config, guard.as_ref()), frame }))
}

async fn ask(State(state): State<AppState>, Json(question): Json<Question>) -> ApiResult<Value> {
    let guard = state.lock();
    let s = guard.as_ref().ok_or(SessionError::NotStarted)?;
    let (explanation, contrast) = s.ask(question)?;
    Ok(Json(json!({
        "frame": s.current_frame(),
        "explanation": explanation,
        "contrast": contrast,
        "texts": [explanation.rendered_text, contrast.rendered_text],
    })))
}

async fn fix(State(state): State<AppState>, Json(request): Json<FixRequest>) -> ApiResult<Value> {
    let job = {
        let mut guard = state.lock();
        guard.as_mut().ok_or(SessionError::NotStarted)?.begin_fix(request)?
    };
    let result = tokio::task::spawn_blocking(move || job.run()).await.unwrap_or_else(|e| std::panic::resume_unwind(e.into_panic()));
    let mut guard = state.lock();
    let s = guard.as_mut().ok_or(SessionError::NotStarted)?;
    let before = s.policy().clone();
    let patch = s.finish_fix(result)?;
    Ok(Json(json!({
        "id": patch.id,
        "goal": patch.goal,
        "action": patch.action,
        "predicate": patch.predicate.to_text(),
        "relevantStates": patch.relevant_states(&before).len(),
        "stats": patch.stats,
    })))
}

#[derive(Debug, Clone, Deserialize)]
pub struct TimelineQuery {
    #[serde(default)]
    pub from: usize,
}

async fn timeline(State(state): State<AppState>, Query(q): Query<TimelineQuery>) -> ApiResult<Vec<FrameEvent>> {
    let guard = state.lock();
    let s = guard.as_ref().ok_or(SessionError::NotStarted)?;
    Ok(Json(s.trace().frames.iter().skip(q.from).map(FrameEvent::from).collect()))
}

async fn events(State(state): State<AppState>) -> Sse<impl Stream<Item = Result<Event, Infallible>>> {
    let rx = state.subscribe();
    let stream = futures::stream::unfold(rx, |mut rx| async move {
        loop {
            match rx.recv().await {
                Ok(frame) => {
                    let event = Event::default().event("frame").json_data(&frame).expect("frames serialize");
                    return Some((Ok(event), rx));
                }
                // A slow client skips frames; /timeline has them all.
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => return None,
            }
        }
    });
    Sse::new(stream).keep_alive(KeepAlive::default())
}
