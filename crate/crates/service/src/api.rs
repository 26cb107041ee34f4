use std::sync::{Arc, MutexGuard};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sudoku_audit_core::exclusion::{Justification, Selection};
use sudoku_audit_core::ledger::{reviewer_report, Payload};
use sudoku_audit_core::location::LocationConclusion;
use sudoku_audit_core::mutual::ExclusionReport;
use sudoku_audit_core::workbench::{Applied, CellChange, OpenAnalysis};
use sudoku_audit_core::{
    parse_grid, CellRef, Identity, MoveKind, MoveRecord, ValidationOutcome, Workbench,
};

use crate::error::ApiError;
use crate::inputs::{self, allowed_inputs, current_context, Domain};
use crate::state::{AppState, Session, SharedSession};
use crate::views::{AnalysisView, SessionView};

pub fn routes() -> Router<Arc<AppState>> {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/analysis", post(open_analysis))
        .route("/sessions/{id}/moves", post(submit_move))
        .route("/sessions/{id}/conclude", post(conclude))
        .route("/sessions/{id}/mutual-exclusion", post(mutual_exclusion))
        .route("/sessions/{id}/ledger", get(ledger))
        .route("/sessions/{id}/report", get(report))
        .route("/sessions/{id}/allowed-inputs", get(allowed))
}

fn session(state: &AppState, id: &str) -> Result<SharedSession, ApiError> {
    state.get(id).ok_or_else(|| ApiError::not_found(id))
}

fn lock(shared: &SharedSession) -> MutexGuard<'_, Session> {
    shared
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

async fn create(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let body = inputs::object(&body)?;
    let puzzle = match body.get("puzzle") {
        Some(Value::String(p)) => p,
        Some(_) => {
            return Err(ApiError::bad_request(
                "`puzzle` must be a string of 81 cells",
            ))
        }
        None => return Err(ApiError::bad_request("missing field `puzzle`")),
    };
    let grid = parse_grid(puzzle).map_err(|e| ApiError::bad_request(e.to_string()))?;
    if let Some((dim, id)) = grid.first_conflict() {
        return Err(ApiError::bad_request(format!(
            "inconsistent presets: {id} appears twice in {dim}"
        )));
    }
    let shared = state.insert(Workbench::from_grid(grid))?;
    let view = SessionView::of(&lock(&shared));
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn show(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<SessionView>, ApiError> {
    let shared = session(&state, &id)?;
    let view = SessionView::of(&lock(&shared));
    Ok(Json(view))
}

async fn open_analysis(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<AnalysisView>, ApiError> {
    let body = inputs::object(&body)?;
    let mode: String = inputs::required(&body, "mode", Domain::Mode)?;
    let shared = session(&state, &id)?;
    let mut session = lock(&shared);
    let opened = match mode.as_str() {
        "exclusion" => {
            let selection = match inputs::optional::<CellRef>(&body, "target", Domain::Cell)? {
                Some(target) => Selection::Cell(target),
                None => Selection::Row(inputs::required(&body, "row", Domain::Row)?),
            };
            session.wb.open_cell(selection)?;
            session.wb.open_analysis()
        }
        _ => {
            let dim = inputs::required(&body, "dim", Domain::Dimension)?;
            let identity = inputs::required(&body, "identity", Domain::Identity)?;
            session.wb.open_location(dim, identity)?;
            session.wb.open_analysis()
        }
    };
    Ok(Json(AnalysisView::of(opened.expect("just opened"))))
}

/// Everything one recorded move produced. Field names follow the ledger.
#[derive(Serialize)]
struct MoveResponse {
    record: MoveRecord,
    outcome: ValidationOutcome,
    changes: Vec<CellChange>,
    result: Option<String>,
    report: Option<ExclusionReport>,
    location: Option<LocationConclusion>,
    session: SessionView,
}

fn recorded(session: &Session, applied: Applied) -> Response {
    let result = match &applied.record.payload {
        p @ (Payload::CellConclude { .. } | Payload::LocationConclude { .. }) => p
            .fields()
            .into_iter()
            .find(|(k, _)| *k == "result")
            .map(|(_, v)| v),
        _ => None,
    };
    let status = if applied.record.outcome.is_integrity_error() {
        StatusCode::UNPROCESSABLE_ENTITY
    } else {
        StatusCode::OK
    };
    let body = MoveResponse {
        outcome: applied.record.outcome.clone(),
        record: applied.record,
        changes: applied.changes,
        result,
        report: applied.report,
        location: applied.location,
        session: SessionView::of(session),
    };
    (status, Json(body)).into_response()
}

/// Applies a move and persists the ledger while the session lock is held.
fn apply(
    state: &AppState,
    session: &mut Session,
    mv: sudoku_audit_core::Move,
) -> Result<Response, ApiError> {
    let applied = session.wb.apply(mv)?;
    state.persist(session)?;
    Ok(recorded(session, applied))
}

/// `field` from the body, or else from the open analysis.
fn or_open<T: std::str::FromStr>(
    body: &Map<String, Value>,
    field: &'static str,
    domain: Domain,
    open: Option<T>,
) -> Result<T, ApiError> {
    match inputs::optional(body, field, domain)? {
        Some(v) => Ok(v),
        None => open.ok_or_else(|| {
            ApiError::bad_field(field, format!("missing field `{field}`"), domain.values())
        }),
    }
}

fn build_move(
    body: &Map<String, Value>,
    wb: &Workbench,
) -> Result<sudoku_audit_core::Move, ApiError> {
    use sudoku_audit_core::Move;

    let kind: MoveKind = inputs::required(body, "kind", Domain::Kind)?;
    let (cell, location) = match wb.open_analysis() {
        Some(OpenAnalysis::Cell(a)) => (a.target, None),
        Some(OpenAnalysis::Location(la)) => (None, Some((la.dim, la.identity))),
        None => (None, None),
    };
    Ok(match kind {
        MoveKind::ExclusionAssert => {
            let target: CellRef = or_open(body, "target", Domain::Cell, cell)?;
            Move::ExclusionAssert(Justification {
                target,
                excluded: inputs::required(body, "excluded", Domain::Identity)?,
                witness: inputs::required(body, "witness", Domain::Cell)?,
                via: inputs::required(body, "via", Domain::Dimension)?,
            })
        }
        MoveKind::LocationAssert => Move::LocationAssert {
            dim: or_open(body, "dim", Domain::Dimension, location.map(|l| l.0))?,
            identity: or_open::<Identity>(
                body,
                "identity",
                Domain::Identity,
                location.map(|l| l.1),
            )?,
            position: inputs::required(body, "position", Domain::Cell)?,
            witness: inputs::required(body, "witness", Domain::Cell)?,
        },
        MoveKind::MutualExclusionApply => Move::MutualExclusionApply {
            dim: inputs::required(body, "dim", Domain::Dimension)?,
        },
        MoveKind::CellConclude => {
            match inputs::optional::<CellRef>(body, "target", Domain::Cell)? {
                Some(target) => Move::CellConclude(Selection::Cell(target)),
                None => match inputs::optional::<u8>(body, "row", Domain::Row)? {
                    Some(row) => Move::CellConclude(Selection::Row(row)),
                    None => Move::CellConclude(open_selection(wb)?),
                },
            }
        }
        MoveKind::LocationConclude => Move::LocationConclude {
            dim: or_open(body, "dim", Domain::Dimension, location.map(|l| l.0))?,
            identity: or_open(body, "identity", Domain::Identity, location.map(|l| l.1))?,
        },
    })
}

fn open_selection(wb: &Workbench) -> Result<Selection, ApiError> {
    match wb.open_analysis() {
        Some(OpenAnalysis::Cell(a)) => a
            .selection()
            .ok_or_else(|| ApiError::conflict("the open analysis has no selection")),
        _ => Err(ApiError::conflict("no exclusion analysis is open")),
    }
}

async fn submit_move(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let body = inputs::object(&body)?;
    let shared = session(&state, &id)?;
    let mut session = lock(&shared);
    let mv = build_move(&body, &session.wb)?;
    apply(&state, &mut session, mv)
}

async fn conclude(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    use sudoku_audit_core::Move;

    let shared = session(&state, &id)?;
    let mut session = lock(&shared);
    let mv = match session.wb.open_analysis() {
        None => return Err(ApiError::conflict("no analysis is open")),
        Some(OpenAnalysis::Cell(_)) => Move::CellConclude(open_selection(&session.wb)?),
        Some(OpenAnalysis::Location(la)) => Move::LocationConclude {
            dim: la.dim,
            identity: la.identity,
        },
    };
    apply(&state, &mut session, mv)
}

async fn mutual_exclusion(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let body = inputs::object(&body)?;
    let dim = inputs::required(&body, "dim", Domain::Dimension)?;
    let shared = session(&state, &id)?;
    let mut session = lock(&shared);
    apply(
        &state,
        &mut session,
        sudoku_audit_core::Move::MutualExclusionApply { dim },
    )
}

async fn ledger(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let shared = session(&state, &id)?;
    let text = lock(&shared).wb.ledger().to_text();
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

#[derive(Deserialize)]
struct ReportQuery {
    format: Option<String>,
}

async fn report(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ReportQuery>,
) -> Result<Response, ApiError> {
    let shared = session(&state, &id)?;
    let report = reviewer_report(lock(&shared).wb.ledger());
    match q.format.as_deref() {
        None | Some("json") => Ok(Json(report).into_response()),
        Some("text") => Ok((
            [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
            report.to_string(),
        )
            .into_response()),
        Some(other) => Err(ApiError::bad_field(
            "format",
            format!("unknown report format `{other}`"),
            vec!["json".into(), "text".into()],
        )),
    }
}

#[derive(Deserialize)]
struct ContextQuery {
    context: Option<String>,
}

async fn allowed(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ContextQuery>,
) -> Result<Response, ApiError> {
    let shared = session(&state, &id)?;
    let session = lock(&shared);
    let context = match q.context {
        Some(c) if inputs::CONTEXTS.contains(&c.as_str()) => c,
        Some(c) => {
            return Err(ApiError::bad_field(
                "context",
                format!("unknown context `{c}`"),
                Domain::Context.values(),
            ))
        }
        None => current_context(&session.wb).to_string(),
    };
    match allowed_inputs(&session.wb, &context) {
        Some(allowed) => Ok(Json(allowed).into_response()),
        None => Err(ApiError::conflict(format!(
            "the session is in the `{}` context, not `{context}`",
            current_context(&session.wb)
        ))),
    }
}
