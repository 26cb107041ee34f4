//! Closed input domains and the per-context "drop-down" lists.

use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};
use sudoku_audit_core::location::open_positions;
use sudoku_audit_core::workbench::OpenAnalysis;
use sudoku_audit_core::{CellRef, Dimension, DimensionKind, Identity, MoveKind, Workbench};

use crate::error::ApiError;

#[derive(Clone, Copy, Debug)]
pub enum Domain {
    Identity,
    Cell,
    Dimension,
    Row,
    Mode,
    Kind,
    Context,
}

impl Domain {
    pub fn values(self) -> Vec<String> {
        match self {
            Domain::Identity | Domain::Row => (1..=9).map(|v: u8| v.to_string()).collect(),
            Domain::Cell => CellRef::all().map(|c| c.to_string()).collect(),
            Domain::Dimension => Dimension::all().map(|d| d.to_string()).collect(),
            Domain::Mode => vec!["exclusion".into(), "location".into()],
            Domain::Kind => MoveKind::ALL.iter().map(|k| k.name().to_string()).collect(),
            Domain::Context => CONTEXTS.iter().map(|c| c.to_string()).collect(),
        }
    }
}

pub const CONTEXTS: [&str; 4] = ["session", "mutual-exclusion", "exclusion", "location"];

/// A JSON object body. An empty body reads as `{}`.
pub fn object(body: &[u8]) -> Result<Map<String, Value>, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(Map::new());
    }
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(ApiError::bad_request("request body must be a JSON object")),
        Err(e) => Err(ApiError::bad_request(format!("malformed JSON: {e}"))),
    }
}

fn text(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

/// Parses `key` against its closed domain. Strings and numbers are both
/// accepted, so `"identity": 6` and `"identity": "6"` agree.
pub fn optional<T: FromStr>(
    body: &Map<String, Value>,
    key: &'static str,
    domain: Domain,
) -> Result<Option<T>, ApiError> {
    let Some(raw) = body.get(key) else {
        return Ok(None);
    };
    let parsed = text(raw)
        .filter(|t| domain.values().contains(t))
        .and_then(|t| t.parse().ok());
    match parsed {
        Some(v) => Ok(Some(v)),
        None => Err(ApiError::bad_field(
            key,
            format!("`{key}` must be one of the listed values, got {raw}"),
            domain.values(),
        )),
    }
}

pub fn required<T: FromStr>(
    body: &Map<String, Value>,
    key: &'static str,
    domain: Domain,
) -> Result<T, ApiError> {
    optional(body, key, domain)?
        .ok_or_else(|| ApiError::bad_field(key, format!("missing field `{key}`"), domain.values()))
}

#[derive(Serialize)]
pub struct LocationChoice {
    pub dim: Dimension,
    pub identities: Vec<Identity>,
}

#[derive(Serialize)]
pub struct WitnessChoice {
    pub via: Dimension,
    pub witnesses: Vec<CellRef>,
}

#[derive(Serialize)]
pub struct Citation {
    pub identity: Identity,
    pub witness: CellRef,
}

#[derive(Serialize)]
pub struct PositionChoice {
    pub position: CellRef,
    pub witnesses: Vec<CellRef>,
}

/// What the open-analysis preconditions accept, field by field.
/// Combinations that repeat an earlier citation are listed under `cited`
/// and rejected when submitted.
#[derive(Serialize)]
#[serde(tag = "context", rename_all = "kebab-case")]
pub enum AllowedInputs {
    Session {
        targets: Vec<CellRef>,
        rows: Vec<u8>,
        locations: Vec<LocationChoice>,
    },
    MutualExclusion {
        dimensions: Vec<Dimension>,
    },
    Exclusion {
        target: Option<CellRef>,
        identities: Vec<Identity>,
        vias: Vec<WitnessChoice>,
        cited: Vec<Citation>,
    },
    Location {
        dim: Dimension,
        identity: Identity,
        positions: Vec<PositionChoice>,
    },
}

pub fn current_context(wb: &Workbench) -> &'static str {
    match wb.open_analysis() {
        None => "session",
        Some(OpenAnalysis::Cell(_)) => "exclusion",
        Some(OpenAnalysis::Location(_)) => "location",
    }
}

/// `None` when `context` is not the one the session is in.
pub fn allowed_inputs(wb: &Workbench, context: &str) -> Option<AllowedInputs> {
    let grid = wb.grid();
    match (context, wb.open_analysis()) {
        ("session", None) => Some(AllowedInputs::Session {
            targets: CellRef::all()
                .filter(|&c| !grid.get(c).is_determined())
                .collect(),
            rows: (1..=9).collect(),
            locations: Dimension::all()
                .map(|dim| LocationChoice {
                    dim,
                    identities: Identity::all()
                        .filter(|&id| open_positions(grid, dim, id).is_ok())
                        .collect(),
                })
                .collect(),
        }),
        ("mutual-exclusion", None) => Some(AllowedInputs::MutualExclusion {
            dimensions: Dimension::all().collect(),
        }),
        ("exclusion", Some(OpenAnalysis::Cell(a))) => {
            let Some(target) = a.target else {
                return Some(AllowedInputs::Exclusion {
                    target: None,
                    identities: Vec::new(),
                    vias: Vec::new(),
                    cited: Vec::new(),
                });
            };
            let last = a.working.as_single();
            Some(AllowedInputs::Exclusion {
                target: Some(target),
                identities: Identity::all().filter(|&id| Some(id) != last).collect(),
                vias: [DimensionKind::Col, DimensionKind::Box]
                    .into_iter()
                    .map(|kind| {
                        let via = target.dimension(kind);
                        WitnessChoice {
                            via,
                            witnesses: via.cells().into_iter().filter(|&c| c != target).collect(),
                        }
                    })
                    .collect(),
                cited: a
                    .auto_row_exclusions
                    .iter()
                    .map(|&(identity, witness)| Citation { identity, witness })
                    .chain(a.user_justifications.iter().map(|j| Citation {
                        identity: j.excluded,
                        witness: j.witness,
                    }))
                    .collect(),
            })
        }
        ("location", Some(OpenAnalysis::Location(la))) => Some(AllowedInputs::Location {
            dim: la.dim,
            identity: la.identity,
            positions: la
                .remaining()
                .map(|position| PositionChoice {
                    position,
                    witnesses: la.witness_domain(position),
                })
                .collect(),
        }),
        _ => None,
    }
}
