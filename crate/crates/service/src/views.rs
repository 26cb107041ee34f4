use serde::Serialize;
use sudoku_audit_core::exclusion::{evaluate_cell_result, Justification, ResultValue};
use sudoku_audit_core::ledger::reviewer_report;
use sudoku_audit_core::workbench::OpenAnalysis;
use sudoku_audit_core::{CandidateSet, CellRef, CellState, Dimension, Identity, Workbench};

use crate::state::Session;

#[derive(Serialize)]
pub struct SessionView {
    pub id: String,
    pub puzzle: String,
    pub grid_digest: String,
    pub moves: usize,
    pub complete: bool,
    pub review_flags: usize,
    pub grid: Vec<CellView>,
    pub open_analysis: Option<AnalysisView>,
}

#[derive(Serialize)]
pub struct CellView {
    pub cell: CellRef,
    #[serde(flatten)]
    pub state: CellState,
    /// Identities no placed peer rules out; a hint, never stored.
    pub hints: CandidateSet,
}

#[derive(Serialize)]
pub struct Citation {
    pub identity: Identity,
    pub witness: CellRef,
}

#[derive(Serialize)]
pub struct PositionView {
    pub position: CellRef,
    pub excluded: bool,
    pub witness: Option<CellRef>,
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AnalysisView {
    Exclusion {
        row: Option<u8>,
        target: Option<CellRef>,
        prior_status: Option<CellState>,
        auto_row_exclusions: Vec<Citation>,
        justifications: Vec<Justification>,
        working: CandidateSet,
        status: &'static str,
        pair_digits: String,
        posted_slots: [u8; 9],
        result: ResultValue,
    },
    Location {
        dim: Dimension,
        identity: Identity,
        positions: Vec<PositionView>,
        excluded: usize,
        remaining: usize,
    },
}

impl AnalysisView {
    pub fn of(open: &OpenAnalysis) -> Self {
        match open {
            OpenAnalysis::Cell(a) => AnalysisView::Exclusion {
                row: a.selected_row,
                target: a.target,
                prior_status: a.prior_status,
                auto_row_exclusions: a
                    .auto_row_exclusions
                    .iter()
                    .map(|&(identity, witness)| Citation { identity, witness })
                    .collect(),
                justifications: a.user_justifications.clone(),
                working: a.working,
                status: a.current_status.label(),
                pair_digits: a.pair_digits.clone(),
                posted_slots: a.posted_slots,
                result: evaluate_cell_result(a),
            },
            OpenAnalysis::Location(la) => AnalysisView::Location {
                dim: la.dim,
                identity: la.identity,
                positions: la
                    .open_positions
                    .iter()
                    .map(|&p| PositionView {
                        position: p,
                        excluded: la.is_excluded(p),
                        witness: la.exclusions.get(&p).map(|j| j.witness),
                    })
                    .collect(),
                excluded: la.exclusion_count(),
                remaining: la.remaining().count(),
            },
        }
    }
}

impl SessionView {
    pub fn of(session: &Session) -> Self {
        let wb: &Workbench = &session.wb;
        let grid = wb.grid();
        SessionView {
            id: session.id.clone(),
            puzzle: wb.ledger().puzzle().to_string(),
            grid_digest: wb.digest(),
            moves: wb.ledger().len(),
            complete: grid.is_complete(),
            review_flags: reviewer_report(wb.ledger()).flagged.len(),
            grid: grid
                .cells()
                .map(|(cell, state)| CellView {
                    cell,
                    state,
                    hints: grid.candidates(cell).unwrap_or_default(),
                })
                .collect(),
            open_analysis: wb.open_analysis().map(AnalysisView::of),
        }
    }
}
