//! A puzzle, its ledger, and the analysis currently open on it.
//!
//! Every recorded move goes through [`Workbench::apply`]. Interactive
//! sessions, ledger replay and the automatic solver all drive the same
//! code, so a ledger written by one can be replayed by another.

use serde::Serialize;
use thiserror::Error;

use crate::error::AnalysisError;
use crate::exclusion::{
    assert_exclusion, conclude_cell, evaluate_cell_result, CellAnalysis, Justification,
    ResultValue, Selection,
};
use crate::grid::{parse_grid, CellRef, CellState, Dimension, Grid, Identity, ParseError};
use crate::ledger::{grid_digest, Ledger, MoveRecord, Payload, ValidationOutcome};
use crate::location::{
    assert_location_exclusion, count_and_conclude, LocationAnalysis, LocationConclusion,
};
use crate::mutual::{apply_mutual_exclusion, ExclusionReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpenAnalysis {
    Cell(CellAnalysis),
    Location(LocationAnalysis),
}

/// A move as the user submits it; what it produced is added when it is
/// recorded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    ExclusionAssert(Justification),
    LocationAssert {
        dim: Dimension,
        identity: Identity,
        position: CellRef,
        witness: CellRef,
    },
    MutualExclusionApply {
        dim: Dimension,
    },
    CellConclude(Selection),
    LocationConclude {
        dim: Dimension,
        identity: Identity,
    },
}

impl Move {
    /// The move a recorded payload was made from.
    pub fn from_payload(payload: &Payload) -> Move {
        match *payload {
            Payload::ExclusionAssert(j) => Move::ExclusionAssert(j),
            Payload::LocationAssert {
                dim,
                identity,
                position,
                witness,
            } => Move::LocationAssert {
                dim,
                identity,
                position,
                witness,
            },
            Payload::MutualExclusionApply { dim, .. } => Move::MutualExclusionApply { dim },
            Payload::CellConclude { selection, .. } => Move::CellConclude(selection),
            Payload::LocationConclude { dim, identity, .. } => {
                Move::LocationConclude { dim, identity }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellChange {
    pub cell: CellRef,
    pub before: CellState,
    pub after: CellState,
}

/// What one recorded move did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Applied {
    pub record: MoveRecord,
    pub changes: Vec<CellChange>,
    pub cell_result: Option<ResultValue>,
    pub report: Option<ExclusionReport>,
    pub location: Option<LocationConclusion>,
}

impl Applied {
    pub fn changed(&self) -> bool {
        !self.changes.is_empty()
    }
}

/// Requests refused outright. Nothing is recorded for these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkbenchError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("an analysis is already open ({0}); conclude it first")]
    AnalysisOpen(String),
    #[error("no analysis is open")]
    NoAnalysis,
    #[error("the open analysis is {open}, not {given}")]
    Mismatch { open: String, given: String },
}

#[derive(Clone, Debug)]
pub struct Workbench {
    grid: Grid,
    ledger: Ledger,
    open: Option<OpenAnalysis>,
}

impl Workbench {
    pub fn from_puzzle(puzzle: &str) -> Result<Self, ParseError> {
        Ok(Workbench::from_grid(parse_grid(puzzle)?))
    }

    /// The ledger header records only placed identities, so a replay
    /// reproduces this workbench only when `grid` holds nothing else.
    pub fn from_grid(grid: Grid) -> Self {
        Workbench {
            ledger: Ledger::new(grid.to_puzzle_string()),
            grid,
            open: None,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn open_analysis(&self) -> Option<&OpenAnalysis> {
        self.open.as_ref()
    }

    pub fn digest(&self) -> String {
        grid_digest(&self.grid)
    }

    pub fn open_cell(&mut self, selection: Selection) -> Result<&CellAnalysis, WorkbenchError> {
        self.refuse_if_open()?;
        let analysis = CellAnalysis::open_selection(&self.grid, selection)?;
        match self.open.insert(OpenAnalysis::Cell(analysis)) {
            OpenAnalysis::Cell(a) => Ok(a),
            OpenAnalysis::Location(_) => unreachable!(),
        }
    }

    pub fn open_location(
        &mut self,
        dim: Dimension,
        identity: Identity,
    ) -> Result<&LocationAnalysis, WorkbenchError> {
        self.refuse_if_open()?;
        let analysis = LocationAnalysis::open(&self.grid, dim, identity)?;
        match self.open.insert(OpenAnalysis::Location(analysis)) {
            OpenAnalysis::Location(a) => Ok(a),
            OpenAnalysis::Cell(_) => unreachable!(),
        }
    }

    fn refuse_if_open(&self) -> Result<(), WorkbenchError> {
        match &self.open {
            Some(open) => Err(WorkbenchError::AnalysisOpen(describe_open(open))),
            None => Ok(()),
        }
    }

    /// The open cell analysis for `selection`, opening one if nothing is
    /// open.
    fn cell_analysis(&mut self, selection: Selection) -> Result<&mut CellAnalysis, WorkbenchError> {
        if self.open.is_none() {
            self.open_cell(selection)?;
        }
        let matches =
            matches!(&self.open, Some(OpenAnalysis::Cell(a)) if a.selection() == Some(selection));
        if !matches {
            return Err(WorkbenchError::Mismatch {
                open: self.open.as_ref().map(describe_open).unwrap_or_default(),
                given: describe_selection(selection),
            });
        }
        match self.open.as_mut() {
            Some(OpenAnalysis::Cell(a)) => Ok(a),
            _ => unreachable!(),
        }
    }

    fn location_analysis(
        &mut self,
        dim: Dimension,
        identity: Identity,
    ) -> Result<&mut LocationAnalysis, WorkbenchError> {
        if self.open.is_none() {
            self.open_location(dim, identity)?;
        }
        let matches = matches!(&self.open, Some(OpenAnalysis::Location(a)) if a.dim == dim && a.identity == identity);
        if !matches {
            return Err(WorkbenchError::Mismatch {
                open: self.open.as_ref().map(describe_open).unwrap_or_default(),
                given: format!("location analysis of {identity} in {dim}"),
            });
        }
        match self.open.as_mut() {
            Some(OpenAnalysis::Location(a)) => Ok(a),
            _ => unreachable!(),
        }
    }

    /// Validates, applies and records one move.
    ///
    /// Moves rejected on integrity grounds are still recorded, with the
    /// grid untouched. A conclusion always closes its analysis.
    pub fn apply(&mut self, mv: Move) -> Result<Applied, WorkbenchError> {
        let before = self.grid.clone();
        let mut cell_result = None;
        let mut report = None;
        let mut location = None;

        let (payload, outcome) = match mv {
            Move::ExclusionAssert(j) => {
                let grid = self.grid.clone();
                let analysis = self.cell_analysis(Selection::Cell(j.target))?;
                let outcome = assert_exclusion(analysis, &grid, j)?;
                (Payload::ExclusionAssert(j), outcome)
            }
            Move::LocationAssert {
                dim,
                identity,
                position,
                witness,
            } => {
                let grid = self.grid.clone();
                let analysis = self.location_analysis(dim, identity)?;
                let outcome = assert_location_exclusion(analysis, &grid, position, witness);
                (
                    Payload::LocationAssert {
                        dim,
                        identity,
                        position,
                        witness,
                    },
                    outcome,
                )
            }
            Move::MutualExclusionApply { dim } => {
                self.refuse_if_open()?;
                let outcome = match apply_mutual_exclusion(&self.grid, dim) {
                    Ok((next, r)) => {
                        self.grid = next;
                        report = Some(r);
                        ValidationOutcome::valid()
                    }
                    Err(e) => ValidationOutcome::integrity(e.to_string()),
                };
                (
                    Payload::MutualExclusionApply {
                        dim,
                        report: report.clone(),
                    },
                    outcome,
                )
            }
            Move::CellConclude(selection) => {
                let grid = self.grid.clone();
                let analysis = self.cell_analysis(selection)?.clone();
                self.open = None;
                let (result, outcome) = match selection {
                    Selection::Row(row) => (
                        ResultValue::ErrorSentinel,
                        ValidationOutcome::integrity(format!(
                            "row {row} is selected but no cell has been looked up"
                        )),
                    ),
                    Selection::Cell(_) => match conclude_cell(&analysis, &grid) {
                        Ok((next, _)) => {
                            self.grid = next;
                            (evaluate_cell_result(&analysis), ValidationOutcome::valid())
                        }
                        Err(AnalysisError::Integrity(reason)) => (
                            ResultValue::ErrorSentinel,
                            ValidationOutcome::integrity(reason),
                        ),
                        Err(e) => return Err(e.into()),
                    },
                };
                cell_result = Some(result);
                (Payload::CellConclude { selection, result }, outcome)
            }
            Move::LocationConclude { dim, identity } => {
                let grid = self.grid.clone();
                let analysis = self.location_analysis(dim, identity)?.clone();
                self.open = None;
                let (next, conclusion) = count_and_conclude(&analysis, &grid);
                self.grid = next;
                let (solved, outcome) = match &conclusion {
                    LocationConclusion::SolvedAt(cell) => (Some(*cell), ValidationOutcome::valid()),
                    LocationConclusion::Inconclusive(_) => (None, ValidationOutcome::valid()),
                    LocationConclusion::IntegrityError(reason) => {
                        (None, ValidationOutcome::integrity(reason.clone()))
                    }
                };
                let rejected = outcome.is_integrity_error();
                location = Some(conclusion);
                (
                    Payload::LocationConclude {
                        dim,
                        identity,
                        excluded: analysis.exclusion_count(),
                        solved,
                        rejected,
                    },
                    outcome,
                )
            }
        };

        let record = MoveRecord {
            seq: self.ledger.next_seq(),
            payload,
            outcome,
            grid_digest: grid_digest(&self.grid),
        };
        self.ledger
            .append(record.clone())
            .expect("sequence numbers come from the ledger itself");
        let changes = CellRef::all()
            .filter(|&c| before.get(c) != self.grid.get(c))
            .map(|c| CellChange {
                cell: c,
                before: before.get(c),
                after: self.grid.get(c),
            })
            .collect();
        Ok(Applied {
            record,
            changes,
            cell_result,
            report,
            location,
        })
    }
}

fn describe_selection(selection: Selection) -> String {
    match selection {
        Selection::Cell(c) => format!("exclusion analysis of {c}"),
        Selection::Row(r) => format!("exclusion analysis of row {r} (no cell)"),
    }
}

fn describe_open(open: &OpenAnalysis) -> String {
    match open {
        OpenAnalysis::Cell(a) => match a.selection() {
            Some(s) => describe_selection(s),
            None => "exclusion analysis".to_owned(),
        },
        OpenAnalysis::Location(a) => {
            format!("location analysis of {} in {}", a.identity, a.dim)
        }
    }
}
