//! Grid model, witness-checked analyses, an append-only move ledger with
//! deterministic replay, and reference solvers.

pub mod error;
pub mod exclusion;
pub mod grid;
pub mod ledger;
pub mod location;
pub mod mutual;
pub mod oracle;
pub mod workbench;

pub use error::AnalysisError;
pub use grid::{
    parse_grid, CandidateSet, CellRef, CellState, Dimension, DimensionKind, Grid, Identity,
};
pub use ledger::{Ledger, MoveKind, MoveRecord, ValidationOutcome};
pub use workbench::{Move, Workbench, WorkbenchError};
