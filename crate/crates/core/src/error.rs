use thiserror::Error;

use crate::grid::{CellRef, Dimension, Identity};

/// Usage errors from the analysis templates. These are refused outright and
/// never reach the ledger; integrity failures that should be recorded are
/// reported as outcomes instead, except where noted.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("{0} is already determined ({1})")]
    TargetDetermined(CellRef, &'static str),
    #[error("no cell is under investigation")]
    NoTarget,
    #[error("the open analysis is for {open}, not {given}")]
    WrongTarget { open: CellRef, given: CellRef },
    #[error("{identity} is already placed in {dim} at {at}")]
    IdentityPlaced {
        identity: Identity,
        dim: Dimension,
        at: CellRef,
    },
    /// A conclusion that would break the grid; recorded by the caller as an
    /// integrity outcome.
    #[error("integrity: {0}")]
    Integrity(String),
}
