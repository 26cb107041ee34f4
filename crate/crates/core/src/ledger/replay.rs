use thiserror::Error;

use super::{Ledger, LedgerParseError};
use crate::grid::ParseError;
use crate::workbench::{Move, Workbench};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Parse(#[from] LedgerParseError),
    #[error("ledger puzzle: {0}")]
    Puzzle(#[from] ParseError),
    #[error("divergence at seq {seq}: recorded `{recorded}`, replay gave `{replayed}`")]
    Divergence {
        seq: u64,
        recorded: String,
        replayed: String,
    },
}

impl ReplayError {
    pub fn divergent_seq(&self) -> Option<u64> {
        match self {
            ReplayError::Divergence { seq, .. } => Some(*seq),
            _ => None,
        }
    }
}

/// Rebuilds a workbench by re-applying every recorded move to the puzzle.
/// Each recomputed record, digest included, must equal the recorded one.
pub fn replay(ledger: &Ledger) -> Result<Workbench, ReplayError> {
    let mut wb = Workbench::from_puzzle(ledger.puzzle())?;
    for recorded in ledger.records() {
        let mv = Move::from_payload(&recorded.payload);
        let replayed = match wb.apply(mv) {
            Ok(applied) => applied.record.to_line(),
            Err(e) => format!("refused: {e}"),
        };
        if replayed != recorded.to_line() {
            return Err(ReplayError::Divergence {
                seq: recorded.seq,
                recorded: recorded.to_line(),
                replayed,
            });
        }
    }
    Ok(wb)
}

pub fn replay_text(text: &str) -> Result<Workbench, ReplayError> {
    replay(&Ledger::parse(text)?)
}
