use std::fmt;

use serde::Serialize;

use super::{Ledger, MoveKind, MoveRecord, Payload};
use crate::grid::{CellRef, Identity};

/// Summary of a ledger for a human reviewer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReviewerReport {
    pub puzzle: String,
    pub moves: usize,
    pub valid: usize,
    pub incorrect: usize,
    pub integrity: usize,
    pub redundant: usize,
    /// Moves kept despite a rationale that does not hold.
    pub flagged: Vec<FlaggedMove>,
    pub integrity_attempts: Vec<RejectedMove>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlaggedMove {
    pub seq: u64,
    pub kind: MoveKind,
    pub subject: Option<CellRef>,
    pub identity: Option<Identity>,
    pub witness: Option<CellRef>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedMove {
    pub seq: u64,
    pub kind: MoveKind,
    pub reason: String,
}

fn subject_of(record: &MoveRecord) -> (Option<CellRef>, Option<Identity>, Option<CellRef>) {
    match &record.payload {
        Payload::ExclusionAssert(j) => (Some(j.target), Some(j.excluded), Some(j.witness)),
        Payload::LocationAssert {
            identity,
            position,
            witness,
            ..
        } => (Some(*position), Some(*identity), Some(*witness)),
        Payload::MutualExclusionApply { .. } => (None, None, None),
        Payload::CellConclude { selection, .. } => (selection.cell(), None, None),
        Payload::LocationConclude {
            identity, solved, ..
        } => (*solved, Some(*identity), None),
    }
}

pub fn reviewer_report(ledger: &Ledger) -> ReviewerReport {
    let mut report = ReviewerReport {
        puzzle: ledger.puzzle().to_owned(),
        moves: ledger.len(),
        valid: 0,
        incorrect: 0,
        integrity: 0,
        redundant: 0,
        flagged: Vec::new(),
        integrity_attempts: Vec::new(),
    };
    for record in ledger.records() {
        let reason = record.outcome.reason().unwrap_or_default().to_owned();
        if record.outcome.flags.redundant {
            report.redundant += 1;
        }
        if record.outcome.is_valid() {
            report.valid += 1;
        } else if record.outcome.is_incorrect() {
            report.incorrect += 1;
            let (subject, identity, witness) = subject_of(record);
            report.flagged.push(FlaggedMove {
                seq: record.seq,
                kind: record.kind(),
                subject,
                identity,
                witness,
                reason,
            });
        } else {
            report.integrity += 1;
            report.integrity_attempts.push(RejectedMove {
                seq: record.seq,
                kind: record.kind(),
                reason,
            });
        }
    }
    report
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_owned(), T::to_string)
}

impl fmt::Display for ReviewerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "puzzle    {}", self.puzzle)?;
        writeln!(f, "moves     {}", self.moves)?;
        writeln!(f, "valid     {}", self.valid)?;
        writeln!(f, "incorrect {}", self.incorrect)?;
        writeln!(f, "integrity {}", self.integrity)?;
        writeln!(f, "redundant {}", self.redundant)?;
        if !self.flagged.is_empty() {
            writeln!(f)?;
            writeln!(f, "flagged for review:")?;
            writeln!(
                f,
                "{:>5}  {:<20} {:<7} {:<8} {:<7} reason",
                "seq", "kind", "subject", "identity", "witness"
            )?;
            for m in &self.flagged {
                writeln!(
                    f,
                    "{:>5}  {:<20} {:<7} {:<8} {:<7} {}",
                    m.seq,
                    m.kind.name(),
                    opt(&m.subject),
                    opt(&m.identity),
                    opt(&m.witness),
                    m.reason
                )?;
            }
        }
        if !self.integrity_attempts.is_empty() {
            writeln!(f)?;
            writeln!(f, "rejected attempts:")?;
            for m in &self.integrity_attempts {
                writeln!(f, "{:>5}  {:<20} {}", m.seq, m.kind.name(), m.reason)?;
            }
        }
        Ok(())
    }
}
