//! Append-only move ledger and its line-oriented file format.
//!
//! ```text
//! version=1
//! puzzle=<81 chars>
//! digest=sha256
//! 1|ExclusionAssert|target=R1C5;excluded=5;witness=R4C5;via=col5|valid|<hex>
//! ```
//!
//! Every record carries the digest of the grid after the move, so a replay
//! can pin any divergence to the first record that disagrees.

mod outcome;
mod replay;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exclusion::{Justification, ResultValue, Selection};
use crate::grid::{CandidateSet, CellRef, Dimension, DomainError, Grid, Identity};
use crate::mutual::{ExclusionReport, PairGroup, Revision};

pub use outcome::{Flags, ValidationOutcome, Verdict};
pub use replay::{replay, replay_text, ReplayError};
pub use report::{reviewer_report, FlaggedMove, RejectedMove, ReviewerReport};

pub const FORMAT_VERSION: u32 = 1;
pub const DIGEST_NAME: &str = "sha256";

/// SHA-256 over [`Grid::canonical_form`], lowercase hex.
pub fn grid_digest(grid: &Grid) -> String {
    let hash = Sha256::digest(grid.canonical_form().as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MoveKind {
    ExclusionAssert,
    LocationAssert,
    MutualExclusionApply,
    CellConclude,
    LocationConclude,
}

impl MoveKind {
    pub const ALL: [MoveKind; 5] = [
        MoveKind::ExclusionAssert,
        MoveKind::LocationAssert,
        MoveKind::MutualExclusionApply,
        MoveKind::CellConclude,
        MoveKind::LocationConclude,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::ExclusionAssert => "ExclusionAssert",
            MoveKind::LocationAssert => "LocationAssert",
            MoveKind::MutualExclusionApply => "MutualExclusionApply",
            MoveKind::CellConclude => "CellConclude",
            MoveKind::LocationConclude => "LocationConclude",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveKind {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ExclusionAssert" => MoveKind::ExclusionAssert,
            "LocationAssert" => MoveKind::LocationAssert,
            "MutualExclusionApply" => MoveKind::MutualExclusionApply,
            "CellConclude" => MoveKind::CellConclude,
            "LocationConclude" => MoveKind::LocationConclude,
            _ => return Err(DomainError::new("move kind", s)),
        })
    }
}

/// Kind-specific fields of a record: the move's inputs plus what it
/// produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    ExclusionAssert(Justification),
    LocationAssert {
        dim: Dimension,
        identity: Identity,
        position: CellRef,
        witness: CellRef,
    },
    MutualExclusionApply {
        dim: Dimension,
        /// Absent when the application was rejected.
        report: Option<ExclusionReport>,
    },
    CellConclude {
        selection: Selection,
        result: ResultValue,
    },
    LocationConclude {
        dim: Dimension,
        identity: Identity,
        excluded: usize,
        solved: Option<CellRef>,
        rejected: bool,
    },
}

impl Payload {
    pub fn kind(&self) -> MoveKind {
        match self {
            Payload::ExclusionAssert(_) => MoveKind::ExclusionAssert,
            Payload::LocationAssert { .. } => MoveKind::LocationAssert,
            Payload::MutualExclusionApply { .. } => MoveKind::MutualExclusionApply,
            Payload::CellConclude { .. } => MoveKind::CellConclude,
            Payload::LocationConclude { .. } => MoveKind::LocationConclude,
        }
    }

    /// `key=value` pairs in their fixed order.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        match self {
            Payload::ExclusionAssert(j) => vec![
                ("target", j.target.to_string()),
                ("excluded", j.excluded.to_string()),
                ("witness", j.witness.to_string()),
                ("via", j.via.to_string()),
            ],
            Payload::LocationAssert {
                dim,
                identity,
                position,
                witness,
            } => vec![
                ("dim", dim.to_string()),
                ("identity", identity.to_string()),
                ("position", position.to_string()),
                ("witness", witness.to_string()),
            ],
            Payload::MutualExclusionApply { dim, report } => {
                let mut fields = vec![("dim", dim.to_string())];
                if let Some(r) = report {
                    let groups: Vec<String> = r
                        .groups
                        .iter()
                        .map(|g| {
                            format!("{}+{}@{}{}", g.members[0], g.members[1], g.pair.0, g.pair.1)
                        })
                        .collect();
                    let revised: Vec<String> = r
                        .revised
                        .iter()
                        .map(|v| format!("{}:{}>{}", v.cell, v.before, v.after))
                        .collect();
                    fields.push(("groups", groups.join(",")));
                    fields.push(("revised", revised.join(",")));
                    fields.push(("parity", r.parity_total.to_string()));
                }
                fields
            }
            Payload::CellConclude { selection, result } => {
                let mut fields = match selection {
                    Selection::Cell(c) => vec![("target", c.to_string())],
                    Selection::Row(r) => vec![("row", r.to_string())],
                };
                fields.push(("result", result.to_string()));
                fields
            }
            Payload::LocationConclude {
                dim,
                identity,
                excluded,
                solved,
                rejected,
            } => {
                let result = if *rejected {
                    "#Error".to_owned()
                } else {
                    solved.map_or_else(|| ".".to_owned(), |c| c.to_string())
                };
                vec![
                    ("dim", dim.to_string()),
                    ("identity", identity.to_string()),
                    ("excluded", excluded.to_string()),
                    ("result", result),
                ]
            }
        }
    }

    pub fn to_text(&self) -> String {
        self.fields()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse(kind: MoveKind, text: &str) -> Result<Payload, String> {
        let fields: Vec<(&str, &str)> = text
            .split(';')
            .map(|kv| {
                kv.split_once('=')
                    .ok_or_else(|| format!("`{kv}` is not key=value"))
            })
            .collect::<Result<_, _>>()?;
        let mut reader = FieldReader { fields, at: 0 };
        let payload = match kind {
            MoveKind::ExclusionAssert => Payload::ExclusionAssert(Justification {
                target: reader.parse("target")?,
                excluded: reader.parse("excluded")?,
                witness: reader.parse("witness")?,
                via: reader.parse("via")?,
            }),
            MoveKind::LocationAssert => Payload::LocationAssert {
                dim: reader.parse("dim")?,
                identity: reader.parse("identity")?,
                position: reader.parse("position")?,
                witness: reader.parse("witness")?,
            },
            MoveKind::MutualExclusionApply => {
                let dim: Dimension = reader.parse("dim")?;
                let report = if reader.done() {
                    None
                } else {
                    let groups = reader
                        .list("groups")?
                        .into_iter()
                        .map(|g| parse_group(dim, g))
                        .collect::<Result<_, _>>()?;
                    let revised = reader
                        .list("revised")?
                        .into_iter()
                        .map(parse_revision)
                        .collect::<Result<_, _>>()?;
                    let parity = reader.parse("parity")?;
                    Some(ExclusionReport::from_parts(dim, groups, revised, parity))
                };
                Payload::MutualExclusionApply { dim, report }
            }
            MoveKind::CellConclude => {
                let selection = match reader.peek_key() {
                    Some("row") => {
                        let row: u8 = reader.parse("row")?;
                        if !(1..=9).contains(&row) {
                            return Err(format!("row {row} out of range"));
                        }
                        Selection::Row(row)
                    }
                    _ => Selection::Cell(reader.parse("target")?),
                };
                Payload::CellConclude {
                    selection,
                    result: reader.parse("result")?,
                }
            }
            MoveKind::LocationConclude => {
                let dim = reader.parse("dim")?;
                let identity = reader.parse("identity")?;
                let excluded = reader.parse("excluded")?;
                let (solved, rejected) = match reader.take("result")? {
                    "#Error" => (None, true),
                    "." => (None, false),
                    cell => (
                        Some(cell.parse().map_err(|e: DomainError| e.to_string())?),
                        false,
                    ),
                };
                Payload::LocationConclude {
                    dim,
                    identity,
                    excluded,
                    solved,
                    rejected,
                }
            }
        };
        if !reader.done() {
            return Err(format!("unexpected field `{}`", reader.fields[reader.at].0));
        }
        Ok(payload)
    }
}

struct FieldReader<'a> {
    fields: Vec<(&'a str, &'a str)>,
    at: usize,
}

impl<'a> FieldReader<'a> {
    fn done(&self) -> bool {
        self.at == self.fields.len()
    }

    fn peek_key(&self) -> Option<&'a str> {
        self.fields.get(self.at).map(|(k, _)| *k)
    }

    fn take(&mut self, key: &str) -> Result<&'a str, String> {
        match self.fields.get(self.at) {
            Some((k, v)) if *k == key => {
                self.at += 1;
                Ok(v)
            }
            Some((k, _)) => Err(format!("expected `{key}`, found `{k}`")),
            None => Err(format!("missing `{key}`")),
        }
    }

    fn parse<T>(&mut self, key: &str) -> Result<T, String>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let raw = self.take(key)?;
        raw.parse().map_err(|e: T::Err| format!("{key}: {e}"))
    }

    fn list(&mut self, key: &str) -> Result<Vec<&'a str>, String> {
        let raw = self.take(key)?;
        Ok(if raw.is_empty() {
            Vec::new()
        } else {
            raw.split(',').collect()
        })
    }
}

fn parse_group(dim: Dimension, text: &str) -> Result<PairGroup, String> {
    let bad = || format!("malformed group `{text}`");
    let (members, pair) = text.split_once('@').ok_or_else(bad)?;
    let (a, b) = members.split_once('+').ok_or_else(bad)?;
    let pair: CandidateSet = pair.parse().map_err(|_| bad())?;
    Ok(PairGroup {
        dim,
        members: [a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?],
        pair: pair.as_pair().ok_or_else(bad)?,
    })
}

fn parse_revision(text: &str) -> Result<Revision, String> {
    let bad = || format!("malformed revision `{text}`");
    let (cell, sets) = text.split_once(':').ok_or_else(bad)?;
    let (before, after) = sets.split_once('>').ok_or_else(bad)?;
    Ok(Revision {
        cell: cell.parse().map_err(|_| bad())?,
        before: before.parse().map_err(|_| bad())?,
        after: after.parse().map_err(|_| bad())?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub seq: u64,
    pub payload: Payload,
    pub outcome: ValidationOutcome,
    pub grid_digest: String,
}

impl MoveRecord {
    pub fn kind(&self) -> MoveKind {
        self.payload.kind()
    }

    /// One ledger line, without the trailing newline.
    pub fn to_line(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}",
            self.seq,
            self.kind(),
            self.payload.to_text(),
            self.outcome,
            self.grid_digest
        )
    }

    pub fn parse_line(line: &str) -> Result<MoveRecord, String> {
        let mut head = line.splitn(4, '|');
        let seq = head.next().unwrap_or_default();
        let (kind, payload, rest) = match (head.next(), head.next(), head.next()) {
            (Some(k), Some(p), Some(rest)) => (k, p, rest),
            _ => return Err("expected seq|kind|payload|outcome|digest".to_owned()),
        };
        // the outcome reason is free text; the digest never contains '|'
        let (outcome, digest) = rest
            .rsplit_once('|')
            .ok_or_else(|| "missing digest".to_owned())?;
        let seq: u64 = seq
            .parse()
            .map_err(|_| format!("bad sequence number `{seq}`"))?;
        if seq.to_string() != head_seq(line) {
            return Err(format!(
                "non-canonical sequence number `{}`",
                head_seq(line)
            ));
        }
        let kind: MoveKind = kind.parse().map_err(|e: DomainError| e.to_string())?;
        let payload = Payload::parse(kind, payload)?;
        let outcome: ValidationOutcome = outcome.parse().map_err(|e: DomainError| e.to_string())?;
        if digest.len() != 64
            || !digest
                .bytes()
                .all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
        {
            return Err(format!("malformed digest `{digest}`"));
        }
        Ok(MoveRecord {
            seq,
            payload,
            outcome,
            grid_digest: digest.to_owned(),
        })
    }
}

fn head_seq(line: &str) -> &str {
    line.split('|').next().unwrap_or_default()
}

/// JSON view: the payload appears as an object keyed exactly like the
/// ledger's `key=value` fields.
impl Serialize for MoveRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let payload: serde_json_like::Fields = serde_json_like::Fields(self.payload.fields());
        let mut s = serializer.serialize_struct("MoveRecord", 6)?;
        s.serialize_field("seq", &self.seq)?;
        s.serialize_field("kind", &self.kind())?;
        s.serialize_field("payload", &payload)?;
        s.serialize_field("outcome", &self.outcome)?;
        s.serialize_field("grid_digest", &self.grid_digest)?;
        s.serialize_field("line", &self.to_line())?;
        s.end()
    }
}

mod serde_json_like {
    use serde::ser::SerializeMap;
    use serde::{Serialize, Serializer};

    pub struct Fields(pub Vec<(&'static str, String)>);

    impl Serialize for Fields {
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            let mut map = serializer.serialize_map(Some(self.0.len()))?;
            for (k, v) in &self.0 {
                map.serialize_entry(k, v)?;
            }
            map.end()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("ledger corruption: expected seq {expected}, got {found}")]
    SeqMismatch { expected: u64, found: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ledger line {line}: {message}")]
pub struct LedgerParseError {
    pub line: usize,
    pub message: String,
}

/// The puzzle plus every recorded move, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ledger {
    puzzle: String,
    records: Vec<MoveRecord>,
}

impl Ledger {
    /// `puzzle` should be the canonical 81-character form.
    pub fn new(puzzle: impl Into<String>) -> Self {
        Ledger {
            puzzle: puzzle.into(),
            records: Vec::new(),
        }
    }

    pub fn puzzle(&self) -> &str {
        &self.puzzle
    }

    pub fn records(&self) -> &[MoveRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn next_seq(&self) -> u64 {
        self.records.len() as u64 + 1
    }

    pub fn append(&mut self, record: MoveRecord) -> Result<(), LedgerError> {
        let expected = self.next_seq();
        if record.seq != expected {
            return Err(LedgerError::SeqMismatch {
                expected,
                found: record.seq,
            });
        }
        self.records.push(record);
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "version={FORMAT_VERSION}\npuzzle={}\ndigest={DIGEST_NAME}\n",
            self.puzzle
        );
        for record in &self.records {
            out.push_str(&record.to_line());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Ledger, LedgerParseError> {
        let err = |line: usize, message: String| LedgerParseError { line, message };
        if !text.ends_with('\n') {
            let last = text.lines().count().max(1);
            return Err(err(last, "file is truncated (no final newline)".into()));
        }
        let lines: Vec<&str> = text.lines().collect();
        let header = |n: usize, key: &str| -> Result<&str, LedgerParseError> {
            let line = lines
                .get(n)
                .ok_or_else(|| err(n + 1, format!("missing `{key}=` header")))?;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| err(n + 1, format!("expected `{key}=` header")))
        };
        let version = header(0, "version")?;
        if version != FORMAT_VERSION.to_string() {
            return Err(err(1, format!("unsupported version `{version}`")));
        }
        let puzzle = header(1, "puzzle")?;
        if puzzle.len() != 81
            || !puzzle
                .bytes()
                .all(|b| b == b'.' || (b'1'..=b'9').contains(&b))
        {
            return Err(err(
                2,
                "puzzle must be 81 characters of `.` and `1`-`9`".into(),
            ));
        }
        let digest = header(2, "digest")?;
        if digest != DIGEST_NAME {
            return Err(err(3, format!("unsupported digest `{digest}`")));
        }
        let mut ledger = Ledger::new(puzzle);
        for (i, line) in lines.iter().enumerate().skip(3) {
            let record = MoveRecord::parse_line(line).map_err(|m| err(i + 1, m))?;
            ledger
                .append(record)
                .map_err(|e| err(i + 1, e.to_string()))?;
        }
        Ok(ledger)
    }
}
