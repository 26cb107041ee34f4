//! The 9×9 grid, its 27 overlapping dimensions, and per-cell state.
//!
//! Digits are identities, not magnitudes: nothing here does arithmetic on
//! them except the result machine in [`crate::exclusion`], which reproduces a
//! worksheet formula literally.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// A digit 1..=9 used as a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "u8")]
pub struct Identity(u8);

impl Identity {
    pub const fn new(value: u8) -> Option<Self> {
        if value >= 1 && value <= 9 {
            Some(Identity(value))
        } else {
            None
        }
    }

    pub const fn get(self) -> u8 {
        self.0
    }

    /// All nine identities in ascending order.
    pub fn all() -> impl Iterator<Item = Identity> + Clone {
        (1..=9).map(Identity)
    }

    fn bit(self) -> u16 {
        1 << self.0
    }
}

impl From<Identity> for u8 {
    fn from(id: Identity) -> u8 {
        id.0
    }
}

impl TryFrom<u8> for Identity {
    type Error = DomainError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Identity::new(value).ok_or_else(|| DomainError::new("identity", value.to_string()))
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Identity {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.as_bytes() {
            [b @ b'1'..=b'9'] => Ok(Identity(b - b'0')),
            _ => Err(DomainError::new("identity", s)),
        }
    }
}

/// A value outside one of the fixed input domains (identities, cell
/// references, dimensions).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{value}` is not a valid {domain}")]
pub struct DomainError {
    pub domain: &'static str,
    pub value: String,
}

impl DomainError {
    pub(crate) fn new(domain: &'static str, value: impl Into<String>) -> Self {
        DomainError {
            domain,
            value: value.into(),
        }
    }
}

/// A cell position, 1-based. Rendered as `R{row}C{col}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellRef {
    row: u8,
    col: u8,
}

impl CellRef {
    pub const fn new(row: u8, col: u8) -> Option<Self> {
        if row >= 1 && row <= 9 && col >= 1 && col <= 9 {
            Some(CellRef { row, col })
        } else {
            None
        }
    }

    /// Row-major index 0..81.
    pub fn from_index(index: usize) -> Self {
        assert!(index < 81, "cell index {index} out of range");
        CellRef {
            row: (index / 9) as u8 + 1,
            col: (index % 9) as u8 + 1,
        }
    }

    pub fn index(self) -> usize {
        (self.row as usize - 1) * 9 + (self.col as usize - 1)
    }

    pub fn row(self) -> u8 {
        self.row
    }

    pub fn col(self) -> u8 {
        self.col
    }

    /// All 81 cells in row-major order.
    pub fn all() -> impl Iterator<Item = CellRef> + Clone {
        (0..81).map(CellRef::from_index)
    }

    pub fn dimension(self, kind: DimensionKind) -> Dimension {
        match kind {
            DimensionKind::Row => Dimension::row(self.row),
            DimensionKind::Col => Dimension::col(self.col),
            DimensionKind::Box => Dimension::box_of(self),
        }
    }

    /// The cell's row, column and box, in that order.
    pub fn dimensions(self) -> [Dimension; 3] {
        [
            self.dimension(DimensionKind::Row),
            self.dimension(DimensionKind::Col),
            self.dimension(DimensionKind::Box),
        ]
    }

    /// The 20 cells sharing a row, column or box with this one, in
    /// row-major order.
    pub fn peers(self) -> Vec<CellRef> {
        CellRef::all()
            .filter(|&other| other != self && self.shares_dimension(other))
            .collect()
    }

    pub fn shares_dimension(self, other: CellRef) -> bool {
        self.row == other.row
            || self.col == other.col
            || Dimension::box_of(self) == Dimension::box_of(other)
    }
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}C{}", self.row, self.col)
    }
}

impl FromStr for CellRef {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.as_bytes() {
            [b'R', r @ b'1'..=b'9', b'C', c @ b'1'..=b'9'] => Ok(CellRef {
                row: r - b'0',
                col: c - b'0',
            }),
            _ => Err(DomainError::new("cell reference", s)),
        }
    }
}

impl Serialize for CellRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DimensionKind {
    Row,
    Col,
    Box,
}

impl DimensionKind {
    fn prefix(self) -> &'static str {
        match self {
            DimensionKind::Row => "row",
            DimensionKind::Col => "col",
            DimensionKind::Box => "box",
        }
    }
}

/// One of the 27 constraint groups. Rendered as `row3`, `col8`, `box1`.
///
/// Boxes are numbered 1..9 in reading order. Cells of a dimension are
/// always listed in row-major order, which is left-to-right for rows,
/// top-to-bottom for columns and reading order inside a box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension {
    kind: DimensionKind,
    index: u8,
}

impl Dimension {
    pub fn new(kind: DimensionKind, index: u8) -> Option<Self> {
        (1..=9)
            .contains(&index)
            .then_some(Dimension { kind, index })
    }

    pub fn row(index: u8) -> Self {
        Dimension::new(DimensionKind::Row, index).expect("row index in 1..=9")
    }

    pub fn col(index: u8) -> Self {
        Dimension::new(DimensionKind::Col, index).expect("column index in 1..=9")
    }

    pub fn boxed(index: u8) -> Self {
        Dimension::new(DimensionKind::Box, index).expect("box index in 1..=9")
    }

    /// Box index = 3·⌊(row−1)/3⌋ + ⌊(col−1)/3⌋ + 1.
    pub fn box_of(cell: CellRef) -> Self {
        let index = 3 * ((cell.row - 1) / 3) + (cell.col - 1) / 3 + 1;
        Dimension {
            kind: DimensionKind::Box,
            index,
        }
    }

    pub fn kind(self) -> DimensionKind {
        self.kind
    }

    pub fn index(self) -> u8 {
        self.index
    }

    /// All 27 dimensions: rows, then columns, then boxes.
    pub fn all() -> impl Iterator<Item = Dimension> + Clone {
        [DimensionKind::Row, DimensionKind::Col, DimensionKind::Box]
            .into_iter()
            .flat_map(|kind| (1..=9).map(move |index| Dimension { kind, index }))
    }

    pub fn cells(self) -> [CellRef; 9] {
        let i = self.index;
        std::array::from_fn(|k| {
            let k = k as u8;
            match self.kind {
                DimensionKind::Row => CellRef { row: i, col: k + 1 },
                DimensionKind::Col => CellRef { row: k + 1, col: i },
                DimensionKind::Box => CellRef {
                    row: 3 * ((i - 1) / 3) + k / 3 + 1,
                    col: 3 * ((i - 1) % 3) + k % 3 + 1,
                },
            }
        })
    }

    pub fn contains(self, cell: CellRef) -> bool {
        cell.dimension(self.kind) == self
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)
    }
}

impl FromStr for Dimension {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = || {
            let (prefix, rest) = s.split_at_checked(3)?;
            let kind = match prefix {
                "row" => DimensionKind::Row,
                "col" => DimensionKind::Col,
                "box" => DimensionKind::Box,
                _ => return None,
            };
            match rest.as_bytes() {
                [d @ b'1'..=b'9'] => Some(Dimension {
                    kind,
                    index: d - b'0',
                }),
                _ => None,
            }
        };
        parse().ok_or_else(|| DomainError::new("dimension", s))
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A subset of {1..9}, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CandidateSet(u16);

impl CandidateSet {
    pub const EMPTY: CandidateSet = CandidateSet(0);
    pub const FULL: CandidateSet = CandidateSet(0b11_1111_1110);

    pub fn single(id: Identity) -> Self {
        CandidateSet(id.bit())
    }

    pub fn contains(self, id: Identity) -> bool {
        self.0 & id.bit() != 0
    }

    pub fn insert(&mut self, id: Identity) {
        self.0 |= id.bit();
    }

    pub fn remove(&mut self, id: Identity) -> bool {
        let had = self.contains(id);
        self.0 &= !id.bit();
        had
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn difference(self, other: CandidateSet) -> CandidateSet {
        CandidateSet(self.0 & !other.0)
    }

    pub fn intersection(self, other: CandidateSet) -> CandidateSet {
        CandidateSet(self.0 & other.0)
    }

    pub fn union(self, other: CandidateSet) -> CandidateSet {
        CandidateSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Identity> {
        Identity::all().filter(move |&id| self.contains(id))
    }

    /// The sole member, if the set has exactly one.
    pub fn as_single(self) -> Option<Identity> {
        let mut it = self.iter();
        match (it.next(), it.next()) {
            (Some(id), None) => Some(id),
            _ => None,
        }
    }

    /// Both members in ascending order, if the set has exactly two.
    pub fn as_pair(self) -> Option<(Identity, Identity)> {
        let mut it = self.iter();
        match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => Some((a, b)),
            _ => None,
        }
    }
}

impl FromIterator<Identity> for CandidateSet {
    fn from_iter<T: IntoIterator<Item = Identity>>(iter: T) -> Self {
        let mut set = CandidateSet::EMPTY;
        for id in iter {
            set.insert(id);
        }
        set
    }
}

/// Digits in ascending order with no separator, e.g. `128`; the empty set is `-`.
impl fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        for id in self.iter() {
            write!(f, "{id}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for CandidateSet {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" {
            return Ok(CandidateSet::EMPTY);
        }
        let mut set = CandidateSet::EMPTY;
        let mut last = 0;
        for ch in s.chars() {
            let id: Identity = ch
                .to_string()
                .parse()
                .map_err(|_| DomainError::new("candidate set", s))?;
            // canonical form only: strictly ascending
            if id.get() <= last {
                return Err(DomainError::new("candidate set", s));
            }
            last = id.get();
            set.insert(id);
        }
        if set.is_empty() {
            return Err(DomainError::new("candidate set", s));
        }
        Ok(set)
    }
}

impl Serialize for CandidateSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Status of one cell.
///
/// `OneOfTwo` always holds its pair in ascending order, so two pairs are
/// equal exactly when they are structurally equal. Build it through
/// [`CellState::one_of_two`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellState {
    PreSet(Identity),
    Solved(Identity),
    OneOfTwo(Identity, Identity),
    Unresolved(CandidateSet),
}

impl CellState {
    pub fn one_of_two(a: Identity, b: Identity) -> Option<CellState> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(CellState::OneOfTwo(a, b)),
            std::cmp::Ordering::Greater => Some(CellState::OneOfTwo(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// The state a concluded working set is posted as: one candidate solves
    /// the cell, two make it "1 of 2", more leave it unresolved.
    pub fn concluded_from(set: CandidateSet) -> CellState {
        if let Some(id) = set.as_single() {
            CellState::Solved(id)
        } else if let Some((a, b)) = set.as_pair() {
            CellState::OneOfTwo(a, b)
        } else {
            CellState::Unresolved(set)
        }
    }

    pub fn is_determined(self) -> bool {
        matches!(self, CellState::PreSet(_) | CellState::Solved(_))
    }

    /// The placed identity of a pre-set or solved cell.
    pub fn placed(self) -> Option<Identity> {
        match self {
            CellState::PreSet(id) | CellState::Solved(id) => Some(id),
            _ => None,
        }
    }

    /// The identities this cell may still hold according to its own state.
    pub fn working_set(self) -> CandidateSet {
        match self {
            CellState::PreSet(id) | CellState::Solved(id) => CandidateSet::single(id),
            CellState::OneOfTwo(a, b) => [a, b].into_iter().collect(),
            CellState::Unresolved(set) => set,
        }
    }

    /// Worksheet status label.
    pub fn label(self) -> &'static str {
        match self {
            CellState::PreSet(_) => "Pre-Set",
            CellState::Solved(_) => "Solved",
            CellState::OneOfTwo(..) => "1 of 2",
            CellState::Unresolved(_) => "Unresolved",
        }
    }

    /// Compact token used in digests and ledger payloads: `p5`, `s5`,
    /// `t28`, `u1349`.
    pub fn token(self) -> String {
        match self {
            CellState::PreSet(id) => format!("p{id}"),
            CellState::Solved(id) => format!("s{id}"),
            CellState::OneOfTwo(a, b) => format!("t{a}{b}"),
            CellState::Unresolved(set) => format!("u{set}"),
        }
    }

    pub fn from_token(token: &str) -> Result<CellState, DomainError> {
        let err = || DomainError::new("cell state", token);
        let (tag, rest) = token.split_at_checked(1).ok_or_else(err)?;
        let state = match tag {
            "p" => CellState::PreSet(rest.parse().map_err(|_| err())?),
            "s" => CellState::Solved(rest.parse().map_err(|_| err())?),
            "t" => {
                let set: CandidateSet = rest.parse().map_err(|_| err())?;
                let (a, b) = set.as_pair().ok_or_else(err)?;
                CellState::OneOfTwo(a, b)
            }
            "u" => CellState::Unresolved(rest.parse().map_err(|_| err())?),
            _ => return Err(err()),
        };
        Ok(state)
    }
}

/// `{"status": "1 of 2", "value": null, "candidates": [2, 8]}`; `value` is
/// set for placed cells only.
impl Serialize for CellState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("CellState", 3)?;
        s.serialize_field("status", self.label())?;
        s.serialize_field("value", &self.placed())?;
        s.serialize_field("candidates", &self.working_set())?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("puzzle must have 81 cells after removing whitespace, found {0}")]
    WrongLength(usize),
    #[error("illegal character {ch:?} at cell {position}")]
    IllegalChar { position: usize, ch: char },
    #[error(
        "grid carries the error sentinel `#Error`; an unresolved analysis was carried forward"
    )]
    ErrorSentinel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("{0} is already determined ({1})")]
    Determined(CellRef, &'static str),
}

/// The authoritative puzzle state. Values are immutable; every change
/// produces a new grid through [`Grid::with_cell`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    cells: [CellState; 81],
}

impl Default for Grid {
    fn default() -> Self {
        Grid::empty()
    }
}

impl Grid {
    pub fn empty() -> Self {
        Grid {
            cells: [CellState::Unresolved(CandidateSet::FULL); 81],
        }
    }

    pub fn get(&self, cell: CellRef) -> CellState {
        self.cells[cell.index()]
    }

    #[must_use]
    pub fn with_cell(&self, cell: CellRef, state: CellState) -> Grid {
        let mut next = self.clone();
        next.cells[cell.index()] = state;
        next
    }

    pub fn cells(&self) -> impl Iterator<Item = (CellRef, CellState)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, &state)| (CellRef::from_index(i), state))
    }

    /// {1..9} minus every identity placed on a peer of `cell`.
    pub fn candidates(&self, cell: CellRef) -> Result<CandidateSet, GridError> {
        let state = self.get(cell);
        if state.is_determined() {
            return Err(GridError::Determined(cell, state.label()));
        }
        let taken: CandidateSet = cell
            .peers()
            .into_iter()
            .filter_map(|p| self.get(p).placed())
            .collect();
        Ok(CandidateSet::FULL.difference(taken))
    }

    /// True iff no dimension holds the same placed identity twice.
    pub fn is_consistent(&self) -> bool {
        self.first_conflict().is_none()
    }

    /// The first dimension (in [`Dimension::all`] order) holding a placed
    /// identity twice.
    pub fn first_conflict(&self) -> Option<(Dimension, Identity)> {
        Dimension::all().find_map(|dim| {
            let mut seen = CandidateSet::EMPTY;
            for cell in dim.cells() {
                if let Some(id) = self.get(cell).placed() {
                    if seen.contains(id) {
                        return Some((dim, id));
                    }
                    seen.insert(id);
                }
            }
            None
        })
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|s| s.is_determined())
    }

    pub fn placed_count(&self) -> usize {
        self.cells.iter().filter(|s| s.is_determined()).count()
    }

    /// 81 characters, row-major, `.` for undetermined cells.
    pub fn to_puzzle_string(&self) -> String {
        self.cells
            .iter()
            .map(|s| match s.placed() {
                Some(id) => char::from(b'0' + id.get()),
                None => '.',
            })
            .collect()
    }

    /// Nine lines of nine characters.
    pub fn render(&self) -> String {
        let flat = self.to_puzzle_string();
        let mut out = String::with_capacity(90);
        for line in flat.as_bytes().chunks(9) {
            out.push_str(std::str::from_utf8(line).expect("ascii"));
            out.push('\n');
        }
        out
    }

    /// Candidate table in the "available solutions" layout: one line per
    /// row, each cell as nine fixed slots holding its possible identities.
    pub fn render_candidates(&self) -> String {
        let mut out = String::new();
        for row in 1..=9u8 {
            let cells: Vec<String> = Dimension::row(row)
                .cells()
                .iter()
                .map(|&cell| {
                    let set = self.get(cell).working_set();
                    Identity::all()
                        .map(|id| {
                            if set.contains(id) {
                                char::from(b'0' + id.get())
                            } else {
                                ' '
                            }
                        })
                        .collect::<String>()
                })
                .collect();
            let line = cells.join("|");
            out.push_str(line.trim_end());
            out.push('\n');
            if row % 3 == 0 && row < 9 {
                out.push_str(&"-".repeat(89));
                out.push('\n');
            }
        }
        out
    }

    /// Canonical text over every cell state, row-major. Digests are taken
    /// over this.
    pub fn canonical_form(&self) -> String {
        self.cells
            .iter()
            .map(|s| s.token())
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({})", self.canonical_form())
    }
}

impl FromStr for Grid {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_grid(s)
    }
}

/// Parses an 81-character puzzle string. Whitespace is ignored; `.` and `0`
/// are empty cells, `1`..`9` are pre-set.
pub fn parse_grid(text: &str) -> Result<Grid, ParseError> {
    if text.contains("#Error") {
        return Err(ParseError::ErrorSentinel);
    }
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.len() != 81 {
        return Err(ParseError::WrongLength(chars.len()));
    }
    let mut grid = Grid::empty();
    for (i, &ch) in chars.iter().enumerate() {
        grid.cells[i] = match ch {
            '.' | '0' => CellState::Unresolved(CandidateSet::FULL),
            '1'..='9' => CellState::PreSet(Identity(ch as u8 - b'0')),
            _ => {
                return Err(ParseError::IllegalChar {
                    position: i + 1,
                    ch,
                })
            }
        };
    }
    Ok(grid)
}
