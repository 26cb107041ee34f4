//! Analysis by exclusion: the user eliminates identities from one target
//! cell by citing, for each, a witness cell in the target's column or box
//! that already holds it. Row exclusions are filled in automatically.
//!
//! The result of an analysis is produced by [`evaluate_cell_result`], a
//! fixed five-branch machine whose output mixes types on purpose: an error
//! sentinel, a single identity, a pair string, or an unresolved mark.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::AnalysisError;
use crate::grid::{
    CandidateSet, CellRef, CellState, Dimension, DimensionKind, DomainError, Grid, Identity,
};
use crate::ledger::ValidationOutcome;

/// A claim that `excluded` cannot sit in `target` because `witness`, a
/// cell of `via`, already holds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Justification {
    pub target: CellRef,
    pub excluded: Identity,
    pub witness: CellRef,
    pub via: Dimension,
}

/// What has been selected for investigation: a whole cell, or only its row
/// (the cell itself not yet identified).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selection {
    Cell(CellRef),
    Row(u8),
}

impl Selection {
    pub fn row(self) -> u8 {
        match self {
            Selection::Cell(c) => c.row(),
            Selection::Row(r) => r,
        }
    }

    pub fn cell(self) -> Option<CellRef> {
        match self {
            Selection::Cell(c) => Some(c),
            Selection::Row(_) => None,
        }
    }
}

/// Live status of the analysis area.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum AnalysisStatus {
    #[default]
    Pending,
    Solved,
    OneOfTwo,
}

impl AnalysisStatus {
    pub fn label(self) -> &'static str {
        match self {
            AnalysisStatus::Pending => "",
            AnalysisStatus::Solved => "Solved",
            AnalysisStatus::OneOfTwo => "1 of 2",
        }
    }
}

/// Working state of one exclusion analysis.
///
/// Fields are public so that arbitrary (including inconsistent) states can
/// be fed to [`evaluate_cell_result`]; the constructors and
/// [`assert_exclusion`] keep them coherent in normal use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellAnalysis {
    /// Row number entered for the cell under investigation.
    pub selected_row: Option<u8>,
    pub target: Option<CellRef>,
    /// State of the target before this analysis; `None` when no cell has
    /// been looked up.
    pub prior_status: Option<CellState>,
    pub auto_row_exclusions: Vec<(Identity, CellRef)>,
    pub user_justifications: Vec<Justification>,
    pub working: CandidateSet,
    pub current_status: AnalysisStatus,
    /// Two ascending digits when `current_status` is "1 of 2", else empty.
    pub pair_digits: String,
    /// One slot per identity; slot `k` holds `k+1` when that identity is
    /// the only one left.
    pub posted_slots: [u8; 9],
}

impl Default for CellAnalysis {
    fn default() -> Self {
        CellAnalysis {
            selected_row: None,
            target: None,
            prior_status: None,
            auto_row_exclusions: Vec::new(),
            user_justifications: Vec::new(),
            working: CandidateSet::FULL,
            current_status: AnalysisStatus::Pending,
            pair_digits: String::new(),
            posted_slots: [0; 9],
        }
    }
}

impl CellAnalysis {
    /// Opens an analysis on `target`: looks up its prior state, fills in
    /// the automatic row exclusions and starts the working set from the
    /// target's own candidates.
    pub fn open(grid: &Grid, target: CellRef) -> Result<Self, AnalysisError> {
        let prior = grid.get(target);
        let auto = auto_row_exclusions(grid, target)?;
        let row_ids: CandidateSet = auto.iter().map(|&(id, _)| id).collect();
        let mut analysis = CellAnalysis {
            selected_row: Some(target.row()),
            target: Some(target),
            prior_status: Some(prior),
            auto_row_exclusions: auto,
            working: prior.working_set().difference(row_ids),
            ..CellAnalysis::default()
        };
        analysis.refresh();
        Ok(analysis)
    }

    /// A row number has been entered but no cell looked up.
    pub fn row_only(row: u8) -> Self {
        CellAnalysis {
            selected_row: Some(row),
            ..CellAnalysis::default()
        }
    }

    pub fn open_selection(grid: &Grid, selection: Selection) -> Result<Self, AnalysisError> {
        match selection {
            Selection::Cell(c) => CellAnalysis::open(grid, c),
            Selection::Row(r) => Ok(CellAnalysis::row_only(r)),
        }
    }

    pub fn row_selected(&self) -> bool {
        self.selected_row.is_some()
    }

    pub fn selection(&self) -> Option<Selection> {
        match (self.target, self.selected_row) {
            (Some(c), _) => Some(Selection::Cell(c)),
            (None, Some(r)) => Some(Selection::Row(r)),
            (None, None) => None,
        }
    }

    /// Recomputes the status label, pair digits and posted slots from the
    /// working set.
    fn refresh(&mut self) {
        self.posted_slots = [0; 9];
        self.pair_digits.clear();
        self.current_status = if let Some(id) = self.working.as_single() {
            self.posted_slots[id.get() as usize - 1] = id.get();
            AnalysisStatus::Solved
        } else if let Some((a, b)) = self.working.as_pair() {
            self.pair_digits = format!("{a}{b}");
            AnalysisStatus::OneOfTwo
        } else {
            AnalysisStatus::Pending
        };
    }

    fn cites(&self, excluded: Identity, witness: CellRef) -> bool {
        self.auto_row_exclusions
            .iter()
            .any(|&(id, w)| id == excluded && w == witness)
            || self
                .user_justifications
                .iter()
                .any(|j| j.excluded == excluded && j.witness == witness)
    }
}

/// Placed identities in the target's row, paired with where they sit, in
/// column order.
pub fn auto_row_exclusions(
    grid: &Grid,
    target: CellRef,
) -> Result<Vec<(Identity, CellRef)>, AnalysisError> {
    let state = grid.get(target);
    if state.is_determined() {
        return Err(AnalysisError::TargetDetermined(target, state.label()));
    }
    Ok(Dimension::row(target.row())
        .cells()
        .into_iter()
        .filter_map(|c| grid.get(c).placed().map(|id| (id, c)))
        .collect())
}

/// Checks a user justification and applies it to the analysis.
///
/// A justification whose witness does not actually hold the identity is
/// still applied, and comes back flagged for review. Malformed references,
/// repeats of an existing citation, and exclusions that would leave no
/// candidate are rejected with an integrity outcome and change nothing.
pub fn assert_exclusion(
    analysis: &mut CellAnalysis,
    grid: &Grid,
    j: Justification,
) -> Result<ValidationOutcome, AnalysisError> {
    let target = analysis.target.ok_or(AnalysisError::NoTarget)?;
    if j.target != target {
        return Err(AnalysisError::WrongTarget {
            open: target,
            given: j.target,
        });
    }
    let state = grid.get(target);
    if state.is_determined() {
        return Err(AnalysisError::TargetDetermined(target, state.label()));
    }

    if j.via.kind() == DimensionKind::Row {
        return Ok(ValidationOutcome::integrity(format!(
            "{} is the target's row; row exclusions are automatic, cite the column or box",
            j.via
        )));
    }
    if !j.via.contains(target) {
        return Ok(ValidationOutcome::integrity(format!(
            "{} does not contain {target}",
            j.via
        )));
    }
    if !j.via.contains(j.witness) {
        return Ok(ValidationOutcome::integrity(format!(
            "{} is not one of the 9 cells of {}",
            j.witness, j.via
        )));
    }
    if j.witness == target {
        return Ok(ValidationOutcome::integrity(format!(
            "{target} cannot witness against itself"
        )));
    }
    if analysis.cites(j.excluded, j.witness) {
        return Ok(ValidationOutcome::integrity(format!(
            "duplicate: {} is already excluded by {}",
            j.excluded, j.witness
        )));
    }
    if analysis.working.contains(j.excluded) && analysis.working.len() == 1 {
        return Ok(ValidationOutcome::integrity(format!(
            "excluding {} would leave {target} with no candidates",
            j.excluded
        )));
    }

    let witness_state = grid.get(j.witness);
    let redundant = !analysis.working.contains(j.excluded);
    let outcome = if witness_state.placed() == Some(j.excluded) {
        ValidationOutcome::valid()
    } else {
        ValidationOutcome::incorrect(format!(
            "{} does not hold {} ({})",
            j.witness,
            j.excluded,
            describe(witness_state)
        ))
    }
    .with_redundant(redundant);

    analysis.working.remove(j.excluded);
    analysis.user_justifications.push(j);
    analysis.refresh();
    Ok(outcome)
}

fn describe(state: CellState) -> String {
    match state {
        CellState::PreSet(id) => format!("pre-set {id}"),
        CellState::Solved(id) => format!("solved {id}"),
        CellState::OneOfTwo(a, b) => format!("1 of 2: {a} {b}"),
        CellState::Unresolved(set) => format!("unresolved {set}"),
    }
}

/// Output of the result machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResultValue {
    ErrorSentinel,
    Identity(Identity),
    /// Always ascending.
    PairString(Identity, Identity),
    UnresolvedMark,
}

impl ResultValue {
    fn pair(a: Identity, b: Identity) -> ResultValue {
        if a <= b {
            ResultValue::PairString(a, b)
        } else {
            ResultValue::PairString(b, a)
        }
    }
}

impl fmt::Display for ResultValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResultValue::ErrorSentinel => f.write_str("#Error"),
            ResultValue::Identity(id) => write!(f, "{id}"),
            ResultValue::PairString(a, b) => write!(f, "{a} {b}"),
            ResultValue::UnresolvedMark => f.write_str("."),
        }
    }
}

impl FromStr for ResultValue {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DomainError::new("result value", s);
        match s {
            "#Error" => Ok(ResultValue::ErrorSentinel),
            "." => Ok(ResultValue::UnresolvedMark),
            _ => match s.split_once(' ') {
                Some((a, b)) => {
                    let (a, b): (Identity, Identity) =
                        (a.parse().map_err(|_| err())?, b.parse().map_err(|_| err())?);
                    if a < b {
                        Ok(ResultValue::PairString(a, b))
                    } else {
                        Err(err())
                    }
                }
                None => s.parse().map(ResultValue::Identity).map_err(|_| err()),
            },
        }
    }
}

impl Serialize for ResultValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// The five-branch result machine, evaluated strictly in order:
///
/// 1. a row is selected but no prior status was looked up → `#Error`
/// 2. the prior status is pre-set, solved or "1 of 2" → that value, carried forward
/// 3. the analysis reads "Solved" → the sum of the posted slots
/// 4. the analysis reads "1 of 2" → the two pair digits, space separated
/// 5. otherwise → `.`
///
/// Total over every input. Sums outside 1..=9 and malformed pair digits
/// (only reachable from hand-built states) also yield `#Error`.
pub fn evaluate_cell_result(analysis: &CellAnalysis) -> ResultValue {
    if analysis.row_selected() && analysis.prior_status.is_none() {
        return ResultValue::ErrorSentinel;
    }
    match analysis.prior_status {
        Some(CellState::PreSet(id) | CellState::Solved(id)) => return ResultValue::Identity(id),
        Some(CellState::OneOfTwo(a, b)) => return ResultValue::pair(a, b),
        _ => {}
    }
    match analysis.current_status {
        AnalysisStatus::Solved => {
            let sum: u32 = analysis.posted_slots.iter().map(|&s| u32::from(s)).sum();
            u8::try_from(sum)
                .ok()
                .and_then(Identity::new)
                .map_or(ResultValue::ErrorSentinel, ResultValue::Identity)
        }
        AnalysisStatus::OneOfTwo => {
            let digits: Vec<Option<Identity>> = analysis
                .pair_digits
                .chars()
                .take(2)
                .map(|c| c.to_string().parse().ok())
                .collect();
            match digits.as_slice() {
                [Some(a), Some(b)] if a != b => ResultValue::pair(*a, *b),
                _ => ResultValue::ErrorSentinel,
            }
        }
        AnalysisStatus::Pending => ResultValue::UnresolvedMark,
    }
}

/// Posts the analysis outcome to the grid: one remaining candidate solves
/// the target, two make it "1 of 2", more leave it unresolved with the
/// narrowed set.
///
/// Refuses (as [`AnalysisError::Integrity`]) to post an identity already
/// placed on a peer, and to conclude with no candidates left.
pub fn conclude_cell(
    analysis: &CellAnalysis,
    grid: &Grid,
) -> Result<(Grid, CellState), AnalysisError> {
    let target = analysis.target.ok_or(AnalysisError::NoTarget)?;
    let state = grid.get(target);
    if state.is_determined() {
        return Err(AnalysisError::TargetDetermined(target, state.label()));
    }
    if analysis.working.is_empty() {
        return Err(AnalysisError::Integrity(format!(
            "no candidates remain for {target}"
        )));
    }
    let next = CellState::concluded_from(analysis.working);
    if let CellState::Solved(id) = next {
        if let Some(peer) = target
            .peers()
            .into_iter()
            .find(|&p| grid.get(p).placed() == Some(id))
        {
            return Err(AnalysisError::Integrity(format!(
                "{target} cannot be posted as {id}: {peer} already holds it"
            )));
        }
    }
    Ok((grid.with_cell(target, next), next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::parse_grid;

    fn cell(r: u8, c: u8) -> CellRef {
        CellRef::new(r, c).unwrap()
    }

    fn id(v: u8) -> Identity {
        Identity::new(v).unwrap()
    }

    fn just(target: CellRef, excluded: u8, witness: CellRef, via: Dimension) -> Justification {
        Justification {
            target,
            excluded: id(excluded),
            witness,
            via,
        }
    }

    #[test]
    fn auto_row_readout() {
        let g = Grid::empty()
            .with_cell(cell(4, 2), CellState::PreSet(id(3)))
            .with_cell(cell(4, 7), CellState::Solved(id(9)));
        let auto = auto_row_exclusions(&g, cell(4, 5)).unwrap();
        assert_eq!(auto, vec![(id(3), cell(4, 2)), (id(9), cell(4, 7))]);
        assert!(auto_row_exclusions(&Grid::empty(), cell(4, 5))
            .unwrap()
            .is_empty());
        assert!(matches!(
            auto_row_exclusions(&g, cell(4, 2)),
            Err(AnalysisError::TargetDetermined(..))
        ));
    }

    #[test]
    fn valid_witness_removes_identity() {
        let g = Grid::empty().with_cell(cell(4, 2), CellState::Solved(id(5)));
        let mut a = CellAnalysis::open(&g, cell(1, 2)).unwrap();
        let o = assert_exclusion(
            &mut a,
            &g,
            just(cell(1, 2), 5, cell(4, 2), Dimension::col(2)),
        )
        .unwrap();
        assert!(o.is_valid());
        assert!(!a.working.contains(id(5)));
        assert_eq!(a.user_justifications.len(), 1);
    }

    #[test]
    fn wrong_witness_is_recorded_and_applied() {
        let g = Grid::empty();
        let mut a = CellAnalysis::open(&g, cell(1, 2)).unwrap();
        let o = assert_exclusion(
            &mut a,
            &g,
            just(cell(1, 2), 5, cell(4, 2), Dimension::col(2)),
        )
        .unwrap();
        assert!(o.is_incorrect());
        assert!(o.flags.review);
        assert!(!a.working.contains(id(5)));
    }

    #[test]
    fn ninth_exclusion_is_rejected() {
        let g = Grid::empty();
        let t = cell(5, 5);
        let mut a = CellAnalysis::open(&g, t).unwrap();
        let col: Vec<CellRef> = Dimension::col(5)
            .cells()
            .into_iter()
            .filter(|&c| c != t)
            .collect();
        for (k, w) in col.iter().enumerate() {
            let o =
                assert_exclusion(&mut a, &g, just(t, k as u8 + 1, *w, Dimension::col(5))).unwrap();
            assert!(!o.is_integrity_error());
        }
        assert_eq!(a.working, CandidateSet::single(id(9)));
        let before = a.clone();
        let o = assert_exclusion(&mut a, &g, just(t, 9, cell(4, 4), Dimension::boxed(5))).unwrap();
        assert!(o.is_integrity_error());
        assert_eq!(a, before);
    }

    #[test]
    fn malformed_references_are_integrity_errors() {
        let g = Grid::empty();
        let t = cell(1, 1);
        let mut a = CellAnalysis::open(&g, t).unwrap();
        let before = a.clone();
        for j in [
            just(t, 5, cell(1, 4), Dimension::row(1)),
            just(t, 5, cell(4, 2), Dimension::col(2)),
            just(t, 5, cell(4, 2), Dimension::col(1)),
            just(t, 5, t, Dimension::col(1)),
        ] {
            assert!(assert_exclusion(&mut a, &g, j)
                .unwrap()
                .is_integrity_error());
        }
        assert_eq!(a, before);
    }

    #[test]
    fn duplicates_and_redundancy() {
        let g = Grid::empty()
            .with_cell(cell(4, 1), CellState::PreSet(id(5)))
            .with_cell(cell(2, 2), CellState::PreSet(id(5)));
        let t = cell(1, 1);
        let mut a = CellAnalysis::open(&g, t).unwrap();
        let first = just(t, 5, cell(4, 1), Dimension::col(1));
        assert!(assert_exclusion(&mut a, &g, first).unwrap().is_valid());
        assert!(assert_exclusion(&mut a, &g, first)
            .unwrap()
            .is_integrity_error());
        let other = just(t, 5, cell(2, 2), Dimension::boxed(1));
        let o = assert_exclusion(&mut a, &g, other).unwrap();
        assert!(o.is_valid() && o.flags.redundant);
    }

    #[test]
    fn duplicate_of_automatic_row_citation() {
        let g = Grid::empty().with_cell(cell(1, 2), CellState::PreSet(id(5)));
        let t = cell(1, 1);
        let mut a = CellAnalysis::open(&g, t).unwrap();
        let o = assert_exclusion(&mut a, &g, just(t, 5, cell(1, 2), Dimension::boxed(1))).unwrap();
        assert!(o.is_integrity_error());
    }

    fn analysis_with(
        row: Option<u8>,
        prior: Option<CellState>,
        status: AnalysisStatus,
        pair: &str,
        slots: [u8; 9],
    ) -> CellAnalysis {
        CellAnalysis {
            selected_row: row,
            target: row.map(|r| cell(r, 1)),
            prior_status: prior,
            current_status: status,
            pair_digits: pair.to_owned(),
            posted_slots: slots,
            ..CellAnalysis::default()
        }
    }

    #[test]
    fn result_machine_examples() {
        let unresolved = Some(CellState::Unresolved(CandidateSet::FULL));
        let cases = [
            (
                analysis_with(Some(3), None, AnalysisStatus::Pending, "", [0; 9]),
                "#Error",
            ),
            (
                analysis_with(Some(3), unresolved, AnalysisStatus::OneOfTwo, "28", [0; 9]),
                "2 8",
            ),
            (
                analysis_with(
                    Some(3),
                    Some(CellState::Solved(id(7))),
                    AnalysisStatus::Pending,
                    "",
                    [0; 9],
                ),
                "7",
            ),
            (
                analysis_with(
                    Some(3),
                    unresolved,
                    AnalysisStatus::Solved,
                    "",
                    [0, 0, 0, 4, 0, 0, 0, 0, 0],
                ),
                "4",
            ),
            (
                analysis_with(Some(3), unresolved, AnalysisStatus::Pending, "", [0; 9]),
                ".",
            ),
        ];
        for (analysis, expected) in cases {
            assert_eq!(evaluate_cell_result(&analysis).to_string(), expected);
        }
    }

    #[test]
    fn result_machine_corrupt_inputs() {
        let unresolved = Some(CellState::Unresolved(CandidateSet::FULL));
        let a = analysis_with(
            Some(1),
            unresolved,
            AnalysisStatus::Solved,
            "",
            [0, 0, 0, 4, 0, 0, 0, 0, 9],
        );
        assert_eq!(evaluate_cell_result(&a), ResultValue::ErrorSentinel);
        let a = analysis_with(Some(1), unresolved, AnalysisStatus::OneOfTwo, "2", [0; 9]);
        assert_eq!(evaluate_cell_result(&a), ResultValue::ErrorSentinel);
        // branch 2 fires without a row selection
        let a = analysis_with(
            None,
            Some(CellState::PreSet(id(6))),
            AnalysisStatus::Pending,
            "",
            [0; 9],
        );
        assert_eq!(evaluate_cell_result(&a), ResultValue::Identity(id(6)));
        assert_eq!(
            evaluate_cell_result(&CellAnalysis::default()),
            ResultValue::UnresolvedMark
        );
    }

    #[test]
    fn result_value_text() {
        for text in ["#Error", "7", "2 8", "."] {
            assert_eq!(text.parse::<ResultValue>().unwrap().to_string(), text);
        }
        assert!("8 2".parse::<ResultValue>().is_err());
        assert!("0".parse::<ResultValue>().is_err());
    }

    fn conclude_after(n: usize) -> CellState {
        let g = Grid::empty();
        let t = cell(5, 5);
        let mut a = CellAnalysis::open(&g, t).unwrap();
        let col: Vec<CellRef> = Dimension::col(5)
            .cells()
            .into_iter()
            .filter(|&c| c != t)
            .collect();
        for (k, w) in col.iter().take(n).enumerate() {
            assert_exclusion(&mut a, &g, just(t, k as u8 + 1, *w, Dimension::col(5))).unwrap();
        }
        let (next, state) = conclude_cell(&a, &g).unwrap();
        assert_eq!(next.get(t), state);
        state
    }

    #[test]
    fn conclusions_by_count() {
        assert_eq!(conclude_after(8), CellState::Solved(id(9)));
        assert_eq!(conclude_after(7), CellState::OneOfTwo(id(8), id(9)));
        assert_eq!(
            conclude_after(3),
            CellState::Unresolved("456789".parse().unwrap())
        );
    }

    #[test]
    fn conclusion_refuses_peer_duplicate() {
        let g = Grid::empty().with_cell(cell(9, 5), CellState::PreSet(id(9)));
        let t = cell(5, 5);
        let mut a = CellAnalysis::open(&g, t).unwrap();
        for (k, w) in [
            cell(1, 5),
            cell(2, 5),
            cell(3, 5),
            cell(4, 5),
            cell(6, 5),
            cell(7, 5),
            cell(8, 5),
            cell(4, 4),
        ]
        .iter()
        .enumerate()
        {
            let via = if w.col() == 5 {
                Dimension::col(5)
            } else {
                Dimension::boxed(5)
            };
            assert_exclusion(&mut a, &g, just(t, k as u8 + 1, *w, via)).unwrap();
        }
        assert_eq!(a.working, CandidateSet::single(id(9)));
        assert!(matches!(
            conclude_cell(&a, &g),
            Err(AnalysisError::Integrity(_))
        ));
    }

    #[test]
    fn row_only_selection_trips_the_sentinel() {
        let a = CellAnalysis::row_only(3);
        assert_eq!(evaluate_cell_result(&a), ResultValue::ErrorSentinel);
        assert_eq!(
            conclude_cell(&a, &Grid::empty()),
            Err(AnalysisError::NoTarget)
        );
    }

    #[test]
    fn prior_pair_is_carried_forward() {
        let g = parse_grid(&".".repeat(81))
            .unwrap()
            .with_cell(cell(1, 1), CellState::OneOfTwo(id(2), id(8)));
        let a = CellAnalysis::open(&g, cell(1, 1)).unwrap();
        assert_eq!(a.current_status, AnalysisStatus::OneOfTwo);
        assert_eq!(evaluate_cell_result(&a).to_string(), "2 8");
    }
}
