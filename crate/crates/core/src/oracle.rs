//! Reference solvers: an exhaustive search that counts solutions, and an
//! automatic driver that solves with nothing but recorded, witnessed moves.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::exclusion::{auto_row_exclusions, Justification, Selection};
use crate::grid::{CandidateSet, CellRef, CellState, Dimension, DimensionKind, Grid, Identity};
use crate::location::{open_positions, LocationAnalysis};
use crate::mutual::apply_mutual_exclusion;
use crate::workbench::{Move, Workbench, WorkbenchError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolutionCount {
    None,
    Unique,
    Multiple,
}

impl fmt::Display for SolutionCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionCount::None => "0",
            SolutionCount::Unique => "1",
            SolutionCount::Multiple => "2+",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub count: SolutionCount,
    /// The first solution found, every open cell marked solved.
    pub solution: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("grid is inconsistent: {identity} appears twice in {dim}")]
pub struct InconsistentGrid {
    pub dim: Dimension,
    pub identity: Identity,
}

fn require_consistent(grid: &Grid) -> Result<(), InconsistentGrid> {
    match grid.first_conflict() {
        Some((dim, identity)) => Err(InconsistentGrid { dim, identity }),
        None => Ok(()),
    }
}

/// Depth-first search in row-major order, identities ascending, stopping
/// at the second solution. Open cells range over their stored candidates
/// minus identities placed on a peer.
pub fn brute_force_solve(grid: &Grid) -> Result<SolveOutcome, InconsistentGrid> {
    require_consistent(grid)?;
    let none = SolveOutcome {
        count: SolutionCount::None,
        solution: None,
    };
    let mut search = Search {
        rows: [0; 9],
        cols: [0; 9],
        boxes: [0; 9],
        domain: [0; 81],
        values: [0; 81],
        open: Vec::new(),
        found: 0,
        first: None,
    };
    for (cell, state) in grid.cells() {
        let i = cell.index();
        match state.placed() {
            Some(id) => {
                let bit = 1u16 << id.get();
                search.rows[i / 9] |= bit;
                search.cols[i % 9] |= bit;
                search.boxes[box_index(i)] |= bit;
                search.values[i] = id.get();
            }
            None => {
                search.domain[i] = set_bits(state.working_set());
                search.open.push(i);
            }
        }
    }
    search.run(0);
    let count = match search.found {
        0 => return Ok(none),
        1 => SolutionCount::Unique,
        _ => SolutionCount::Multiple,
    };
    let solution = search.first.map(|values| {
        let mut g = grid.clone();
        for cell in CellRef::all() {
            if !g.get(cell).is_determined() {
                let id = Identity::new(values[cell.index()]).expect("search fills every cell");
                g = g.with_cell(cell, CellState::Solved(id));
            }
        }
        g
    });
    Ok(SolveOutcome { count, solution })
}

fn box_index(i: usize) -> usize {
    (i / 27) * 3 + (i % 9) / 3
}

fn set_bits(set: CandidateSet) -> u16 {
    set.iter().fold(0, |acc, id| acc | 1 << id.get())
}

struct Search {
    rows: [u16; 9],
    cols: [u16; 9],
    boxes: [u16; 9],
    domain: [u16; 81],
    values: [u8; 81],
    open: Vec<usize>,
    found: usize,
    first: Option<[u8; 81]>,
}

impl Search {
    fn run(&mut self, k: usize) {
        if self.found >= 2 {
            return;
        }
        let Some(&i) = self.open.get(k) else {
            self.found += 1;
            if self.first.is_none() {
                self.first = Some(self.values);
            }
            return;
        };
        let (r, c, b) = (i / 9, i % 9, box_index(i));
        let free = self.domain[i] & !(self.rows[r] | self.cols[c] | self.boxes[b]);
        for v in 1..=9u8 {
            let bit = 1u16 << v;
            if free & bit == 0 {
                continue;
            }
            self.rows[r] |= bit;
            self.cols[c] |= bit;
            self.boxes[b] |= bit;
            self.values[i] = v;
            self.run(k + 1);
            self.rows[r] &= !bit;
            self.cols[c] &= !bit;
            self.boxes[b] &= !bit;
            if self.found >= 2 {
                return;
            }
        }
    }
}

#[derive(Debug)]
pub struct Fixpoint {
    pub workbench: Workbench,
    pub solved: bool,
}

/// Why the automatic solver stopped short. Move failures carry the
/// derivation up to and including the offending record.
#[derive(Debug, Error)]
pub enum FixpointError {
    #[error(transparent)]
    Inconsistent(#[from] InconsistentGrid),
    #[error("move {seq} was not valid: {outcome}")]
    InvalidMove {
        seq: u64,
        outcome: String,
        workbench: Box<Workbench>,
    },
    #[error("move refused: {source}")]
    Refused {
        source: WorkbenchError,
        workbench: Box<Workbench>,
    },
}

impl FixpointError {
    /// The derivation up to the failure, when one was started.
    pub fn workbench(&self) -> Option<&Workbench> {
        match self {
            FixpointError::InvalidMove { workbench, .. }
            | FixpointError::Refused { workbench, .. } => Some(workbench),
            FixpointError::Inconsistent(_) => None,
        }
    }
}

/// Applies witnessed rules until none changes the grid, always returning
/// to the cheapest rule after a change:
///
/// 1. exclusion sweep: every open cell loses the identities placed in its
///    row, column and box, concluding when that narrows it;
/// 2. location: the first identity with a single unexcludable position in
///    some row, column or box is posted there;
/// 3. mutual exclusion: the first dimension where a pair group narrows
///    another cell.
pub fn auto_fixpoint(grid: &Grid) -> Result<Fixpoint, FixpointError> {
    require_consistent(grid)?;
    let mut wb = Workbench::from_grid(grid.clone());
    loop {
        if sweep(&mut wb)? {
            continue;
        }
        if let Some(moves) = location_rule(wb.grid()) {
            apply_all(&mut wb, moves)?;
            continue;
        }
        if let Some(dim) = mutual_rule(wb.grid()) {
            apply_all(&mut wb, vec![Move::MutualExclusionApply { dim }])?;
            continue;
        }
        break;
    }
    let solved = wb.grid().is_complete();
    Ok(Fixpoint {
        workbench: wb,
        solved,
    })
}

/// Returns whether any cell changed.
fn sweep(wb: &mut Workbench) -> Result<bool, FixpointError> {
    let mut changed = false;
    for target in CellRef::all() {
        let grid = wb.grid().clone();
        let state = grid.get(target);
        if state.is_determined() {
            continue;
        }
        let row_ids: CandidateSet = auto_row_exclusions(&grid, target)
            .expect("target is open")
            .into_iter()
            .map(|(id, _)| id)
            .collect();
        let mut working = state.working_set().difference(row_ids);
        let mut moves = Vec::new();
        for id in working.iter() {
            if let Some(j) = column_or_box_witness(&grid, target, id) {
                moves.push(Move::ExclusionAssert(j));
            }
        }
        for m in &moves {
            if let Move::ExclusionAssert(j) = m {
                working.remove(j.excluded);
            }
        }
        if working == state.working_set() {
            continue;
        }
        moves.push(Move::CellConclude(Selection::Cell(target)));
        changed |= apply_all(wb, moves)?;
    }
    Ok(changed)
}

fn column_or_box_witness(grid: &Grid, target: CellRef, id: Identity) -> Option<Justification> {
    [DimensionKind::Col, DimensionKind::Box]
        .into_iter()
        .map(|kind| target.dimension(kind))
        .find_map(|via| {
            via.cells()
                .into_iter()
                .find(|&w| w != target && grid.get(w).placed() == Some(id))
                .map(|witness| Justification {
                    target,
                    excluded: id,
                    witness,
                    via,
                })
        })
}

fn location_rule(grid: &Grid) -> Option<Vec<Move>> {
    for dim in Dimension::all() {
        for identity in Identity::all() {
            let Ok(positions) = open_positions(grid, dim, identity) else {
                continue;
            };
            let la = LocationAnalysis {
                identity,
                dim,
                open_positions: positions.clone(),
                exclusions: Default::default(),
            };
            let mut moves = Vec::new();
            let mut survivors = 0;
            for &position in &positions {
                let witness = la
                    .crossing_dimensions(position)
                    .into_iter()
                    .flat_map(|d| d.cells())
                    .find(|&w| grid.get(w).placed() == Some(identity));
                match witness {
                    Some(witness) => moves.push(Move::LocationAssert {
                        dim,
                        identity,
                        position,
                        witness,
                    }),
                    None => survivors += 1,
                }
            }
            if survivors == 1 {
                moves.push(Move::LocationConclude { dim, identity });
                return Some(moves);
            }
        }
    }
    None
}

fn mutual_rule(grid: &Grid) -> Option<Dimension> {
    Dimension::all().find(|&dim| {
        apply_mutual_exclusion(grid, dim).is_ok_and(|(_, report)| !report.revised.is_empty())
    })
}

/// Applies `moves` in order, failing on the first one that is not valid.
/// Returns whether the grid changed.
fn apply_all(wb: &mut Workbench, moves: Vec<Move>) -> Result<bool, FixpointError> {
    let mut changed = false;
    for mv in moves {
        match wb.apply(mv) {
            Ok(applied) if applied.record.outcome.is_valid() => changed |= applied.changed(),
            Ok(applied) => {
                return Err(FixpointError::InvalidMove {
                    seq: applied.record.seq,
                    outcome: applied.record.outcome.to_string(),
                    workbench: Box::new(wb.clone()),
                })
            }
            Err(source) => {
                return Err(FixpointError::Refused {
                    source,
                    workbench: Box::new(wb.clone()),
                })
            }
        }
    }
    Ok(changed)
}
