//! Mutual exclusion within one dimension: two "1 of 2" cells carrying the
//! same pair reserve both identities for themselves, so every other cell of
//! the dimension loses them.

use serde::Serialize;
use thiserror::Error;

use crate::grid::{CandidateSet, CellRef, CellState, Dimension, Grid, Identity};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairGroup {
    pub dim: Dimension,
    pub members: [CellRef; 2],
    pub pair: (Identity, Identity),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Revision {
    pub cell: CellRef,
    pub before: CandidateSet,
    pub after: CandidateSet,
}

/// Before/after record of one application.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExclusionReport {
    pub dim: Dimension,
    pub groups: Vec<PairGroup>,
    pub revised: Vec<Revision>,
    pub newly_solved: Vec<(CellRef, Identity)>,
    /// Number of cells belonging to groups. Always even for a sound grid.
    pub parity_total: usize,
}

impl ExclusionReport {
    /// Rebuilds the derived `newly_solved` list from the revisions.
    pub fn from_parts(
        dim: Dimension,
        groups: Vec<PairGroup>,
        revised: Vec<Revision>,
        parity_total: usize,
    ) -> Self {
        let newly_solved = revised
            .iter()
            .filter_map(|r| r.after.as_single().map(|id| (r.cell, id)))
            .collect();
        ExclusionReport {
            dim,
            groups,
            revised,
            newly_solved,
            parity_total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutualExclusionError {
    #[error("systems error: {total} cells of {dim} claim shared pairs, an odd total")]
    OddParity { dim: Dimension, total: usize },
    #[error("{dim}: {} cells claim the pair {} {}; two identities cannot fill them", cells.len(), pair.0, pair.1)]
    OverSubscribed {
        dim: Dimension,
        pair: (Identity, Identity),
        cells: Vec<CellRef>,
    },
    #[error("{dim}: the pairs {} {} and {} {} both claim {shared}", first.0, first.1, second.0, second.1)]
    OverlappingPairs {
        dim: Dimension,
        first: (Identity, Identity),
        second: (Identity, Identity),
        shared: Identity,
    },
    #[error("{cell} would be left with no candidates")]
    Emptied { cell: CellRef },
    #[error("revision would place {identity} twice in {conflict}")]
    Duplicate {
        conflict: Dimension,
        identity: Identity,
    },
}

impl MutualExclusionError {
    pub fn parity_total(&self) -> Option<usize> {
        match self {
            MutualExclusionError::OddParity { total, .. } => Some(*total),
            _ => None,
        }
    }
}

/// "1 of 2" cells of `dim` grouped by pair, in order of first appearance.
fn pairs_in(grid: &Grid, dim: Dimension) -> Vec<((Identity, Identity), Vec<CellRef>)> {
    let mut by_pair: Vec<((Identity, Identity), Vec<CellRef>)> = Vec::new();
    for cell in dim.cells() {
        if let CellState::OneOfTwo(a, b) = grid.get(cell) {
            match by_pair.iter_mut().find(|(p, _)| *p == (a, b)) {
                Some((_, cells)) => cells.push(cell),
                None => by_pair.push(((a, b), vec![cell])),
            }
        }
    }
    by_pair
}

/// Count of "1 of 2" cells in `dim` whose pair is shared with at least one
/// other cell of `dim`.
pub fn parity_total(grid: &Grid, dim: Dimension) -> usize {
    pairs_in(grid, dim)
        .into_iter()
        .filter(|(_, cells)| cells.len() > 1)
        .map(|(_, cells)| cells.len())
        .sum()
}

/// Every pair of "1 of 2" cells in `dim` with identical pairs, in dimension
/// order. Three or more cells sharing a pair is an error.
pub fn find_pair_groups(
    grid: &Grid,
    dim: Dimension,
) -> Result<Vec<PairGroup>, MutualExclusionError> {
    let mut groups = Vec::new();
    for (pair, cells) in pairs_in(grid, dim) {
        match cells.len() {
            1 => {}
            2 => groups.push(PairGroup {
                dim,
                members: [cells[0], cells[1]],
                pair,
            }),
            _ => return Err(MutualExclusionError::OverSubscribed { dim, pair, cells }),
        }
    }
    Ok(groups)
}

/// Removes each group's identities from every other cell of `dim` in one
/// pass. Cells narrowed to two candidates become "1 of 2", to one become
/// solved. New groups created by the pass are left for the next call.
///
/// On any error the grid is left as it was.
pub fn apply_mutual_exclusion(
    grid: &Grid,
    dim: Dimension,
) -> Result<(Grid, ExclusionReport), MutualExclusionError> {
    let total = parity_total(grid, dim);
    if total % 2 == 1 {
        return Err(MutualExclusionError::OddParity { dim, total });
    }
    let groups = find_pair_groups(grid, dim)?;
    for (i, g) in groups.iter().enumerate() {
        let set = pair_set(g.pair);
        for h in &groups[i + 1..] {
            if let Some(shared) = set.intersection(pair_set(h.pair)).iter().next() {
                return Err(MutualExclusionError::OverlappingPairs {
                    dim,
                    first: g.pair,
                    second: h.pair,
                    shared,
                });
            }
        }
    }

    let reserved = groups
        .iter()
        .fold(CandidateSet::EMPTY, |acc, g| acc.union(pair_set(g.pair)));
    let members: Vec<CellRef> = groups.iter().flat_map(|g| g.members).collect();

    let mut next = grid.clone();
    let mut revised = Vec::new();
    for cell in dim.cells() {
        let state = grid.get(cell);
        if state.is_determined() || members.contains(&cell) {
            continue;
        }
        let before = state.working_set();
        let after = before.difference(reserved);
        if after == before {
            continue;
        }
        if after.is_empty() {
            return Err(MutualExclusionError::Emptied { cell });
        }
        next = next.with_cell(cell, CellState::concluded_from(after));
        revised.push(Revision {
            cell,
            before,
            after,
        });
    }
    if let Some((conflict, identity)) = next.first_conflict() {
        return Err(MutualExclusionError::Duplicate { conflict, identity });
    }
    Ok((
        next,
        ExclusionReport::from_parts(dim, groups, revised, total),
    ))
}

fn pair_set((a, b): (Identity, Identity)) -> CandidateSet {
    [a, b].into_iter().collect()
}
