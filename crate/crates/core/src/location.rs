//! Location analysis: for one identity inside one dimension, the user rules
//! out candidate positions one at a time, each with a witness in a crossing
//! row, column or box. When every position but one is ruled out, the
//! identity is posted to the survivor.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::AnalysisError;
use crate::exclusion::Justification;
use crate::grid::{CellRef, CellState, Dimension, Grid, Identity};
use crate::ledger::ValidationOutcome;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocationAnalysis {
    pub identity: Identity,
    pub dim: Dimension,
    /// Undetermined cells of `dim` whose own candidates include
    /// `identity`, in dimension order.
    pub open_positions: Vec<CellRef>,
    /// Exactly one witness per excluded position.
    pub exclusions: BTreeMap<CellRef, Justification>,
}

impl LocationAnalysis {
    pub fn open(grid: &Grid, dim: Dimension, identity: Identity) -> Result<Self, AnalysisError> {
        Ok(LocationAnalysis {
            identity,
            dim,
            open_positions: open_positions(grid, dim, identity)?,
            exclusions: BTreeMap::new(),
        })
    }

    pub fn is_excluded(&self, position: CellRef) -> bool {
        self.exclusions.contains_key(&position)
    }

    /// The yes/no column, parallel to `open_positions`.
    pub fn excluded_flags(&self) -> Vec<bool> {
        self.open_positions
            .iter()
            .map(|&p| self.is_excluded(p))
            .collect()
    }

    pub fn exclusion_count(&self) -> usize {
        self.exclusions.len()
    }

    pub fn remaining(&self) -> impl Iterator<Item = CellRef> + '_ {
        self.open_positions
            .iter()
            .copied()
            .filter(|&p| !self.is_excluded(p))
    }

    /// Dimensions other than `self.dim` that pass through `position`.
    pub fn crossing_dimensions(&self, position: CellRef) -> Vec<Dimension> {
        position
            .dimensions()
            .into_iter()
            .filter(|&d| d != self.dim)
            .collect()
    }

    /// Cells that may be cited against `position`: every cell of a crossing
    /// dimension except the position itself, in row-major order.
    pub fn witness_domain(&self, position: CellRef) -> Vec<CellRef> {
        let crossing = self.crossing_dimensions(position);
        CellRef::all()
            .filter(|&c| c != position && crossing.iter().any(|d| d.contains(c)))
            .collect()
    }
}

/// Cells of `dim` that could still hold `identity`.
pub fn open_positions(
    grid: &Grid,
    dim: Dimension,
    identity: Identity,
) -> Result<Vec<CellRef>, AnalysisError> {
    let cells = dim.cells();
    if let Some(&at) = cells
        .iter()
        .find(|&&c| grid.get(c).placed() == Some(identity))
    {
        return Err(AnalysisError::IdentityPlaced { identity, dim, at });
    }
    Ok(cells
        .into_iter()
        .filter(|&c| {
            let state = grid.get(c);
            !state.is_determined() && state.working_set().contains(identity)
        })
        .collect())
}

/// Rules out `position` on the strength of `witness`.
pub fn assert_location_exclusion(
    la: &mut LocationAnalysis,
    grid: &Grid,
    position: CellRef,
    witness: CellRef,
) -> ValidationOutcome {
    if !la.open_positions.contains(&position) {
        return ValidationOutcome::integrity(format!(
            "{position} is not an open position for {} in {}",
            la.identity, la.dim
        ));
    }
    if let Some(existing) = la.exclusions.get(&position) {
        return ValidationOutcome::integrity(format!(
            "duplicate: {position} is already excluded by {}",
            existing.witness
        ));
    }
    if witness == position {
        return ValidationOutcome::integrity(format!("{position} cannot witness against itself"));
    }
    let Some(via) = la
        .crossing_dimensions(position)
        .into_iter()
        .find(|d| d.contains(witness))
    else {
        return ValidationOutcome::integrity(format!(
            "{witness} shares no crossing dimension with {position}"
        ));
    };

    let outcome = match grid.get(witness) {
        CellState::PreSet(id) | CellState::Solved(id) if id == la.identity => {
            ValidationOutcome::valid()
        }
        other => ValidationOutcome::incorrect(format!(
            "{witness} does not hold {} ({})",
            la.identity,
            other.token()
        )),
    };
    la.exclusions.insert(
        position,
        Justification {
            target: position,
            excluded: la.identity,
            witness,
            via,
        },
    );
    outcome
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LocationConclusion {
    SolvedAt(CellRef),
    Inconclusive(usize),
    IntegrityError(String),
}

/// Counts the exclusions and, when exactly one open position survives,
/// posts the identity there.
pub fn count_and_conclude(la: &LocationAnalysis, grid: &Grid) -> (Grid, LocationConclusion) {
    let count = la.exclusion_count();
    let open = la.open_positions.len();
    if count == open {
        return (
            grid.clone(),
            LocationConclusion::IntegrityError(format!(
                "{} has nowhere to go in {}: all {open} open positions are excluded",
                la.identity, la.dim
            )),
        );
    }
    if count + 1 < open {
        return (grid.clone(), LocationConclusion::Inconclusive(count));
    }
    let survivor = la
        .remaining()
        .next()
        .expect("one position survives when count = open - 1");
    if let Some(peer) = survivor
        .peers()
        .into_iter()
        .find(|&p| grid.get(p).placed() == Some(la.identity))
    {
        return (
            grid.clone(),
            LocationConclusion::IntegrityError(format!(
                "{survivor} cannot be posted as {}: {peer} already holds it",
                la.identity
            )),
        );
    }
    (
        grid.with_cell(survivor, CellState::Solved(la.identity)),
        LocationConclusion::SolvedAt(survivor),
    )
}
