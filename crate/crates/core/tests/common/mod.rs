//! Shared test support: the puzzle corpus and a random move generator that
//! mixes honest moves with wrong, malformed and duplicate ones.

#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::Rng;
use sudoku_audit_core::exclusion::{Justification, Selection};
use sudoku_audit_core::workbench::OpenAnalysis;
use sudoku_audit_core::{CellRef, Dimension, DimensionKind, Grid, Identity, Move, Workbench};

pub const CORPUS: &str = include_str!("../../fixtures/corpus.txt");

pub fn corpus() -> Vec<(&'static str, &'static str)> {
    CORPUS
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_once(' ').expect("name puzzle"))
        .collect()
}

fn random_identity(rng: &mut impl Rng) -> Identity {
    Identity::new(rng.random_range(1..=9)).unwrap()
}

fn random_cell(rng: &mut impl Rng) -> CellRef {
    CellRef::from_index(rng.random_range(0..81))
}

fn random_dim(rng: &mut impl Rng) -> Dimension {
    let kind = *[DimensionKind::Row, DimensionKind::Col, DimensionKind::Box]
        .choose(rng)
        .unwrap();
    Dimension::new(kind, rng.random_range(1..=9)).unwrap()
}

fn open_cells(grid: &Grid) -> Vec<CellRef> {
    CellRef::all()
        .filter(|&c| !grid.get(c).is_determined())
        .collect()
}

/// A justification against `target`: honest when a column or box witness
/// exists and the coin says so, otherwise random.
fn justification(rng: &mut impl Rng, grid: &Grid, target: CellRef) -> Justification {
    if rng.random_bool(0.6) {
        let honest: Vec<Justification> = [DimensionKind::Col, DimensionKind::Box]
            .into_iter()
            .map(|k| target.dimension(k))
            .flat_map(|via| {
                via.cells().into_iter().filter_map(move |w| {
                    grid.get(w).placed().map(|id| Justification {
                        target,
                        excluded: id,
                        witness: w,
                        via,
                    })
                })
            })
            .collect();
        if let Some(j) = honest.choose(rng) {
            return *j;
        }
    }
    let via = match rng.random_range(0..10) {
        0 => random_dim(rng),
        1..=5 => target.dimension(DimensionKind::Col),
        _ => target.dimension(DimensionKind::Box),
    };
    let witness = if rng.random_bool(0.9) {
        *via.cells().choose(rng).unwrap()
    } else {
        random_cell(rng)
    };
    Justification {
        target,
        excluded: random_identity(rng),
        witness,
        via,
    }
}

fn location_assert(
    rng: &mut impl Rng,
    grid: &Grid,
    dim: Dimension,
    identity: Identity,
    open: &[CellRef],
) -> Move {
    if rng.random_bool(0.6) {
        let honest: Vec<(CellRef, CellRef)> = open
            .iter()
            .flat_map(|&p| {
                p.dimensions()
                    .into_iter()
                    .filter(|&d| d != dim)
                    .flat_map(|d| d.cells())
                    .filter(|&w| grid.get(w).placed() == Some(identity))
                    .map(move |w| (p, w))
            })
            .collect();
        if let Some(&(position, witness)) = honest.choose(rng) {
            return Move::LocationAssert {
                dim,
                identity,
                position,
                witness,
            };
        }
    }
    let position = if rng.random_bool(0.85) && !open.is_empty() {
        *open.choose(rng).unwrap()
    } else {
        *dim.cells().choose(rng).unwrap()
    };
    let witness = if rng.random_bool(0.8) {
        let crossing: Vec<CellRef> = position
            .dimensions()
            .into_iter()
            .filter(|&d| d != dim)
            .flat_map(|d| d.cells())
            .collect();
        *crossing.choose(rng).unwrap()
    } else {
        random_cell(rng)
    };
    Move::LocationAssert {
        dim,
        identity,
        position,
        witness,
    }
}

/// The next move to submit. May be refused by the workbench.
pub fn next_move(rng: &mut impl Rng, wb: &Workbench) -> Move {
    let grid = wb.grid();
    match wb.open_analysis() {
        Some(OpenAnalysis::Cell(a)) => match a.target {
            Some(target) if rng.random_bool(0.75) => {
                Move::ExclusionAssert(justification(rng, grid, target))
            }
            Some(target) => Move::CellConclude(Selection::Cell(target)),
            None => Move::CellConclude(a.selection().expect("row selected")),
        },
        Some(OpenAnalysis::Location(la)) => {
            if rng.random_bool(0.65) {
                location_assert(rng, grid, la.dim, la.identity, &la.open_positions)
            } else {
                Move::LocationConclude {
                    dim: la.dim,
                    identity: la.identity,
                }
            }
        }
        None => {
            let open = open_cells(grid);
            let roll = rng.random_range(0..100);
            match (roll, open.choose(rng)) {
                (0..45, Some(&target)) => Move::ExclusionAssert(justification(rng, grid, target)),
                (45..50, Some(&target)) => Move::CellConclude(Selection::Cell(target)),
                (50..80, _) => {
                    let dim = random_dim(rng);
                    let identity = random_identity(rng);
                    let positions = dim
                        .cells()
                        .into_iter()
                        .filter(|&c| {
                            !grid.get(c).is_determined()
                                && grid.get(c).working_set().contains(identity)
                        })
                        .collect::<Vec<_>>();
                    location_assert(rng, grid, dim, identity, &positions)
                }
                (80..95, _) => Move::MutualExclusionApply {
                    dim: random_dim(rng),
                },
                _ => Move::CellConclude(Selection::Row(rng.random_range(1..=9))),
            }
        }
    }
}

/// A workbench on `puzzle` that has already replayed the first `k` moves
/// the automatic solver would make, so later random moves meet "1 of 2"
/// cells and partly solved dimensions.
pub fn warm_start(puzzle: &str, k: usize) -> Trace {
    let grid: Grid = puzzle.parse().unwrap();
    let derivation = match sudoku_audit_core::oracle::auto_fixpoint(&grid) {
        Ok(fp) => fp.workbench,
        Err(e) => e
            .workbench()
            .expect("corpus puzzles are consistent")
            .clone(),
    };
    let mut trace = Trace {
        wb: Workbench::from_grid(grid),
        live_digests: Vec::new(),
        refused: 0,
        changed: 0,
    };
    for record in derivation.ledger().records().iter().take(k) {
        let applied = trace.wb.apply(Move::from_payload(&record.payload)).unwrap();
        trace.changed += usize::from(applied.changed());
        trace.live_digests.push(applied.record.grid_digest);
    }
    trace
}

/// A driven sequence: the workbench it ended in, plus the grid digest
/// observed live after every recorded move.
pub struct Trace {
    pub wb: Workbench,
    pub live_digests: Vec<String>,
    pub refused: usize,
    pub changed: usize,
}

/// Continues `start` with `steps` generated moves, checking after each one that no cell
/// lost its last candidate, that no dimension holds a duplicate, and that
/// refused and rejected moves left the grid alone.
pub fn drive(rng: &mut impl Rng, start: Trace, steps: usize) -> Result<Trace, String> {
    use sudoku_audit_core::ledger::grid_digest;

    let Trace {
        mut wb,
        live_digests: mut trace_digests,
        mut refused,
        mut changed,
    } = start;
    for step in 0..steps {
        let mv = next_move(rng, &wb);
        let before = wb.grid().clone();
        let len = wb.ledger().len();
        match wb.apply(mv) {
            Err(_) => {
                refused += 1;
                if *wb.grid() != before || wb.ledger().len() != len {
                    return Err(format!("step {step}: refused {mv:?} changed state"));
                }
            }
            Ok(applied) => {
                let record = &applied.record;
                if record.grid_digest != grid_digest(wb.grid()) {
                    return Err(format!("step {step}: digest does not match grid"));
                }
                if record.outcome.is_integrity_error()
                    && (applied.changed() || *wb.grid() != before)
                {
                    return Err(format!("step {step}: rejected {mv:?} mutated the grid"));
                }
                if applied.changed() != (grid_digest(&before) != record.grid_digest) {
                    return Err(format!("step {step}: change report disagrees with digest"));
                }
                changed += usize::from(applied.changed());
                trace_digests.push(record.grid_digest.clone());
            }
        }
        if let Some(cell) = CellRef::all().find(|&c| wb.grid().get(c).working_set().is_empty()) {
            return Err(format!(
                "step {step}: {cell} has no candidates after {mv:?}"
            ));
        }
        if let Some((dim, id)) = wb.grid().first_conflict() {
            return Err(format!("step {step}: {id} twice in {dim} after {mv:?}"));
        }
    }
    Ok(Trace {
        wb,
        live_digests: trace_digests,
        refused,
        changed,
    })
}

/// Serialises the ledger, replays it from scratch and compares everything
/// the replay can observe with what happened live.
pub fn check_replay(trace: &Trace) -> Result<(), String> {
    use sudoku_audit_core::ledger::{replay, reviewer_report, Ledger};

    let text = trace.wb.ledger().to_text();
    let parsed = Ledger::parse(&text).map_err(|e| e.to_string())?;
    if parsed.to_text() != text {
        return Err("ledger text does not round-trip".into());
    }
    let replayed = replay(&parsed).map_err(|e| e.to_string())?;
    if replayed.grid() != trace.wb.grid() {
        return Err("replayed grid differs".into());
    }
    let digests: Vec<&String> = replayed
        .ledger()
        .records()
        .iter()
        .map(|r| &r.grid_digest)
        .collect();
    if digests != trace.live_digests.iter().collect::<Vec<_>>() {
        return Err("intermediate digests differ".into());
    }
    if replayed.ledger() != trace.wb.ledger() {
        return Err("replayed records differ".into());
    }

    let digest_changes = std::iter::once(sudoku_audit_core::ledger::grid_digest(
        &parsed.puzzle().parse().unwrap(),
    ))
    .chain(trace.live_digests.iter().cloned())
    .collect::<Vec<_>>()
    .windows(2)
    .filter(|w| w[0] != w[1])
    .count();
    if digest_changes != trace.changed {
        return Err(format!(
            "{} moves changed the grid but the digest changed {digest_changes} times",
            trace.changed
        ));
    }

    let report = reviewer_report(&parsed);
    let mut flagged: Vec<u64> = report.flagged.iter().map(|m| m.seq).collect();
    let incorrect: Vec<u64> = parsed
        .records()
        .iter()
        .filter(|r| r.outcome.is_incorrect())
        .map(|r| r.seq)
        .collect();
    flagged.dedup();
    if flagged.len() != report.flagged.len() || flagged != incorrect {
        return Err(format!("flagged {flagged:?}, incorrect {incorrect:?}"));
    }
    Ok(())
}

// An independent reference: plain index arithmetic, none of the crate's
// geometry or candidate types.

/// Units as index lists, built without the crate's geometry.
pub fn units() -> Vec<[usize; 9]> {
    let mut units = Vec::new();
    for i in 0..9 {
        units.push(std::array::from_fn(|k| i * 9 + k));
        units.push(std::array::from_fn(|k| k * 9 + i));
        let (r0, c0) = (i / 3 * 3, i % 3 * 3);
        units.push(std::array::from_fn(|k| (r0 + k / 3) * 9 + c0 + k % 3));
    }
    units
}

/// Candidate propagation with naked singles, hidden singles and naked
/// pairs only. Returns the digits it could fix, 0 where it stalled, or
/// `None` on contradiction.
pub fn singles_and_pairs(puzzle: &str) -> Option<[u8; 81]> {
    let units = units();
    let mut cand = [0x3FEu16; 81];
    for (i, ch) in puzzle.bytes().enumerate() {
        if (b'1'..=b'9').contains(&ch) {
            cand[i] = 1 << (ch - b'0');
        }
    }
    loop {
        let before = cand;
        // singles eliminate from peers
        for unit in &units {
            for &i in unit {
                if cand[i].count_ones() == 1 {
                    for &j in unit {
                        if j != i {
                            cand[j] &= !cand[i];
                        }
                    }
                }
            }
        }
        // hidden singles
        for unit in &units {
            for d in 1..=9 {
                let bit = 1u16 << d;
                let spots: Vec<usize> = unit
                    .iter()
                    .copied()
                    .filter(|&i| cand[i] & bit != 0)
                    .collect();
                if spots.len() == 1 {
                    cand[spots[0]] = bit;
                }
            }
        }
        // naked pairs
        for unit in &units {
            for (a, &i) in unit.iter().enumerate() {
                if cand[i].count_ones() != 2 {
                    continue;
                }
                for &j in &unit[a + 1..] {
                    if cand[j] == cand[i] {
                        let pair = cand[i];
                        for &k in unit {
                            if k != i && k != j {
                                cand[k] &= !pair;
                            }
                        }
                    }
                }
            }
        }
        if cand.contains(&0) {
            return None;
        }
        if cand == before {
            break;
        }
    }
    Some(std::array::from_fn(|i| {
        if cand[i].count_ones() == 1 {
            cand[i].trailing_zeros() as u8
        } else {
            0
        }
    }))
}

pub fn is_solution_of(solution: &str, puzzle: &str) -> bool {
    let digits: Vec<u8> = solution.bytes().map(|b| b - b'0').collect();
    digits.len() == 81
        && puzzle
            .bytes()
            .zip(&digits)
            .all(|(p, &d)| !(b'1'..=b'9').contains(&p) || p - b'0' == d)
        && units().iter().all(|u| {
            let mut seen = 0u16;
            u.iter().for_each(|&i| seen |= 1 << digits[i]);
            seen == 0x3FE
        })
}
