mod common;

use std::time::{Duration, Instant};

use sudoku_audit_core::oracle::{auto_fixpoint, brute_force_solve, SolutionCount};
use sudoku_audit_core::{parse_grid, CellRef, Grid};

fn digit_at(solution: &str, cell: CellRef) -> u8 {
    solution.as_bytes()[cell.index()] - b'0'
}

#[test]
fn corpus_is_large_and_unique_within_budget() {
    let corpus = common::corpus();
    assert!(corpus.len() >= 20, "{} puzzles", corpus.len());
    let start = Instant::now();
    for (name, puzzle) in &corpus {
        let out = brute_force_solve(&parse_grid(puzzle).unwrap()).unwrap();
        assert_eq!(out.count, SolutionCount::Unique, "{name}");
        let solution = out.solution.unwrap().to_puzzle_string();
        assert!(common::is_solution_of(&solution, puzzle), "{name}");
    }
    assert!(
        start.elapsed() < Duration::from_secs(5),
        "{:?}",
        start.elapsed()
    );
}

#[test]
fn search_stops_at_two() {
    // too few clues to pin a single solution
    let puzzle =
        ".....6....59.....82....8....45........3........6..3.54...325..6..................";
    assert_eq!(
        brute_force_solve(&parse_grid(puzzle).unwrap())
            .unwrap()
            .count,
        SolutionCount::Multiple
    );
    assert_eq!(
        brute_force_solve(&Grid::empty()).unwrap().count,
        SolutionCount::Multiple
    );
}

#[test]
fn fixpoint_agrees_with_oracle_on_every_puzzle() {
    let mut solvable = 0;
    for (name, puzzle) in common::corpus() {
        let grid = parse_grid(puzzle).unwrap();
        let solution = brute_force_solve(&grid)
            .unwrap()
            .solution
            .unwrap()
            .to_puzzle_string();
        let fp = auto_fixpoint(&grid).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(
            fp.workbench
                .ledger()
                .records()
                .iter()
                .all(|r| r.outcome.is_valid()),
            "{name}"
        );

        for (cell, state) in fp.workbench.grid().cells() {
            let want = digit_at(&solution, cell);
            match state.placed() {
                Some(id) => assert_eq!(id.get(), want, "{name} {cell}"),
                None => assert!(
                    state.working_set().iter().any(|id| id.get() == want),
                    "{name}: {cell} lost the solution value"
                ),
            }
        }

        let reference = common::singles_and_pairs(puzzle).expect("corpus puzzles are consistent");
        let reference_solves = !reference.contains(&0);
        assert_eq!(fp.solved, reference_solves, "{name}");
        if reference_solves {
            solvable += 1;
            assert_eq!(fp.workbench.grid().to_puzzle_string(), solution, "{name}");
        }
    }
    assert!(solvable > 0 && solvable < common::corpus().len());
}
