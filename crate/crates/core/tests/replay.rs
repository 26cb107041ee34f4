mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sudoku_audit_core::ledger::{replay_text, ReplayError};
use sudoku_audit_core::Workbench;

fn run(seed: u64, puzzle: usize, warm: usize, steps: usize) -> Result<(), String> {
    let corpus = common::corpus();
    let (_, text) = corpus[puzzle % corpus.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trace = common::drive(&mut rng, common::warm_start(text, warm), steps)?;
    common::check_replay(&trace)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn replay_reproduces_every_digest(
        seed in any::<u64>(),
        puzzle in 0usize..64,
        warm in prop_oneof![Just(0usize), 0usize..400],
        steps in 1usize..80,
    ) {
        prop_assert_eq!(run(seed, puzzle, warm, steps), Ok(()));
    }
}

#[test]
fn sequences_exercise_every_outcome() {
    use sudoku_audit_core::MoveKind;
    let mut kinds = std::collections::HashSet::new();
    let (mut valid, mut incorrect, mut integrity, mut redundant) = (0, 0, 0, 0);
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trace = common::drive(
            &mut rng,
            common::warm_start(common::corpus()[seed as usize % 5].1, 150),
            60,
        )
        .unwrap();
        for r in trace.wb.ledger().records().iter().skip(150) {
            kinds.insert((r.kind(), r.outcome.class()));
            valid += usize::from(r.outcome.is_valid());
            incorrect += usize::from(r.outcome.is_incorrect());
            integrity += usize::from(r.outcome.is_integrity_error());
            redundant += usize::from(r.outcome.flags.redundant);
        }
    }
    assert!(valid > 0 && incorrect > 0 && integrity > 0 && redundant > 0);
    for kind in [
        MoveKind::ExclusionAssert,
        MoveKind::LocationAssert,
        MoveKind::MutualExclusionApply,
        MoveKind::CellConclude,
        MoveKind::LocationConclude,
    ] {
        assert!(kinds.contains(&(kind, "valid")), "{kind} never valid");
    }
    // random pairs rarely break parity; rejected applications are covered
    // by the dedicated mutual exclusion tests
    for kind in [
        MoveKind::ExclusionAssert,
        MoveKind::LocationAssert,
        MoveKind::CellConclude,
    ] {
        assert!(
            kinds.contains(&(kind, "integrity")),
            "{kind} never rejected"
        );
    }
}

#[test]
fn tampered_ledger_reports_first_bad_record() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trace = common::drive(&mut rng, common::warm_start(common::corpus()[0].1, 40), 30).unwrap();
    let text = trace.wb.ledger().to_text();
    let lines: Vec<&str> = text.lines().collect();

    // a result that differs from what the move produces
    let target = lines
        .iter()
        .position(|l| l.contains("|CellConclude|") && l.contains(";result="))
        .expect("a cell conclusion");
    let tampered_line = {
        let (head, tail) = lines[target].split_once(";result=").unwrap();
        let (result, rest) = tail.split_at(tail.find('|').unwrap());
        let forged = if result == "." { "#Error" } else { "." };
        format!("{head};result={forged}{rest}")
    };
    let mut tampered = lines.clone();
    tampered[target] = &tampered_line;
    let err = replay_text(&(tampered.join("\n") + "\n")).unwrap_err();
    assert_eq!(err.divergent_seq(), Some(target as u64 - 2));

    // a digest from a different grid
    let mut tampered = lines.clone();
    let swapped = lines[5].rsplit_once('|').unwrap().0.to_owned() + "|" + &"0".repeat(64);
    tampered[5] = &swapped;
    let err = replay_text(&(tampered.join("\n") + "\n")).unwrap_err();
    assert!(
        matches!(err, ReplayError::Divergence { seq: 3, .. }),
        "{err}"
    );

    assert!(matches!(
        replay_text(&text[..text.len() - 1]),
        Err(ReplayError::Parse(_))
    ));
}

#[test]
fn empty_ledger_replays_to_the_puzzle() {
    let wb = Workbench::from_puzzle(common::corpus()[3].1).unwrap();
    let back = replay_text(&wb.ledger().to_text()).unwrap();
    assert_eq!(back.grid(), wb.grid());
    assert!(back.ledger().is_empty());
}
