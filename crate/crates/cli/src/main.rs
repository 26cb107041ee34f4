//! `sudoku-audit`: batch solving, uniqueness checks, ledger replay and
//! review, and the HTTP service.
//!
//! Exit codes: 0 ok, 1 `check` found no unique solution, 2 input error,
//! 3 `solve` stalled, 4 `replay` diverged.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sudoku_audit_core::ledger::{replay_text, reviewer_report, Ledger, Payload, ReplayError};
use sudoku_audit_core::oracle::{auto_fixpoint, brute_force_solve, FixpointError, SolutionCount};
use sudoku_audit_core::{parse_grid, Grid};
use sudoku_audit_service::ServiceConfig;

const OK: u8 = 0;
const NOT_UNIQUE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const STALLED: u8 = 3;
const DIVERGED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "sudoku-audit",
    version,
    about = "Audited Sudoku solving: every move justified, recorded and replayable",
    after_help = "Exit codes: 0 ok, 1 not unique (check), 2 input error, 3 stalled (solve), 4 divergence (replay)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the automatic singles-and-pairs solver and write its ledger.
    Solve {
        /// Puzzle file: 81 cells, `.` or `0` for empty, whitespace ignored.
        puzzle: PathBuf,
        /// Where to write the derivation ledger [default: <PUZZLE>.ledger].
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also print the candidate table.
        #[arg(long)]
        candidates: bool,
    },
    /// Count solutions by exhaustive search, stopping at two.
    Check { puzzle: PathBuf },
    /// Replay a ledger from its puzzle and verify every record.
    Replay {
        ledger: PathBuf,
        /// Also print the candidate table of the final grid.
        #[arg(long)]
        candidates: bool,
    },
    /// Summarise a ledger for a reviewer.
    Report { ledger: PathBuf },
    /// Start the HTTP session service.
    Serve {
        /// Address to listen on.
        #[arg(long, env = "BIND", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Directory for session ledgers; sessions are kept in memory only
        /// when unset.
        #[arg(long, env = "DATA_DIR")]
        data_dir: Option<PathBuf>,
        /// Directory of static UI files to serve alongside the API.
        #[arg(long, env = "UI_DIR")]
        ui_dir: Option<PathBuf>,
    },
}

/// An input problem: reported on standard error, exit 2.
struct InputError(String);

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_puzzle(path: &Path) -> Result<Grid, InputError> {
    let grid =
        parse_grid(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    match grid.first_conflict() {
        Some((dim, id)) => Err(InputError(format!(
            "{}: inconsistent puzzle, {id} appears twice in {dim}",
            path.display()
        ))),
        None => Ok(grid),
    }
}

fn solve(puzzle: &Path, out: Option<PathBuf>, candidates: bool) -> Result<u8, InputError> {
    let grid = read_puzzle(puzzle)?;
    let (workbench, solved) = match auto_fixpoint(&grid) {
        Ok(fp) => (fp.workbench, fp.solved),
        Err(FixpointError::Inconsistent(e)) => return Err(InputError(e.to_string())),
        Err(e) => {
            // the derivation so far is still written, for inspection
            eprintln!("solver stopped: {e}");
            (e.workbench().cloned().expect("started"), false)
        }
    };
    let out = out.unwrap_or_else(|| {
        let mut name = puzzle.as_os_str().to_owned();
        name.push(".ledger");
        PathBuf::from(name)
    });
    fs::write(&out, workbench.ledger().to_text())
        .map_err(|e| InputError(format!("{}: {e}", out.display())))?;

    print!("{}", workbench.grid().render());
    if candidates {
        println!();
        print!("{}", workbench.grid().render_candidates());
    }
    println!(
        "{} after {} moves; ledger written to {}",
        if solved { "solved" } else { "stalled" },
        workbench.ledger().len(),
        out.display()
    );
    Ok(if solved { OK } else { STALLED })
}

fn check(puzzle: &Path) -> Result<u8, InputError> {
    let grid = read_puzzle(puzzle)?;
    let outcome = brute_force_solve(&grid).map_err(|e| InputError(e.to_string()))?;
    let label = match outcome.count {
        SolutionCount::None => "no solution",
        SolutionCount::Unique => "unique",
        SolutionCount::Multiple => "multiple",
    };
    println!("{} ({label})", outcome.count);
    if let Some(solution) = outcome
        .solution
        .filter(|_| outcome.count == SolutionCount::Unique)
    {
        print!("{}", solution.render());
    }
    Ok(if outcome.count == SolutionCount::Unique {
        OK
    } else {
        NOT_UNIQUE
    })
}

fn replay(path: &Path, candidates: bool) -> Result<u8, InputError> {
    let text = read(path)?;
    match replay_text(&text) {
        Ok(wb) => {
            print!("{}", wb.grid().render());
            if candidates {
                println!();
                print!("{}", wb.grid().render_candidates());
            }
            println!(
                "replayed {} records; digest {}",
                wb.ledger().len(),
                wb.digest()
            );
            Ok(OK)
        }
        Err(ReplayError::Divergence {
            seq,
            recorded,
            replayed,
        }) => {
            println!("divergence at seq {seq}");
            println!("recorded: {recorded}");
            println!("replayed: {replayed}");
            Ok(DIVERGED)
        }
        Err(e) => Err(InputError(format!("{}: {e}", path.display()))),
    }
}

fn report(path: &Path) -> Result<u8, InputError> {
    let ledger =
        Ledger::parse(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    print!("{}", reviewer_report(&ledger));
    let revisions: Vec<_> = ledger
        .records()
        .iter()
        .filter_map(|r| match &r.payload {
            Payload::MutualExclusionApply {
                report: Some(rep), ..
            } if !rep.revised.is_empty() => Some((r.seq, rep)),
            _ => None,
        })
        .collect();
    if !revisions.is_empty() {
        println!();
        println!("mutual exclusion revisions:");
        println!(
            "{:>5}  {:<6} {:<6} {:<10} revised",
            "seq", "dim", "cell", "available"
        );
        for (seq, rep) in revisions {
            for v in &rep.revised {
                println!(
                    "{seq:>5}  {:<6} {:<6} {:<10} {}",
                    rep.dim.to_string(),
                    v.cell.to_string(),
                    v.before.to_string(),
                    v.after
                );
            }
        }
    }
    Ok(OK)
}

fn serve(config: ServiceConfig) -> Result<u8, InputError> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| InputError(e.to_string()))?;
    runtime
        .block_on(sudoku_audit_service::serve(config))
        .map_err(|e| InputError(format!("serve: {e}")))?;
    Ok(OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            puzzle,
            out,
            candidates,
        } => solve(&puzzle, out, candidates),
        Command::Check { puzzle } => check(&puzzle),
        Command::Replay { ledger, candidates } => replay(&ledger, candidates),
        Command::Report { ledger } => report(&ledger),
        Command::Serve {
            bind,
            data_dir,
            ui_dir,
        } => serve(ServiceConfig {
            bind,
            data_dir,
            ui_dir,
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
