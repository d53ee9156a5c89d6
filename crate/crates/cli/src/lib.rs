//! The `projip` command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 unreadable or invalid
//! input, 3 the engine cannot handle the instance (precondition, unbounded
//! subproblem, size limit), 4 internal error.

mod bench;
mod solve;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use projip::Error;

pub use bench::{BenchRow, CSV_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ENGINE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "projip", version, about = "Exact solver for min cᵀx + g(Wx) over integer boxes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve an instance file and print the result as JSON.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Compare an engine with brute force, on a file or a seeded batch.
    Verify(VerifyArgs),
    /// Time the engines over an (n, m, Δ) grid and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Auto,
    Nonneg,
    Bounded,
    UnknownW,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value = "auto")]
    pub engine: EngineChoice,
    /// Largest target radius explored; for unknown-w, the search budget N.
    #[arg(long)]
    pub radius_cap: Option<u64>,
    #[arg(long, value_enum, default_value = "on")]
    pub deepening: Switch,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Replace infinite bounds by ±CAP (brute force always needs this).
    #[arg(long)]
    pub cap_infinite: Option<i64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Instance file; omit to run a seeded batch.
    pub path: Option<PathBuf>,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Batch size.
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub delta: i64,
    /// Corrupts engine results to exercise the mismatch path.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 4, 8])]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2])]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0, 1, 2])]
    pub delta: Vec<i64>,
    #[arg(long, default_value_t = 3)]
    pub repetitions: u64,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invalid(_) | Error::Parse(_) => EXIT_INPUT,
        Error::MergeRefused { .. }
        | Error::UnboundedDomain(_)
        | Error::Precondition(_)
        | Error::ContractViolation(_)
        | Error::VolumeLimit { .. }
        | Error::StateLimit { .. }
        | Error::Overflow(_) => EXIT_ENGINE,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

fn report(e: &Error, err: &mut dyn Write) -> i32 {
    match e {
        Error::Invalid(vs) => {
            let _ = writeln!(err, "invalid instance:");
            for v in vs {
                let _ = writeln!(err, "  {v}");
            }
        }
        other => {
            let _ = writeln!(err, "error: {other}");
        }
    }
    exit_code(e)
}

pub(crate) fn read_document(path: &Path) -> projip::Result<projip::io::Document> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    projip::io::parse_document(&text)
}

/// Runs a parsed command line, writing results to `out` and diagnostics to
/// `err`. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve { path, engine } => solve::cmd_solve(&path, &engine, out),
        Command::Verify(args) => verify::cmd_verify(&args, out),
        Command::Bench(args) => bench::cmd_bench(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => report(&e, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_INPUT);
        assert_eq!(exit_code(&Error::Invalid(Vec::new())), EXIT_INPUT);
        assert_eq!(exit_code(&Error::Precondition("x".into())), EXIT_ENGINE);
        assert_eq!(exit_code(&Error::UnboundedDomain("x".into())), EXIT_ENGINE);
        assert_eq!(exit_code(&Error::Internal("x".into())), EXIT_INTERNAL);
    }

    #[test]
    fn parses_engine_flags() {
        let cli = Cli::try_parse_from([
            "projip", "solve", "a.json", "--engine", "unknown-w", "--radius-cap", "3", "--deepening", "off",
        ])
        .unwrap();
        let Command::Solve { path, engine } = cli.command else {
            panic!("expected solve");
        };
        assert_eq!(path, PathBuf::from("a.json"));
        assert_eq!(engine.engine, EngineChoice::UnknownW);
        assert_eq!(engine.radius_cap, Some(3));
        assert_eq!(engine.deepening, Switch::Off);
        assert_eq!(engine.jobs, 1);
    }

    #[test]
    fn bench_grid_takes_lists() {
        let cli = Cli::try_parse_from(["projip", "bench", "--n", "3,5", "--delta", "1"]).unwrap();
        let Command::Bench(args) = cli.command else {
            panic!("expected bench");
        };
        assert_eq!(args.n, vec![3, 5]);
        assert_eq!(args.m, vec![1, 2]);
        assert_eq!(args.delta, vec![1]);
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let e = read_document(Path::new("/nonexistent/instance.json")).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_INPUT);
    }
}
