//! Command-line front-end for `simplex-bounds`.
//!
//! Exit codes: 0 ok, 1 usage or malformed input, 2 precondition violated,
//! 3 enumeration budget exceeded, 4 sweep finished with FAIL rows.

pub mod args;
pub mod commands;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;

use simplex_bounds::Error;

use args::{BoundCommand, Cli, Command, Format, OracleCommand, SweepArgs};
use commands::Outcome;
use output::{write_csv, Record};
use sweep::{run_sweep, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_AUDIT_FAILED: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Core(
            Error::PreconditionOrderViolated { .. } | Error::RequiresStrictInterior { .. },
        ) => EXIT_PRECONDITION,
        CliError::Core(Error::BudgetExceeded { .. }) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

struct Context {
    format: Format,
    quiet: bool,
    timestamp: bool,
}

fn unix_seconds() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn emit(ctx: &Context, mut record: Record, stdout: &mut dyn Write) -> Result<(), CliError> {
    if ctx.timestamp {
        record.set("timestamp", unix_seconds());
    }
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    match ctx.format {
        Format::Json => writeln!(stdout, "{}", record.to_json()).map_err(io),
        Format::Csv => {
            let columns: Vec<&str> = record.keys().collect();
            write_csv(stdout, &columns, std::slice::from_ref(&record)).map_err(CliError::from)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn cmd_sweep(
    ctx: &Context,
    a: &SweepArgs,
    seed: Option<u64>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut config = SweepConfig::from_path(&a.config)?;
    if let Some(seed) = seed {
        config.oracle.seed = seed;
    }
    if let Some(w) = a.workers {
        config.oracle.workers = w;
    }
    let csv_path = a.csv.clone().or(config.output.csv.clone());
    let json_path = a.json.clone().or(config.output.json.clone());

    let report = run_sweep(&config)?;
    let to_stdout = csv_path.is_none() && json_path.is_none();
    if let Some(p) = &csv_path {
        write_file(p, &report.to_csv_bytes()?)?;
    }
    if let Some(p) = &json_path {
        write_file(p, report.to_json_string().as_bytes())?;
    }
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    if to_stdout {
        match ctx.format {
            Format::Json => stdout
                .write_all(report.to_json_string().as_bytes())
                .map_err(io)?,
            Format::Csv => stdout.write_all(&report.to_csv_bytes()?).map_err(io)?,
        }
    }
    if !ctx.quiet {
        // keep stdout machine-readable when it carries the report
        let sink: &mut dyn Write = if to_stdout { stderr } else { stdout };
        let _ = writeln!(sink, "{}", report.summary());
    }
    Ok(if report.fail == 0 {
        EXIT_OK
    } else {
        EXIT_AUDIT_FAILED
    })
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = Context {
        format: cli.format,
        quiet: cli.quiet,
        timestamp: !cli.no_timestamp,
    };
    let seed = cli.seed.unwrap_or(0);
    let outcome: Outcome = match &cli.command {
        Command::Bound(BoundCommand::General(a)) => commands::bound_general(a)?,
        Command::Bound(BoundCommand::Multinomial(a)) => commands::bound_multinomial(a)?,
        Command::Bound(BoundCommand::Dirichlet(a)) => commands::bound_dirichlet(a)?,
        Command::Oracle(OracleCommand::Multinomial(a)) => commands::oracle_multinomial(a)?,
        Command::Oracle(OracleCommand::General(a)) => commands::oracle_general(a)?,
        Command::Oracle(OracleCommand::Mc(a)) => commands::monte_carlo("oracle", a, seed)?,
        Command::Mc(a) => commands::monte_carlo("mc", a, seed)?,
        Command::Sweep(a) => return cmd_sweep(&ctx, a, cli.seed, stdout, stderr),
    };
    if outcome.code == EXIT_PRECONDITION && !ctx.quiet {
        if let Some(msg) = outcome.record.get("error").and_then(|v| v.as_str()) {
            let _ = writeln!(stderr, "simplex-bounds: {msg}");
        }
    }
    emit(&ctx, outcome.record, stdout)?;
    Ok(outcome.code)
}

/// Parses `args` (program name first) and runs the command, writing records
/// to `stdout` and diagnostics to `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "simplex-bounds: {e}");
            exit_code(&e)
        }
    }
}
