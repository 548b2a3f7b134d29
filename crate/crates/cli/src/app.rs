//! Command dispatch. Everything takes explicit streams so tests can drive
//! the binary's logic in-process.

use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use pantagruel_core::{compile, CheckedProgram, Diagnostic, Runtime, StepConfig, StepError, TriggerMode};

use crate::output::{serialize_initial, serialize_store, serialize_tick, Format};
use crate::script::{parse_line, parse_script, ScriptLine};

/// Exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    /// Parse, static, script or usage errors.
    pub const INVALID: i32 = 1;
    pub const IO: i32 = 2;
    /// Interfering rules under strict conflict checking.
    pub const CONFLICT: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "pantagruel", version, about = "Check and run Pantagruel orchestration programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and type-check a program.
    Check { program: PathBuf },
    /// Run a program against a script of external changes.
    Run {
        program: PathBuf,
        /// Script of changes, one `tick` per step.
        #[arg(long)]
        script: PathBuf,
        #[command(flatten)]
        options: RunOptions,
    },
    /// Read script lines from standard input and run each `tick` as it comes.
    Repl {
        program: PathBuf,
        #[command(flatten)]
        options: RunOptions,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    #[default]
    Edge,
    Level,
}

impl From<Mode> for TriggerMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Edge => TriggerMode::Edge,
            Mode::Level => TriggerMode::Level,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunOptions {
    /// How `value = X` tests read the previous and current store.
    #[arg(long, value_enum, default_value_t = Mode::Edge)]
    pub mode: Mode,
    /// Trace format: an aligned table per tick, or one JSON object per line.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print the store before the first tick.
    #[arg(long)]
    pub emit_initial: bool,
    /// Stop after this many ticks.
    #[arg(long, value_name = "N")]
    pub max_ticks: Option<u64>,
    /// Record interfering rules in the trace and drop that tick's effects
    /// instead of aborting.
    #[arg(long)]
    pub no_strict_conflicts: bool,
}

impl RunOptions {
    fn step_config(&self) -> StepConfig {
        StepConfig { mode: self.mode.into(), strict_conflicts: !self.no_strict_conflicts }
    }
}

/// Output streams plus whether standard input is a terminal.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    pub interactive: bool,
}

/// Runs the command line and returns the exit status.
pub fn main_with<I, T>(args: I, io: Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { exit::INVALID } else { exit::OK };
            let target: &mut dyn Write = if e.use_stderr() { io.stderr } else { io.stdout };
            let _ = write!(target, "{}", e.render());
            return status;
        }
    };
    match &cli.command {
        Command::Check { program } => cmd_check(program, io.stderr),
        Command::Run { program, script, options } => cmd_run(program, script, options, io.stdout, io.stderr),
        Command::Repl { program, options } => cmd_repl(program, options, io),
    }
}

pub fn format_diagnostic(path: &Path, d: &Diagnostic) -> String {
    format!("{}:{}:{}: {}", path.display(), d.span.line, d.span.column, d)
}

fn read(path: &Path, stderr: &mut dyn Write) -> Result<String, i32> {
    fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(stderr, "{}: error: cannot read file: {e}", path.display());
        exit::IO
    })
}

/// Reads and checks a program, printing every diagnostic.
fn load(path: &Path, stderr: &mut dyn Write) -> Result<CheckedProgram, i32> {
    let text = read(path, stderr)?;
    match compile(&text) {
        Ok(program) => {
            for d in &program.warnings {
                let _ = writeln!(stderr, "{}", format_diagnostic(path, d));
            }
            Ok(program)
        }
        Err(diagnostics) => {
            for d in &diagnostics {
                let _ = writeln!(stderr, "{}", format_diagnostic(path, d));
            }
            Err(exit::INVALID)
        }
    }
}

pub fn cmd_check(program: &Path, stderr: &mut dyn Write) -> i32 {
    match load(program, stderr) {
        Ok(_) => exit::OK,
        Err(status) => status,
    }
}

fn report_step_error(e: &StepError, stderr: &mut dyn Write) -> i32 {
    match e.conflict() {
        Some(c) => {
            let _ = writeln!(stderr, "error: tick {}: conflict on `{}.{}`: {c}", e.tick, c.entity(), c.key());
            exit::CONFLICT
        }
        None => {
            let _ = writeln!(stderr, "error: {e}");
            exit::INVALID
        }
    }
}

pub fn cmd_run(
    program: &Path,
    script_path: &Path,
    options: &RunOptions,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let program = match load(program, stderr) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let text = match read(script_path, stderr) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let script = match parse_script(&text) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "{}:{}: error: {}", script_path.display(), e.line, e.message);
            return exit::INVALID;
        }
    };
    if !script.trailing.is_empty() {
        let _ = writeln!(
            stderr,
            "{}: warning: {} change(s) after the last `tick` are not run",
            script_path.display(),
            script.trailing.len()
        );
    }

    let mut runtime = Runtime::new(&program, options.step_config());
    if options.emit_initial {
        let _ = stdout.write_all(serialize_initial(&runtime.state().current, options.format).as_bytes());
    }
    let limit = options.max_ticks.unwrap_or(u64::MAX);
    for changes in script.ticks.into_iter().take(usize::try_from(limit).unwrap_or(usize::MAX)) {
        match runtime.step(changes) {
            Ok(record) => {
                let _ = stdout.write_all(serialize_tick(&record, options.format).as_bytes());
            }
            Err(e) => {
                let _ = stdout.flush();
                return report_step_error(&e, stderr);
            }
        }
    }
    let _ = stdout.flush();
    exit::OK
}

/// Line-by-line session. Given the same lines, standard output matches
/// `run` exactly; errors go to standard error and the session goes on.
pub fn cmd_repl(program: &Path, options: &RunOptions, io: Io<'_>) -> i32 {
    let Io { stdin, stdout, stderr, interactive } = io;
    let program = match load(program, stderr) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let mut runtime = Runtime::new(&program, options.step_config());
    if options.emit_initial {
        let _ = stdout.write_all(serialize_initial(&runtime.state().current, options.format).as_bytes());
    }
    let mut pending = Vec::new();
    let mut ticks = 0u64;
    let mut line = String::new();
    loop {
        if interactive {
            let _ = write!(stdout, "> ");
        }
        let _ = stdout.flush();
        line.clear();
        match stdin.read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot read input: {e}");
                return exit::IO;
            }
        }
        match line.trim() {
            "quit" => break,
            "state" => {
                let _ = stdout.write_all(serialize_store(&runtime.state().current, options.format).as_bytes());
                continue;
            }
            _ => {}
        }
        match parse_line(&line) {
            Ok(None) => {}
            Ok(Some(ScriptLine::Change(change))) => pending.push(change),
            Ok(Some(ScriptLine::Tick)) => {
                if options.max_ticks.is_some_and(|max| ticks >= max) {
                    let _ = writeln!(stderr, "error: tick limit reached");
                    continue;
                }
                match runtime.step(std::mem::take(&mut pending)) {
                    Ok(record) => {
                        ticks += 1;
                        let _ = stdout.write_all(serialize_tick(&record, options.format).as_bytes());
                    }
                    Err(e) => {
                        report_step_error(&e, stderr);
                    }
                }
            }
            Err(message) => {
                let _ = writeln!(stderr, "error: {message}");
            }
        }
    }
    let _ = stdout.flush();
    exit::OK
}
