//! Command-line front end: script format, trace serialization and the
//! `check`, `run` and `repl` commands.

pub mod app;
pub mod output;
pub mod script;

pub use app::{main_with, Cli, Io};
pub use output::{serialize_tick, Format};
pub use script::{parse_script, Script, ScriptError};
