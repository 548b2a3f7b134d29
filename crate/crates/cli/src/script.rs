//! The `.evs` script format: one command per line.
//!
//! ```text
//! # comment
//! event m10.detected = true
//! attr l10.room = 102
//! deploy l30 : Light { room : 101 }
//! remove l30
//! tick
//! ```
//!
//! Changes accumulate until `tick`, which runs them as one step.

use pantagruel_core::syntax::parse_entity_decl;
use pantagruel_core::{ExternalChange, Value};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptLine {
    Tick,
    Change(ExternalChange),
}

/// A parsed script: the change list of every tick, plus whatever followed
/// the last `tick` and therefore never runs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub ticks: Vec<Vec<ExternalChange>>,
    pub trailing: Vec<ExternalChange>,
}

pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut script = Script::default();
    for (index, raw) in text.lines().enumerate() {
        let parsed = parse_line(raw).map_err(|message| ScriptError { line: index + 1, message })?;
        match parsed {
            None => {}
            Some(ScriptLine::Tick) => script.ticks.push(std::mem::take(&mut script.trailing)),
            Some(ScriptLine::Change(change)) => script.trailing.push(change),
        }
    }
    Ok(script)
}

/// Parses one line; blank lines and comments give `None`.
pub fn parse_line(raw: &str) -> Result<Option<ScriptLine>, String> {
    let line = raw.split('#').next().unwrap_or_default().trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let rest = rest.trim();
    let change = match keyword {
        "tick" if rest.is_empty() => return Ok(Some(ScriptLine::Tick)),
        "tick" => return Err(format!("unexpected `{rest}` after `tick`")),
        "event" | "attr" => {
            let (target, value) =
                rest.split_once('=').ok_or_else(|| format!("expected `{keyword} <entity>.<member> = <value>`"))?;
            let (entity, member) = parse_target(target.trim())?;
            let value = parse_value(value.trim())?;
            if keyword == "event" {
                ExternalChange::event(entity, member, value)
            } else {
                ExternalChange::attribute(entity, member, value)
            }
        }
        "deploy" => {
            let decl = parse_entity_decl(rest).map_err(|errors| {
                let first = &errors[0];
                format!("invalid entity declaration: {} at column {}", first.message, first.span.column)
            })?;
            ExternalChange::Deploy(decl)
        }
        "remove" => ExternalChange::Remove(parse_ident(rest)?.to_string()),
        other => return Err(format!("unknown command `{other}`")),
    };
    Ok(Some(ScriptLine::Change(change)))
}

fn parse_target(text: &str) -> Result<(&str, &str), String> {
    let (entity, member) =
        text.split_once('.').ok_or_else(|| format!("expected `<entity>.<member>`, found `{text}`"))?;
    Ok((parse_ident(entity.trim())?, parse_ident(member.trim())?))
}

fn parse_ident(text: &str) -> Result<&str, String> {
    let mut chars = text.chars();
    let valid = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if valid {
        Ok(text)
    } else {
        Err(format!("`{text}` is not an identifier"))
    }
}

/// `true`, `false`, `undef` or a decimal natural number.
pub fn parse_value(text: &str) -> Result<Value, String> {
    match text {
        "true" => Ok(Value::Tr(true)),
        "false" => Ok(Value::Tr(false)),
        "undef" => Ok(Value::Undef),
        _ if !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit()) => {
            text.parse().map(Value::Nat).map_err(|_| format!("number `{text}` is too large"))
        }
        _ => Err(format!("`{text}` is not a value (expected a number, `true`, `false` or `undef`)")),
    }
}
