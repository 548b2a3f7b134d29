//! The reactive loop: per tick, apply the external changes, evaluate the
//! rule block against the previous and the updated store, reset implicit
//! events and layer the rule effects on top.

use std::fmt;

use crate::domains::{ConflictError, EnvInterface, Store, Value};
use crate::rule_eval::{eval_rule_block, FiredRule, RuleError, TriggerMode};
use crate::spec_eval::{build_entity, CheckedProgram, Diagnostic};
use crate::syntax::{format_entity_decl, EntityDecl, RuleAst, TypeTag};

/// A change pulled from the outside world before a tick.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExternalChange {
    EventUpdate { entity: String, event: String, value: Value },
    AttributeUpdate { entity: String, attribute: String, value: Value },
    Deploy(EntityDecl),
    Remove(String),
}

impl ExternalChange {
    pub fn event(entity: &str, event: &str, value: Value) -> Self {
        ExternalChange::EventUpdate { entity: entity.into(), event: event.into(), value }
    }

    pub fn attribute(entity: &str, attribute: &str, value: Value) -> Self {
        ExternalChange::AttributeUpdate { entity: entity.into(), attribute: attribute.into(), value }
    }
}

/// Displays in script syntax.
impl fmt::Display for ExternalChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExternalChange::EventUpdate { entity, event, value } => write!(f, "event {entity}.{event} = {value}"),
            ExternalChange::AttributeUpdate { entity, attribute, value } => {
                write!(f, "attr {entity}.{attribute} = {value}")
            }
            ExternalChange::Deploy(decl) => write!(f, "deploy {}", format_entity_decl(decl)),
            ExternalChange::Remove(entity) => write!(f, "remove {entity}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChangeError {
    #[error("UnknownEntity: no entity `{0}`")]
    UnknownEntity(String),
    #[error("UnknownMember: `{entity}` has no {kind} `{member}`")]
    UnknownMember { entity: String, kind: &'static str, member: String },
    #[error("TypeMismatch: `{entity}.{member}` has type {expected}, got `{found}`")]
    TypeMismatch { entity: String, member: String, expected: TypeTag, found: Value },
    #[error("ImplicitEventWrite: `{entity}.{event}` is produced by an action and cannot be written from outside")]
    ImplicitEventWrite { entity: String, event: String },
    #[error("DuplicateEntity: entity `{0}` already exists")]
    DuplicateEntity(String),
    #[error("cannot deploy `{entity}`: {}", join_diagnostics(.diagnostics))]
    InvalidDeploy { entity: String, diagnostics: Vec<Diagnostic> },
}

fn join_diagnostics(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| format!("{}: {}", d.code, d.message)).collect::<Vec<_>>().join("; ")
}

/// Applies removals, then deployments, then writes. Every invalid change is
/// reported; any error leaves `s` untouched.
pub fn apply_external(changes: &[ExternalChange], s: &Store, env: &EnvInterface) -> Result<Store, Vec<ChangeError>> {
    let mut next = s.clone();
    let mut errors = Vec::new();
    for change in changes {
        if let ExternalChange::Remove(id) = change {
            if next.remove(id).is_none() {
                errors.push(ChangeError::UnknownEntity(id.clone()));
            }
        }
    }
    for change in changes {
        if let ExternalChange::Deploy(decl) = change {
            if next.contains(decl.name.as_str()) {
                errors.push(ChangeError::DuplicateEntity(decl.name.name.clone()));
                continue;
            }
            match build_entity(decl, env) {
                Ok((entity, _)) => {
                    next.insert(decl.name.name.clone(), entity);
                }
                Err(diagnostics) => {
                    errors.push(ChangeError::InvalidDeploy { entity: decl.name.name.clone(), diagnostics })
                }
            }
        }
    }
    for change in changes {
        if let Err(e) = apply_write(change, &mut next, env) {
            errors.push(e);
        }
    }
    if errors.is_empty() {
        Ok(next)
    } else {
        Err(errors)
    }
}

fn apply_write(change: &ExternalChange, s: &mut Store, env: &EnvInterface) -> Result<(), ChangeError> {
    let (id, member, value, is_event) = match change {
        ExternalChange::EventUpdate { entity, event, value } => (entity, event, *value, true),
        ExternalChange::AttributeUpdate { entity, attribute, value } => (entity, attribute, *value, false),
        ExternalChange::Deploy(_) | ExternalChange::Remove(_) => return Ok(()),
    };
    let entity = s.get(id).ok_or_else(|| ChangeError::UnknownEntity(id.clone()))?;
    let iface = env.get(&entity.interface).ok_or_else(|| ChangeError::UnknownEntity(id.clone()))?;
    let declared = if is_event {
        if iface.is_implicit_event(member) {
            return Err(ChangeError::ImplicitEventWrite { entity: id.clone(), event: member.clone() });
        }
        iface.events.get(member).copied()
    } else {
        iface.attribute_type(member)
    };
    let kind = if is_event { "event" } else { "attribute" };
    let expected =
        declared.ok_or_else(|| ChangeError::UnknownMember { entity: id.clone(), kind, member: member.clone() })?;
    // a sensor may drop out, an attribute may not
    let fits = if value.is_undef() { is_event } else { value.fits(expected) };
    if !fits {
        return Err(ChangeError::TypeMismatch { entity: id.clone(), member: member.clone(), expected, found: value });
    }
    let written = if is_event { s.set_event(member, id, value) } else { s.set_attribute(member, id, value) };
    written.map_err(|e| ChangeError::UnknownEntity(e.0))
}

/// Resets every defined implicit event of `sigma_prime`, then layers the
/// rule effects on top; effect values always win.
pub fn apply_internal(env: &EnvInterface, effects: &Store, sigma_prime: &Store) -> Store {
    let mut next = sigma_prime.clone();
    for (id, entity) in sigma_prime {
        let Some(iface) = env.get(&entity.interface) else { continue };
        let target = next.get_mut(id).expect("same keys");
        for (key, value) in &entity.events {
            if iface.is_implicit_event(key) && !value.is_undef() {
                target.events.insert(key.clone(), Value::Undef);
            }
        }
    }
    for (id, partial) in effects {
        let target = match next.get_mut(id) {
            Some(target) => target,
            None => {
                next.insert(id.clone(), partial.clone());
                continue;
            }
        };
        target.attributes.extend(partial.attributes.iter().map(|(k, v)| (k.clone(), *v)));
        target.events.extend(partial.events.iter().map(|(k, v)| (k.clone(), *v)));
    }
    next
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepConfig {
    pub mode: TriggerMode,
    /// Abort on interfering rules; otherwise record the conflict and drop
    /// the tick's effects.
    pub strict_conflicts: bool,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self { mode: TriggerMode::Edge, strict_conflicts: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunState {
    pub previous: Store,
    pub current: Store,
    pub tick: u64,
}

impl RunState {
    /// The state before the first tick, which has no preceding store.
    pub fn new(initial: Store) -> Self {
        Self { previous: Store::new(), current: initial, tick: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TickRecord {
    pub tick: u64,
    pub changes: Vec<ExternalChange>,
    pub fired: Vec<FiredRule>,
    /// The store after the tick.
    pub snapshot: Store,
    /// Set only by non-strict runs whose rules interfered.
    pub conflict: Option<ConflictError>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StepErrorKind {
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Changes(Vec<ChangeError>),
    #[error(transparent)]
    Rules(#[from] RuleError),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("tick {tick}: {kind}")]
pub struct StepError {
    pub tick: u64,
    pub kind: StepErrorKind,
}

impl StepError {
    pub fn conflict(&self) -> Option<&ConflictError> {
        match &self.kind {
            StepErrorKind::Rules(RuleError::Conflict(c)) => Some(c),
            _ => None,
        }
    }
}

/// One tick. On error the state is returned untouched inside the caller's
/// ownership: `step` only reads it.
pub fn step(
    state: &RunState,
    changes: Vec<ExternalChange>,
    rules: &[RuleAst],
    env: &EnvInterface,
    config: StepConfig,
) -> Result<(RunState, TickRecord), StepError> {
    let tick = state.tick;
    let fail = |kind| StepError { tick, kind };
    let sigma_prime = apply_external(&changes, &state.current, env).map_err(|e| fail(StepErrorKind::Changes(e)))?;
    let dual = crate::domains::DualStore::new(&state.previous, &sigma_prime);
    let (effects, fired, conflict) = match eval_rule_block(rules, dual, config.mode) {
        Ok((effects, fired)) => (effects, fired, None),
        Err(RuleError::Conflict(c)) if !config.strict_conflicts => (Store::new(), Vec::new(), Some(c)),
        Err(e) => return Err(fail(e.into())),
    };
    let next = apply_internal(env, &effects, &sigma_prime);
    let record = TickRecord { tick, changes, fired, snapshot: next.clone(), conflict };
    Ok((RunState { previous: sigma_prime, current: next, tick: tick + 1 }, record))
}

/// A program in execution.
#[derive(Clone, Debug)]
pub struct Runtime {
    env: EnvInterface,
    rules: Vec<RuleAst>,
    config: StepConfig,
    state: RunState,
}

impl Runtime {
    pub fn new(program: &CheckedProgram, config: StepConfig) -> Self {
        Self {
            env: program.env.clone(),
            rules: program.rules.clone(),
            config,
            state: RunState::new(program.initial.clone()),
        }
    }

    pub fn state(&self) -> &RunState {
        &self.state
    }

    pub fn env(&self) -> &EnvInterface {
        &self.env
    }

    /// Runs one tick; a failed tick leaves the state as it was.
    pub fn step(&mut self, changes: Vec<ExternalChange>) -> Result<TickRecord, StepError> {
        let (state, record) = step(&self.state, changes, &self.rules, &self.env, self.config)?;
        self.state = state;
        Ok(record)
    }
}

/// Runs one tick per script entry, stopping after `max_ticks` ticks.
pub fn run_trace(
    program: &CheckedProgram,
    script: &[Vec<ExternalChange>],
    max_ticks: Option<usize>,
    config: StepConfig,
) -> Result<Vec<TickRecord>, StepError> {
    let mut runtime = Runtime::new(program, config);
    let limit = max_ticks.unwrap_or(script.len());
    script.iter().take(limit).map(|changes| runtime.step(changes.clone())).collect()
}
