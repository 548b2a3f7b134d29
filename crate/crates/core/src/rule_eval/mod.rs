//! Evaluation of the orchestration layer: one rule block against a dual
//! store, giving the joined partial store of every rule's effects.
//!
//! Event expressions become a variable environment plus a deferred
//! predicate, action expressions a deferred effect. Both wait for a fully
//! instantiated environment; a rule then instantiates its variables over
//! the current store and joins the effects of the instantiations whose
//! condition holds.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::domains::{
    and_rho, constant_bool, instantiate, or_rho, value_eq, value_neq, BoolFn, ConflictError, DualStore, EnvEntity,
    Reference, Store, Value,
};
use crate::syntax::{
    ActionCall, ActionExpr, BoolTestAst, DeclAst, EventAtom, EventExpr, ExprAst, FilterAst, RuleAst, SourceSpan,
};

/// How a `value = X` test reads the dual store.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TriggerMode {
    /// True only when the event becomes equal to `X`: unequal in the
    /// previous store, equal in the current one.
    #[default]
    Edge,
    /// Each test reads the current store only. A rule instantiation then
    /// fires when its whole condition holds now but did not hold when the
    /// current store is replaced by the previous one, so a condition that
    /// stays true fires once.
    Level,
}

impl TriggerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TriggerMode::Edge => "edge",
            TriggerMode::Level => "level",
        }
    }
}

impl fmt::Display for TriggerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TriggerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge" => Ok(TriggerMode::Edge),
            "level" => Ok(TriggerMode::Level),
            other => Err(format!("unknown trigger mode `{other}` (expected `edge` or `level`)")),
        }
    }
}

/// One instantiation of a rule whose condition held and whose actions
/// wrote something.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiredRule {
    pub rule: u32,
    pub binding: BTreeMap<String, String>,
    pub effects: Store,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error(transparent)]
    Conflict(#[from] ConflictError),
    #[error("rule {rule} uses `all ... groupby` at {span}, which cannot be evaluated")]
    UnsupportedConstruct { rule: u32, span: SourceSpan },
}

/// A deferred effect: the partial store an action expression writes under
/// an instantiated environment.
pub type PendingAction<'a> = Arc<dyn Fn(&EnvEntity) -> Result<Store, ConflictError> + Send + Sync + 'a>;

fn no_effect<'a>() -> PendingAction<'a> {
    Arc::new(|_| Ok(Store::new()))
}

/// Evaluates every rule against the same dual store and joins the results
/// in rule order.
pub fn eval_rule_block(
    rules: &[RuleAst],
    dual: DualStore<'_>,
    mode: TriggerMode,
) -> Result<(Store, Vec<FiredRule>), RuleError> {
    let mut effects = Store::new();
    let mut fired = Vec::new();
    for (position, rule) in rules.iter().enumerate() {
        let (partial, mut firings) = eval_rule(rule, rule.number(position), dual, mode)?;
        effects = effects.join(&partial)?;
        fired.append(&mut firings);
    }
    Ok((effects, fired))
}

/// Evaluates one rule, recording its firings under `number`.
pub fn eval_rule(
    rule: &RuleAst,
    number: u32,
    dual: DualStore<'_>,
    mode: TriggerMode,
) -> Result<(Store, Vec<FiredRule>), RuleError> {
    if let Some(span) = find_aggregate(&rule.condition) {
        return Err(RuleError::UnsupportedConstruct { rule: number, span });
    }
    let (rho_e, b) = eval_event_expr(&rule.condition, dual, EnvEntity::new(), constant_bool(true), mode);
    let held_before = match mode {
        TriggerMode::Edge => None,
        TriggerMode::Level => {
            let frozen = DualStore::new(dual.previous, dual.previous);
            Some(eval_event_expr(&rule.condition, frozen, EnvEntity::new(), constant_bool(true), mode).1)
        }
    };
    let (rho_a, a) = eval_action_expr(&rule.body, dual.current, rho_e, no_effect());

    let mut partials = Vec::new();
    let mut fired = Vec::new();
    for rho in instantiate(dual.current, &rho_a) {
        if !b(&rho) || held_before.as_ref().is_some_and(|before| before(&rho)) {
            continue;
        }
        let effects = a(&rho)?;
        if !effects.is_empty() {
            fired.push(FiredRule { rule: number, binding: rho.instances(), effects: effects.clone() });
            partials.push(effects);
        }
    }
    Ok((Store::join_all(&partials)?, fired))
}

fn find_aggregate(w: &EventExpr) -> Option<SourceSpan> {
    match w {
        EventExpr::And(l, r) | EventExpr::Or(l, r) => find_aggregate(l).or_else(|| find_aggregate(r)),
        EventExpr::Atom(_) => None,
        EventExpr::Aggregate { span, .. } => Some(*span),
    }
}

/// Threads the environment through the event expression and builds its
/// predicate on top of `b`. Aggregates give a constantly false predicate;
/// [`eval_rule`] rejects them beforehand.
pub fn eval_event_expr<'a>(
    w: &'a EventExpr,
    dual: DualStore<'a>,
    rho: EnvEntity,
    b: BoolFn<'a>,
    mode: TriggerMode,
) -> (EnvEntity, BoolFn<'a>) {
    match w {
        EventExpr::And(l, r) => {
            let (rho, b) = eval_event_expr(l, dual, rho, b, mode);
            eval_event_expr(r, dual, rho, b, mode)
        }
        EventExpr::Or(l, r) => {
            let (rho, b1) = eval_event_expr(l, dual, rho, b.clone(), mode);
            let (rho, b2) = eval_event_expr(r, dual, rho, b, mode);
            (rho, or_rho(b1, b2))
        }
        EventExpr::Atom(atom) => eval_event_atom(atom, dual, rho, b, mode),
        EventExpr::Aggregate { .. } => (rho, constant_bool(false)),
    }
}

fn eval_event_atom<'a>(
    atom: &'a EventAtom,
    dual: DualStore<'a>,
    rho: EnvEntity,
    b: BoolFn<'a>,
    mode: TriggerMode,
) -> (EnvEntity, BoolFn<'a>) {
    let (var, rho) = eval_declaration(&atom.decl, rho, dual.current);
    let event = atom.event.as_str();
    let predicate: BoolFn<'a> = Arc::new(move |inst: &EnvEntity| {
        let Some(id) = inst.instance(var) else { return false };
        let filter = eval_filter(atom.filter.as_ref(), id, dual.previous);
        let test = eval_bool_test(&atom.test, id, event, dual, mode);
        and_rho(filter, and_rho(test, b.clone()))(inst)
    });
    (rho, predicate)
}

/// Declares or looks up the variable of a declaration. A bare name keeps
/// an existing binding, else binds an entity of `current` to itself, else
/// leaves the environment alone so that later lookups fail.
pub fn eval_declaration<'d>(d: &'d DeclAst, rho: EnvEntity, current: &Store) -> (&'d str, EnvEntity) {
    match d {
        DeclAst::Typed { var, interface } => {
            (var.as_str(), rho.bind(var.as_str(), Reference::Interface(interface.name.clone())))
        }
        DeclAst::Bare(name) => {
            let name = name.as_str();
            if rho.contains(name) || !current.contains(name) {
                (name, rho)
            } else {
                (name, rho.bind(name, Reference::Instance(name.to_string())))
            }
        }
    }
}

/// The test of an atom on event `event` of entity `id`.
pub fn eval_bool_test<'a>(
    t: &'a BoolTestAst,
    id: &str,
    event: &str,
    dual: DualStore<'a>,
    mode: TriggerMode,
) -> BoolFn<'a> {
    let before = dual.previous.access_event(event, id);
    let now = dual.current.access_event(event, id);
    match t {
        BoolTestAst::ValueChanged => constant_bool(value_neq(before, now)),
        BoolTestAst::ValueEq(x) => Arc::new(move |rho: &EnvEntity| {
            let eq_now = value_eq(now, eval_expression(x, dual.current, rho));
            match mode {
                TriggerMode::Level => eq_now,
                TriggerMode::Edge => eq_now && !value_eq(before, eval_expression(x, dual.previous, rho)),
            }
        }),
    }
}

/// An absent filter always holds; `attr = X` compares attribute `attr` of
/// `entity` in `s` with `X` evaluated in `s`.
pub fn eval_filter<'a>(f: Option<&'a FilterAst>, entity: &str, s: &'a Store) -> BoolFn<'a> {
    let Some(f) = f else { return constant_bool(true) };
    let attribute = s.access_attribute(f.attribute.as_str(), entity);
    Arc::new(move |rho: &EnvEntity| value_eq(attribute, eval_expression(&f.rhs, s, rho)))
}

/// Total: anything that does not resolve to an instantiated entity's
/// member is `Undef`.
pub fn eval_expression(x: &ExprAst, s: &Store, rho: &EnvEntity) -> Value {
    match x {
        ExprAst::Num(n, _) => Value::Nat(*n),
        ExprAst::Bool(b, _) => Value::Tr(*b),
        ExprAst::Path { var, member } => {
            let Some(id) = rho.instance(var.as_str()) else { return Value::Undef };
            match s.get(id) {
                Some(entity) if entity.events.contains_key(member.as_str()) => entity.event(member.as_str()),
                Some(entity) => entity.attribute(member.as_str()),
                None => Value::Undef,
            }
        }
    }
}

/// Threads the environment through the action expression and builds its
/// deferred effect on top of `f`.
pub fn eval_action_expr<'a>(
    c: &'a ActionExpr,
    current: &'a Store,
    rho: EnvEntity,
    f: PendingAction<'a>,
) -> (EnvEntity, PendingAction<'a>) {
    match c {
        ActionExpr::Par(l, r) => {
            let (rho, f1) = eval_action_expr(l, current, rho, f.clone());
            let (rho, f2) = eval_action_expr(r, current, rho, f);
            (rho, Arc::new(move |inst: &EnvEntity| f1(inst)?.join(&f2(inst)?)))
        }
        ActionExpr::Seq(l, r) => {
            let (rho, f1) = eval_action_expr(l, current, rho, f);
            eval_action_expr(r, current, rho, f1)
        }
        ActionExpr::Call(call) => eval_action_call(call, current, rho, f),
    }
}

fn eval_action_call<'a>(
    call: &'a ActionCall,
    current: &'a Store,
    rho: EnvEntity,
    f: PendingAction<'a>,
) -> (EnvEntity, PendingAction<'a>) {
    let (var, rho) = eval_declaration(&call.decl, rho, current);
    let effect: PendingAction<'a> = Arc::new(move |inst: &EnvEntity| {
        let seed = f(inst)?;
        let Some(id) = inst.instance(var) else { return Ok(seed) };
        if !eval_filter(call.filter.as_ref(), id, current)(inst) {
            return Ok(seed);
        }
        let value = eval_expression(&call.arg, current, inst);
        // `id` comes from `current`, so the partial update cannot miss
        Ok(seed.update_event_partial(call.action.as_str(), id, value, current).unwrap_or_else(|_| seed.clone()))
    });
    (rho, effect)
}
