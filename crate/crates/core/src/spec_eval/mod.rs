//! Meaning of the specification layer: builds the interface environment and
//! the initial store, type-checking attribute initializers on the way, and
//! statically checks the rule block against them.

mod check;
mod diagnostic;

use std::collections::BTreeMap;

pub use check::check_rules;
pub use diagnostic::{sort_by_position, Diagnostic, DiagnosticCode, Severity};

use crate::domains::{Entity, EnvInterface, Interface, Store, Value};
use crate::syntax::{self, EntityDecl, Ident, InterfaceDecl, Literal, ProgramAst, RuleAst, SpecAst};

/// Result of a type-checked sequence of attribute assignments. Once an
/// assignment fails the accumulator stays `Err` and ignores the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckedAttributes {
    Ok(BTreeMap<String, Value>),
    Err(BTreeMap<String, Value>, Vec<Diagnostic>),
}

impl CheckedAttributes {
    pub fn new() -> Self {
        CheckedAttributes::Ok(BTreeMap::new())
    }

    pub fn is_err(&self) -> bool {
        matches!(self, CheckedAttributes::Err(..))
    }
}

impl Default for CheckedAttributes {
    fn default() -> Self {
        Self::new()
    }
}

/// Assigns literal `lit` to attribute `attr` when the interface declares
/// the attribute with the literal's type.
pub fn check_assignment(attr: &Ident, lit: &Literal, iface: &Interface, acc: CheckedAttributes) -> CheckedAttributes {
    let mut attrs = match acc {
        CheckedAttributes::Ok(attrs) => attrs,
        err @ CheckedAttributes::Err(..) => return err,
    };
    let failure = match iface.attribute_type(attr.as_str()) {
        None => Diagnostic::error(
            DiagnosticCode::UnknownAttribute,
            format!("interface has no attribute `{attr}`"),
            attr.span,
        ),
        Some(_) if attrs.contains_key(attr.as_str()) => Diagnostic::error(
            DiagnosticCode::DuplicateInit,
            format!("attribute `{attr}` is initialized twice"),
            attr.span,
        ),
        Some(expected) if expected == lit.type_tag() => {
            attrs.insert(attr.name.clone(), Value::from(*lit));
            return CheckedAttributes::Ok(attrs);
        }
        Some(expected) => Diagnostic::error(
            DiagnosticCode::TypeMismatch,
            format!(
                "attribute `{attr}` has type {expected}, but `{}` is {}",
                syntax::format_literal(lit),
                lit.type_tag()
            ),
            lit.span,
        ),
    };
    CheckedAttributes::Err(attrs, vec![failure])
}

/// Builds the signature maps of one interface.
pub fn build_interface(decl: &InterfaceDecl) -> (Interface, Vec<Diagnostic>) {
    let mut iface = Interface::default();
    let mut diagnostics = Vec::new();
    let mut seen: BTreeMap<&str, &'static str> = BTreeMap::new();
    let sections = [
        ("attribute", &decl.attributes, &mut iface.attributes),
        ("event", &decl.events, &mut iface.events),
        ("action", &decl.actions, &mut iface.actions),
    ];
    for (kind, members, map) in sections {
        for member in members {
            let name = member.name.as_str();
            match seen.get(name) {
                Some(&other) if other == kind => diagnostics.push(
                    Diagnostic::error(
                        DiagnosticCode::DuplicateMember,
                        format!("{kind} `{name}` is declared twice"),
                        member.name.span,
                    )
                    .in_context(decl.name.as_str()),
                ),
                Some(&other) => diagnostics.push(
                    Diagnostic::error(
                        DiagnosticCode::NameClash,
                        format!("{kind} `{name}` clashes with {other} `{name}`"),
                        member.name.span,
                    )
                    .in_context(decl.name.as_str()),
                ),
                None => {
                    seen.insert(name, kind);
                    map.insert(name.to_string(), member.ty);
                }
            }
        }
    }
    (iface, diagnostics)
}

/// Builds an entity: attributes through [`check_assignment`], every event
/// and implicit action event undefined. Missing initializers default to
/// `Undef` and are reported as warnings.
pub fn build_entity(decl: &EntityDecl, env: &EnvInterface) -> Result<(Entity, Vec<Diagnostic>), Vec<Diagnostic>> {
    let iface_name = decl.interface.as_str();
    let Some(iface) = env.get(iface_name) else {
        return Err(vec![Diagnostic::error(
            DiagnosticCode::UnknownInterface,
            format!("entity `{}` implements unknown interface `{iface_name}`", decl.name),
            decl.interface.span,
        )
        .in_context(decl.name.as_str())]);
    };
    let checked = decl
        .inits
        .iter()
        .fold(CheckedAttributes::new(), |acc, init| check_assignment(&init.attribute, &init.value, iface, acc));
    let mut attributes = match checked {
        CheckedAttributes::Ok(attrs) => attrs,
        CheckedAttributes::Err(_, diagnostics) => {
            return Err(diagnostics.into_iter().map(|d| d.in_context(decl.name.as_str())).collect())
        }
    };
    let mut warnings = Vec::new();
    for name in iface.attributes.keys() {
        if !attributes.contains_key(name) {
            warnings.push(
                Diagnostic::warning(
                    DiagnosticCode::UninitializedAttribute,
                    format!("attribute `{name}` of `{}` is not initialized and starts undefined", decl.name),
                    decl.name.span,
                )
                .in_context(decl.name.as_str()),
            );
            attributes.insert(name.clone(), Value::Undef);
        }
    }
    let events = iface.event_keys().map(|k| (k.clone(), Value::Undef)).collect();
    Ok((Entity { interface: iface_name.to_string(), attributes, events }, warnings))
}

/// The evaluated specification layer.
#[derive(Clone, Debug)]
pub struct Specification {
    pub env: EnvInterface,
    pub initial: Store,
    pub warnings: Vec<Diagnostic>,
}

/// Builds the interface environment, then the initial store against it.
/// All diagnostics are collected; any error fails the whole specification.
pub fn eval_specification(spec: &SpecAst) -> Result<Specification, Vec<Diagnostic>> {
    let mut diagnostics = Vec::new();
    let mut interfaces = BTreeMap::new();
    for decl in &spec.interfaces {
        let (iface, mut issues) = build_interface(decl);
        diagnostics.append(&mut issues);
        if interfaces.contains_key(decl.name.as_str()) {
            diagnostics.push(Diagnostic::error(
                DiagnosticCode::DuplicateInterface,
                format!("interface `{}` is declared twice", decl.name),
                decl.name.span,
            ));
        } else {
            interfaces.insert(decl.name.name.clone(), iface);
        }
    }
    let env = EnvInterface::new(interfaces);

    let mut initial = Store::new();
    for decl in &spec.entities {
        if initial.contains(decl.name.as_str()) {
            diagnostics.push(Diagnostic::error(
                DiagnosticCode::DuplicateEntity,
                format!("entity `{}` is declared twice", decl.name),
                decl.name.span,
            ));
            continue;
        }
        match build_entity(decl, &env) {
            Ok((entity, mut warnings)) => {
                diagnostics.append(&mut warnings);
                initial.insert(decl.name.name.clone(), entity);
            }
            Err(mut errors) => diagnostics.append(&mut errors),
        }
    }

    sort_by_position(&mut diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        Err(diagnostics)
    } else {
        Ok(Specification { env, initial, warnings: diagnostics })
    }
}

/// A parsed program whose specification evaluated cleanly and whose rules
/// passed the static checks.
#[derive(Clone, Debug)]
pub struct CheckedProgram {
    pub env: EnvInterface,
    pub initial: Store,
    pub rules: Vec<RuleAst>,
    pub warnings: Vec<Diagnostic>,
}

/// Evaluates the specification and checks the rules. On failure the list
/// holds every diagnostic, warnings included, in source order.
pub fn check_program(program: &ProgramAst) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let spec = match eval_specification(&program.spec) {
        Ok(spec) => spec,
        Err(mut diagnostics) => {
            // rules are still checked against whatever did evaluate
            let partial = partial_specification(&program.spec);
            diagnostics.extend(check_rules(&partial.0, &partial.1, &program.rules));
            sort_by_position(&mut diagnostics);
            return Err(diagnostics);
        }
    };
    let mut diagnostics = spec.warnings;
    diagnostics.extend(check_rules(&spec.env, &spec.initial, &program.rules));
    sort_by_position(&mut diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(diagnostics);
    }
    Ok(CheckedProgram { env: spec.env, initial: spec.initial, rules: program.rules.clone(), warnings: diagnostics })
}

fn partial_specification(spec: &SpecAst) -> (EnvInterface, Store) {
    let mut interfaces = BTreeMap::new();
    for decl in &spec.interfaces {
        interfaces.entry(decl.name.name.clone()).or_insert_with(|| build_interface(decl).0);
    }
    let env = EnvInterface::new(interfaces);
    let mut store = Store::new();
    for decl in &spec.entities {
        if let (false, Ok((entity, _))) = (store.contains(decl.name.as_str()), build_entity(decl, &env)) {
            store.insert(decl.name.name.clone(), entity);
        }
    }
    (env, store)
}

/// Parses and checks program text in one go.
pub fn compile(text: &str) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let ast =
        syntax::parse_program(text).map_err(|errors| errors.into_iter().map(Diagnostic::from).collect::<Vec<_>>())?;
    check_program(&ast)
}
