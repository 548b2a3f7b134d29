use std::collections::BTreeMap;

use super::{Diagnostic, DiagnosticCode};
use crate::domains::{EnvInterface, Interface, Store};
use crate::syntax::{ActionExpr, BoolTestAst, DeclAst, EventExpr, ExprAst, FilterAst, Ident, RuleAst, TypeTag};

/// Static checks of a rule block against the interface environment and the
/// initial store. Each rule is its own variable scope.
pub fn check_rules(env: &EnvInterface, store: &Store, rules: &[RuleAst]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (position, rule) in rules.iter().enumerate() {
        let context = format!("rule {}", rule.number(position));
        let mut checker = RuleChecker { env, store, scope: BTreeMap::new(), out: Vec::new() };
        checker.check(rule);
        out.extend(checker.out.into_iter().map(|d| d.in_context(context.clone())));
    }
    out
}

struct RuleChecker<'a> {
    env: &'a EnvInterface,
    store: &'a Store,
    /// Declared variables and the interface each one was declared with.
    scope: BTreeMap<String, String>,
    out: Vec<Diagnostic>,
}

impl<'a> RuleChecker<'a> {
    fn check(&mut self, rule: &RuleAst) {
        // declarations first, so a variable may be used anywhere in its rule
        self.declare_event(&rule.condition);
        self.declare_action(&rule.body);
        self.check_event(&rule.condition);
        self.check_action(&rule.body);
    }

    fn declare(&mut self, decl: &DeclAst) {
        let DeclAst::Typed { var, interface } = decl else { return };
        if !self.env.contains(interface.as_str()) {
            self.error(DiagnosticCode::UnknownInterface, format!("unknown interface `{interface}`"), interface);
            return;
        }
        match self.scope.get(var.as_str()) {
            Some(previous) if previous != interface.as_str() => self.error(
                DiagnosticCode::VariableRedeclared,
                format!("variable `{var}` is already declared as `{previous}`, not `{interface}`"),
                var,
            ),
            Some(_) => {}
            None => {
                self.scope.insert(var.name.clone(), interface.name.clone());
            }
        }
    }

    fn declare_event(&mut self, w: &EventExpr) {
        match w {
            EventExpr::And(l, r) | EventExpr::Or(l, r) => {
                self.declare_event(l);
                self.declare_event(r);
            }
            EventExpr::Atom(atom) => self.declare(&atom.decl),
            EventExpr::Aggregate { inner, .. } => self.declare_event(inner),
        }
    }

    fn declare_action(&mut self, c: &ActionExpr) {
        match c {
            ActionExpr::Par(l, r) | ActionExpr::Seq(l, r) => {
                self.declare_action(l);
                self.declare_action(r);
            }
            ActionExpr::Call(call) => self.declare(&call.decl),
        }
    }

    /// Interface a name denotes in this rule: a variable, else an entity.
    fn lookup(&self, name: &str) -> Option<&'a Interface> {
        let iface = match self.scope.get(name) {
            Some(iface) => iface.as_str(),
            None => self.store.get(name)?.interface.as_str(),
        };
        self.env.get(iface)
    }

    /// Interface behind a declaration. A bare name that is neither a
    /// variable nor an entity only warns: the element is inert at run time.
    fn resolve(&mut self, decl: &DeclAst) -> Option<&'a Interface> {
        match decl {
            DeclAst::Typed { var, .. } => self.lookup(var.as_str()),
            DeclAst::Bare(name) => {
                let found = self.lookup(name.as_str());
                if found.is_none() && !self.scope.contains_key(name.as_str()) {
                    self.out.push(Diagnostic::warning(
                        DiagnosticCode::UnknownEntity,
                        format!("`{name}` is neither a variable of this rule nor an entity; it never matches"),
                        name.span,
                    ));
                }
                found
            }
        }
    }

    fn check_event(&mut self, w: &EventExpr) {
        match w {
            EventExpr::And(l, r) | EventExpr::Or(l, r) => {
                self.check_event(l);
                self.check_event(r);
            }
            EventExpr::Aggregate { span, .. } => self.out.push(Diagnostic::error(
                DiagnosticCode::UnsupportedConstruct,
                "`all ... groupby` aggregation has no defined meaning and cannot be evaluated",
                *span,
            )),
            EventExpr::Atom(atom) => {
                let Some(iface) = self.resolve(&atom.decl) else { return };
                let event_ty = iface.event_type(atom.event.as_str());
                if event_ty.is_none() {
                    self.error(
                        DiagnosticCode::UnknownEvent,
                        format!("`{}` has no event `{}`", atom.decl.variable(), atom.event),
                        &atom.event,
                    );
                }
                if let Some(filter) = &atom.filter {
                    self.check_filter(filter, iface);
                }
                if let (BoolTestAst::ValueEq(expr), Some(expected)) = (&atom.test, event_ty) {
                    self.expect_type(expr, expected, &format!("event `{}`", atom.event));
                } else if let BoolTestAst::ValueEq(expr) = &atom.test {
                    self.expr_type(expr);
                }
            }
        }
    }

    fn check_action(&mut self, c: &ActionExpr) {
        match c {
            ActionExpr::Par(l, r) | ActionExpr::Seq(l, r) => {
                self.check_action(l);
                self.check_action(r);
            }
            ActionExpr::Call(call) => {
                let Some(iface) = self.resolve(&call.decl) else { return };
                if let Some(filter) = &call.filter {
                    self.check_filter(filter, iface);
                }
                match iface.action_type(call.action.as_str()) {
                    Some(expected) => self.expect_type(&call.arg, expected, &format!("action `{}`", call.action)),
                    None => {
                        self.error(
                            DiagnosticCode::UnknownAction,
                            format!("`{}` has no action `{}`", call.decl.variable(), call.action),
                            &call.action,
                        );
                        self.expr_type(&call.arg);
                    }
                }
            }
        }
    }

    fn check_filter(&mut self, filter: &FilterAst, iface: &Interface) {
        match iface.attribute_type(filter.attribute.as_str()) {
            Some(expected) => self.expect_type(&filter.rhs, expected, &format!("attribute `{}`", filter.attribute)),
            None => {
                self.error(
                    DiagnosticCode::UnknownAttribute,
                    format!("no attribute `{}` to filter on", filter.attribute),
                    &filter.attribute,
                );
                self.expr_type(&filter.rhs);
            }
        }
    }

    fn expect_type(&mut self, expr: &ExprAst, expected: TypeTag, what: &str) {
        if let Some(found) = self.expr_type(expr) {
            if found != expected {
                self.out.push(Diagnostic::error(
                    DiagnosticCode::TypeMismatch,
                    format!("{what} has type {expected}, but the expression is {found}"),
                    expr.span(),
                ));
            }
        }
    }

    /// Type of an expression, or `None` once it has been reported.
    fn expr_type(&mut self, expr: &ExprAst) -> Option<TypeTag> {
        match expr {
            ExprAst::Num(..) => Some(TypeTag::Nat),
            ExprAst::Bool(..) => Some(TypeTag::Bool),
            ExprAst::Path { var, member } => {
                let Some(iface) = self.lookup(var.as_str()) else {
                    if !self.scope.contains_key(var.as_str()) {
                        self.error(
                            DiagnosticCode::UnknownVariable,
                            format!("`{var}` is neither a variable of this rule nor an entity"),
                            var,
                        );
                    }
                    return None;
                };
                let ty = iface.member_type(member.as_str());
                if ty.is_none() {
                    self.error(DiagnosticCode::UnknownMember, format!("`{var}` has no member `{member}`"), member);
                }
                ty
            }
        }
    }

    fn error(&mut self, code: DiagnosticCode, message: String, at: &Ident) {
        self.out.push(Diagnostic::error(code, message, at.span));
    }
}

#[cfg(test)]
mod tests {
    use crate::spec_eval::{compile, DiagnosticCode, Severity};

    const SPEC: &str = include_str!("../../corpus/building_spec.ptg");

    fn check(rules: &str) -> Vec<(Severity, DiagnosticCode)> {
        let text = format!("{SPEC}\nrules\n{rules}\nend\n");
        match compile(&text) {
            Ok(program) => program.warnings.iter().map(|d| (d.severity, d.code)).collect(),
            Err(diagnostics) => diagnostics.iter().map(|d| (d.severity, d.code)).collect(),
        }
    }

    fn errors(rules: &str) -> Vec<DiagnosticCode> {
        check(rules).into_iter().filter(|(s, _)| *s == Severity::Error).map(|(_, c)| c).collect()
    }

    #[test]
    fn building_rules_check_clean() {
        let program = compile(include_str!("../../corpus/building.ptg")).unwrap();
        assert_eq!(program.rules.len(), 3);
        assert!(program.warnings.is_empty());
    }

    #[test]
    fn aggregate_is_unsupported() {
        let err = compile(include_str!("../../corpus/building_aggregate.ptg")).unwrap_err();
        let codes: Vec<_> = err.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![DiagnosticCode::UnsupportedConstruct]);
    }

    #[test]
    fn unknown_names() {
        use DiagnosticCode::*;
        assert_eq!(
            errors("when event beep from m:MotionDetector value = true trigger action switch(true) on l:Light end"),
            vec![UnknownEvent]
        );
        assert_eq!(
            errors("when event detected from m:MotionDetector value = true trigger action blink(true) on l:Light end"),
            vec![UnknownAction]
        );
        assert_eq!(
            errors("when event detected from m:Motion value = true trigger action switch(true) on l:Light end"),
            vec![UnknownInterface]
        );
        assert_eq!(
            errors("when event detected from m:MotionDetector with floor = 1 value = true trigger action switch(true) on l:Light end"),
            vec![UnknownAttribute]
        );
        assert_eq!(
            errors("when event detected from m:MotionDetector value = true trigger action switch(true) on l:Light with room = m.floor end"),
            vec![UnknownMember]
        );
        assert_eq!(
            errors("when event detected from m:MotionDetector value = true trigger action switch(true) on l:Light with room = q.room end"),
            vec![UnknownVariable]
        );
    }

    #[test]
    fn type_mismatches() {
        use DiagnosticCode::*;
        assert_eq!(
            errors("when event detected from m:MotionDetector value = 1 trigger action switch(true) on l:Light end"),
            vec![TypeMismatch]
        );
        assert_eq!(
            errors("when event detected from m:MotionDetector value = true trigger action switch(3) on l:Light end"),
            vec![TypeMismatch]
        );
        assert_eq!(
            errors("when event detected from m:MotionDetector with room = true value = true trigger action switch(true) on l:Light end"),
            vec![TypeMismatch]
        );
        assert_eq!(
            errors(
                "when event detected from m:MotionDetector value = true trigger action switch(m.room) on l:Light end"
            ),
            vec![TypeMismatch]
        );
    }

    #[test]
    fn variables_and_entities() {
        use DiagnosticCode::*;
        // later bare use of a declared variable
        assert!(errors(
            "when event temperature from thermo value = 30 and event switch from l:Light value changed \
             trigger action setSpeed(10) on fan10 || action switch(false) on l end"
        )
        .is_empty());
        // same interface twice is fine, a different one is not
        assert!(errors(
            "when event detected from m:MotionDetector value = true and event detected from m:MotionDetector value = false \
             trigger action switch(true) on l:Light end"
        )
        .is_empty());
        // the first declaration wins, so `switch` is also looked up on MotionDetector
        assert_eq!(
            errors("when event detected from m:MotionDetector value = true trigger action switch(true) on m:Light end"),
            vec![UnknownAction, VariableRedeclared]
        );
        // unknown bare name only warns
        assert_eq!(
            check("when event temperature from thermo2 value = 30 trigger action setSpeed(10) on fan10 end"),
            vec![(Severity::Warning, UnknownEntity)]
        );
    }

    #[test]
    fn variable_usable_before_its_declaration() {
        assert!(errors(
            "when event detected from m:MotionDetector with room = l.room value = true trigger action switch(true) on l:Light end"
        )
        .is_empty());
    }
}
