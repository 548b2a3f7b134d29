//! Lexing, parsing and printing of programs.

mod ast;
mod format;
mod lexer;
mod parser;

use std::fmt;

pub use ast::*;
pub use format::{format_entity_decl, format_expr, format_literal, format_program};
pub use lexer::is_keyword;
pub use parser::{parse_entity_decl, parse_program};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnterminatedBlock,
    MalformedLiteral,
}

impl ParseErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::UnexpectedToken => "UnexpectedToken",
            ParseErrorKind::UnterminatedBlock => "UnterminatedBlock",
            ParseErrorKind::MalformedLiteral => "MalformedLiteral",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}: {message}", kind.code())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, message: impl Into<String>, span: SourceSpan) -> Self {
        Self { kind, message: message.into(), span }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUILDING: &str = include_str!("../../corpus/building_aggregate.ptg");

    fn atom(expr: &EventExpr) -> &EventAtom {
        match expr {
            EventExpr::Atom(atom) => atom,
            other => panic!("expected an atom, got {other:?}"),
        }
    }

    #[test]
    fn parses_the_building_corpus() {
        let program = parse_program(BUILDING).unwrap();
        assert_eq!(program.spec.interfaces.len(), 4);
        assert_eq!(program.spec.entities.len(), 8);
        assert_eq!(program.rules.len(), 3);

        let light = &program.spec.interfaces[1];
        assert_eq!(light.name.as_str(), "Light");
        assert_eq!(light.attributes[0].ty, TypeTag::Nat);
        assert_eq!(light.actions[0].name.as_str(), "switch");
        assert_eq!(light.actions[0].ty, TypeTag::Bool);
        assert!(program.spec.interfaces[3].attributes.is_empty());

        let labels: Vec<_> = program.rules.iter().map(|r| r.label).collect();
        assert_eq!(labels, vec![Some(1), Some(2), Some(3)]);
        assert!(matches!(program.rules[1].condition, EventExpr::Aggregate { .. }));

        let EventExpr::And(lhs, rhs) = &program.rules[2].condition else {
            panic!("rule 3 should be a conjunction");
        };
        assert_eq!(atom(lhs).event.as_str(), "switch");
        assert_eq!(atom(rhs).decl, DeclAst::Bare(Ident::new("thermo")));
        assert_eq!(atom(rhs).test, BoolTestAst::ValueEq(ExprAst::num(30)));
    }

    #[test]
    fn entity_with_keyword() {
        let program = parse_program("entity l10:Light { room : 101 }").unwrap();
        let decl = &program.spec.entities[0];
        assert_eq!(decl.name.as_str(), "l10");
        assert_eq!(decl.interface.as_str(), "Light");
        assert_eq!(decl.inits.len(), 1);
        assert_eq!(decl.inits[0].attribute.as_str(), "room");
        assert_eq!(decl.inits[0].value.kind, LiteralKind::Nat(101));
        assert!(program.rules.is_empty());
    }

    #[test]
    fn init_separator_accepts_colon_and_equals() {
        let a = parse_entity_decl("l10 : Light { room : 101 }").unwrap();
        let b = parse_entity_decl("l10 : Light { room = 101 }").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_rule_block() {
        let program = parse_program("rules end").unwrap();
        assert_eq!(program, ProgramAst::default());
        assert_eq!(format_program(&program), "rules\nend\n");
    }

    #[test]
    fn and_binds_tighter_than_or_and_both_associate_left() {
        let text = "rules when event a from x value changed or event b from x value changed \
                    and event c from x value changed or event d from x value changed \
                    trigger action z(1) on x end end";
        let program = parse_program(text).unwrap();
        let EventExpr::Or(lhs, d) = &program.rules[0].condition else { panic!() };
        assert_eq!(atom(d).event.as_str(), "d");
        let EventExpr::Or(a, bc) = lhs.as_ref() else { panic!() };
        assert_eq!(atom(a).event.as_str(), "a");
        assert!(matches!(bc.as_ref(), EventExpr::And(..)));
    }

    #[test]
    fn comma_binds_tighter_than_parallel_bar() {
        let text = "rules when event a from x value changed trigger \
                    action p(1) on x, action q(2) on x || action r(3) on x, action s(4) on x end end";
        let program = parse_program(text).unwrap();
        let ActionExpr::Par(lhs, rhs) = &program.rules[0].body else { panic!() };
        assert!(matches!(lhs.as_ref(), ActionExpr::Seq(..)));
        assert!(matches!(rhs.as_ref(), ActionExpr::Seq(..)));
    }

    #[test]
    fn format_round_trips_the_corpus() {
        let program = parse_program(BUILDING).unwrap();
        let printed = format_program(&program);
        assert_eq!(parse_program(&printed).unwrap(), program);
        // and the canonical form is a fixpoint
        assert_eq!(format_program(&parse_program(&printed).unwrap()), printed);
    }

    #[test]
    fn grouping_parentheses_survive_round_trip() {
        let text = "rules when event a from x value changed and (event b from x value changed \
                    or event c from x value changed) trigger action p(1) on x || \
                    (action q(1) on x || action r(1) on x) end end";
        let program = parse_program(text).unwrap();
        assert_eq!(parse_program(&format_program(&program)).unwrap(), program);
    }

    #[test]
    fn errors_carry_spans_and_recovery_finds_several() {
        let text = "interface A { attribute x : Real }\n\
                    interface B { event e Boolean }\n\
                    a1 : A { x : 1 }\n";
        let errors = parse_program(text).unwrap_err();
        assert_eq!(errors.len(), 2);
        assert_eq!(errors[0].span.line, 1);
        assert_eq!(errors[1].span.line, 2);
    }

    #[test]
    fn unterminated_blocks() {
        let errors = parse_program("interface A { attribute x : Integer").unwrap_err();
        assert_eq!(errors[0].kind, ParseErrorKind::UnterminatedBlock);
        let errors = parse_program("rules when event a from x value changed trigger action p(1) on x end").unwrap_err();
        assert_eq!(errors[0].kind, ParseErrorKind::UnterminatedBlock);
    }

    #[test]
    fn malformed_literal_in_initializer() {
        let errors = parse_program("l10 : Light { room : 1x }").unwrap_err();
        assert!(errors.iter().any(|e| e.kind == ParseErrorKind::MalformedLiteral));
    }

    #[test]
    fn trailing_input_after_rules_is_rejected() {
        assert!(parse_program("rules end interface").is_err());
    }

    #[test]
    fn unlabeled_rules_are_numbered_by_position() {
        let text = "rules when event a from x value changed trigger action p(1) on x end \
                    when event a from x value changed trigger action p(1) on x end end";
        let program = parse_program(text).unwrap();
        assert_eq!(program.rules[1].number(1), 2);
    }
}
