use std::fmt::Write;

use super::ast::*;

/// Prints a program in canonical concrete syntax. Parsing the output yields
/// a tree equal to `program`.
pub fn format_program(program: &ProgramAst) -> String {
    let mut out = String::new();
    for iface in &program.spec.interfaces {
        format_interface(&mut out, iface);
    }
    if !program.spec.interfaces.is_empty() && !program.spec.entities.is_empty() {
        out.push('\n');
    }
    for entity in &program.spec.entities {
        out.push_str(&format_entity_decl(entity));
        out.push('\n');
    }
    if !program.spec.interfaces.is_empty() || !program.spec.entities.is_empty() {
        out.push('\n');
    }
    out.push_str("rules\n");
    for rule in &program.rules {
        format_rule(&mut out, rule);
    }
    out.push_str("end\n");
    out
}

fn format_interface(out: &mut String, iface: &InterfaceDecl) {
    let _ = writeln!(out, "interface {} {{", iface.name);
    for m in &iface.attributes {
        let _ = writeln!(out, "  attribute {} : {}", m.name, m.ty);
    }
    for m in &iface.events {
        let _ = writeln!(out, "  event {} : {}", m.name, m.ty);
    }
    for m in &iface.actions {
        let _ = writeln!(out, "  action {}({})", m.name, m.ty);
    }
    out.push_str("}\n");
}

pub fn format_entity_decl(entity: &EntityDecl) -> String {
    let mut out = format!("{} : {} {{", entity.name, entity.interface);
    let inits: Vec<String> =
        entity.inits.iter().map(|init| format!("{} : {}", init.attribute, format_literal(&init.value))).collect();
    if inits.is_empty() {
        out.push('}');
    } else {
        let _ = write!(out, " {} }}", inits.join(", "));
    }
    out
}

pub fn format_literal(lit: &Literal) -> String {
    match lit.kind {
        LiteralKind::Nat(n) => n.to_string(),
        LiteralKind::Bool(b) => b.to_string(),
    }
}

fn format_rule(out: &mut String, rule: &RuleAst) {
    if let Some(label) = rule.label {
        let _ = write!(out, "({label}) ");
    }
    out.push_str("when\n    ");
    format_event(out, &rule.condition, 0);
    out.push_str("\n  trigger\n    ");
    format_action(out, &rule.body, 0);
    out.push_str("\n  end\n");
}

const OR: u8 = 1;
const AND: u8 = 2;
const PRIMARY: u8 = 3;

fn format_event(out: &mut String, expr: &EventExpr, required: u8) {
    let own = match expr {
        EventExpr::Or(..) => OR,
        EventExpr::And(..) => AND,
        EventExpr::Atom(_) | EventExpr::Aggregate { .. } => PRIMARY,
    };
    let paren = own < required;
    if paren {
        out.push('(');
    }
    match expr {
        EventExpr::Or(lhs, rhs) => {
            format_event(out, lhs, OR);
            out.push_str("\n    or ");
            format_event(out, rhs, AND);
        }
        EventExpr::And(lhs, rhs) => {
            format_event(out, lhs, AND);
            out.push_str("\n    and ");
            format_event(out, rhs, PRIMARY);
        }
        EventExpr::Atom(atom) => {
            let _ = write!(out, "event {} from {}", atom.event, format_decl(&atom.decl));
            if let Some(filter) = &atom.filter {
                let _ = write!(out, " with {}", format_filter(filter));
            }
            match &atom.test {
                BoolTestAst::ValueChanged => out.push_str(" value changed"),
                BoolTestAst::ValueEq(x) => {
                    let _ = write!(out, " value = {}", format_expr(x));
                }
            }
        }
        EventExpr::Aggregate { inner, group_by, .. } => {
            out.push_str("all ");
            format_event(out, inner, PRIMARY);
            let _ = write!(out, " groupby {group_by}");
        }
    }
    if paren {
        out.push(')');
    }
}

const PAR: u8 = 1;
const SEQ: u8 = 2;

fn format_action(out: &mut String, expr: &ActionExpr, required: u8) {
    let own = match expr {
        ActionExpr::Par(..) => PAR,
        ActionExpr::Seq(..) => SEQ,
        ActionExpr::Call(_) => PRIMARY,
    };
    let paren = own < required;
    if paren {
        out.push('(');
    }
    match expr {
        ActionExpr::Par(lhs, rhs) => {
            format_action(out, lhs, PAR);
            out.push_str("\n    || ");
            format_action(out, rhs, SEQ);
        }
        ActionExpr::Seq(lhs, rhs) => {
            format_action(out, lhs, SEQ);
            out.push_str(",\n    ");
            format_action(out, rhs, PRIMARY);
        }
        ActionExpr::Call(call) => {
            let _ = write!(out, "action {}({}) on {}", call.action, format_expr(&call.arg), format_decl(&call.decl));
            if let Some(filter) = &call.filter {
                let _ = write!(out, " with {}", format_filter(filter));
            }
        }
    }
    if paren {
        out.push(')');
    }
}

fn format_decl(decl: &DeclAst) -> String {
    match decl {
        DeclAst::Typed { var, interface } => format!("{var}:{interface}"),
        DeclAst::Bare(name) => name.to_string(),
    }
}

fn format_filter(filter: &FilterAst) -> String {
    format!("{} = {}", filter.attribute, format_expr(&filter.rhs))
}

pub fn format_expr(expr: &ExprAst) -> String {
    match expr {
        ExprAst::Num(n, _) => n.to_string(),
        ExprAst::Bool(b, _) => b.to_string(),
        ExprAst::Path { var, member } => format!("{var}.{member}"),
    }
}
