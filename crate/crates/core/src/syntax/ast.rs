//! Abstract syntax of both language layers.
//!
//! Every node carries a [`SourceSpan`]. Spans never take part in equality:
//! two trees that differ only by source positions compare equal, so a tree
//! printed by the formatter and parsed back is `==` to the original.

use std::fmt;

/// Position of a node in the source text (1-based line and column).
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        Self { line: line.max(1), column: column.max(1), length }
    }

    /// Exact positional comparison, as opposed to `==` which ignores spans.
    pub fn same_position(&self, other: &SourceSpan) -> bool {
        self.line == other.line && self.column == other.column && self.length == other.length
    }
}

impl PartialEq for SourceSpan {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line.max(1), self.column.max(1))
    }
}

/// An identifier together with where it was written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), span: SourceSpan::default() }
    }

    pub fn spanned(name: impl Into<String>, span: SourceSpan) -> Self {
        Self { name: name.into(), span }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeTag {
    Nat,
    Bool,
}

impl TypeTag {
    /// Concrete spelling used by the formatter.
    pub fn keyword(self) -> &'static str {
        match self {
            TypeTag::Nat => "Integer",
            TypeTag::Bool => "Boolean",
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A constant in an entity initializer or a script.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiteralKind {
    Nat(u64),
    Bool(bool),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    pub kind: LiteralKind,
    pub span: SourceSpan,
}

impl Literal {
    pub fn nat(n: u64) -> Self {
        Self { kind: LiteralKind::Nat(n), span: SourceSpan::default() }
    }

    pub fn bool(b: bool) -> Self {
        Self { kind: LiteralKind::Bool(b), span: SourceSpan::default() }
    }

    pub fn type_tag(&self) -> TypeTag {
        match self.kind {
            LiteralKind::Nat(_) => TypeTag::Nat,
            LiteralKind::Bool(_) => TypeTag::Bool,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberDecl {
    pub name: Ident,
    pub ty: TypeTag,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub name: Ident,
    pub attributes: Vec<MemberDecl>,
    pub events: Vec<MemberDecl>,
    pub actions: Vec<MemberDecl>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityInit {
    pub attribute: Ident,
    pub value: Literal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityDecl {
    pub name: Ident,
    pub interface: Ident,
    pub inits: Vec<EntityInit>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecAst {
    pub interfaces: Vec<InterfaceDecl>,
    pub entities: Vec<EntityDecl>,
}

/// A whole program: the specification layer followed by the rule block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProgramAst {
    pub spec: SpecAst,
    pub rules: Vec<RuleAst>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleAst {
    /// The `(n)` marker, if written.
    pub label: Option<u32>,
    pub condition: EventExpr,
    pub body: ActionExpr,
    pub span: SourceSpan,
}

impl RuleAst {
    /// Number used in traces: the explicit label, or the 1-based position.
    pub fn number(&self, position: usize) -> u32 {
        self.label.unwrap_or(position as u32 + 1)
    }
}

// atoms stay inline: boxing them would cost an allocation per leaf
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventExpr {
    And(Box<EventExpr>, Box<EventExpr>),
    Or(Box<EventExpr>, Box<EventExpr>),
    Atom(EventAtom),
    /// `all <atom> groupby <attr>`; parsed so the corpus is accepted, never evaluated.
    Aggregate {
        inner: Box<EventExpr>,
        group_by: Ident,
        span: SourceSpan,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventAtom {
    pub event: Ident,
    pub decl: DeclAst,
    pub filter: Option<FilterAst>,
    pub test: BoolTestAst,
    pub span: SourceSpan,
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionExpr {
    /// `c1 || c2`
    Par(Box<ActionExpr>, Box<ActionExpr>),
    /// `c1 , c2`
    Seq(Box<ActionExpr>, Box<ActionExpr>),
    Call(ActionCall),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionCall {
    pub action: Ident,
    pub arg: ExprAst,
    pub decl: DeclAst,
    pub filter: Option<FilterAst>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclAst {
    /// `v : Interface`
    Typed { var: Ident, interface: Ident },
    /// `name`: an entity identifier or an already declared variable.
    Bare(Ident),
}

impl DeclAst {
    pub fn variable(&self) -> &Ident {
        match self {
            DeclAst::Typed { var, .. } => var,
            DeclAst::Bare(name) => name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolTestAst {
    ValueEq(ExprAst),
    ValueChanged,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterAst {
    pub attribute: Ident,
    pub rhs: ExprAst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprAst {
    Num(u64, SourceSpan),
    Bool(bool, SourceSpan),
    Path { var: Ident, member: Ident },
}

impl ExprAst {
    pub fn num(n: u64) -> Self {
        ExprAst::Num(n, SourceSpan::default())
    }

    pub fn bool(b: bool) -> Self {
        ExprAst::Bool(b, SourceSpan::default())
    }

    pub fn path(var: &str, member: &str) -> Self {
        ExprAst::Path { var: Ident::new(var), member: Ident::new(member) }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            ExprAst::Num(_, span) | ExprAst::Bool(_, span) => *span,
            ExprAst::Path { var, .. } => var.span,
        }
    }
}
