use std::cell::Cell;
use std::fmt;

use crate::syntax::{Literal, LiteralKind, TypeTag};

/// A runtime value: a natural number, a truth value, or undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Nat(u64),
    Tr(bool),
    #[default]
    Undef,
}

impl Value {
    pub fn is_undef(self) -> bool {
        matches!(self, Value::Undef)
    }

    pub fn type_tag(self) -> Option<TypeTag> {
        match self {
            Value::Nat(_) => Some(TypeTag::Nat),
            Value::Tr(_) => Some(TypeTag::Bool),
            Value::Undef => None,
        }
    }

    /// Whether the value may be stored in a slot of type `ty` (Undef fits any).
    pub fn fits(self, ty: TypeTag) -> bool {
        self.type_tag().is_none_or(|t| t == ty)
    }
}

impl From<Literal> for Value {
    fn from(lit: Literal) -> Self {
        match lit.kind {
            LiteralKind::Nat(n) => Value::Nat(n),
            LiteralKind::Bool(b) => Value::Tr(b),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Tr(b) => write!(f, "{b}"),
            Value::Undef => f.write_str("undef"),
        }
    }
}

thread_local! {
    static CROSS_TYPE_COMPARISONS: Cell<u64> = const { Cell::new(0) };
}

/// Number of `Nat` against `Tr` comparisons made by [`value_eq`] on the
/// current thread. A statically checked program never makes one.
pub fn cross_type_comparisons() -> u64 {
    CROSS_TYPE_COMPARISONS.with(Cell::get)
}

pub fn reset_cross_type_comparisons() {
    CROSS_TYPE_COMPARISONS.with(|c| c.set(0));
}

/// Equality used by `value = X` tests and filters: false as soon as either
/// side is undefined, and false across types.
pub fn value_eq(a: Value, b: Value) -> bool {
    match (a, b) {
        (Value::Nat(x), Value::Nat(y)) => x == y,
        (Value::Tr(x), Value::Tr(y)) => x == y,
        (Value::Undef, _) | (_, Value::Undef) => false,
        _ => {
            CROSS_TYPE_COMPARISONS.with(|c| c.set(c.get() + 1));
            false
        }
    }
}

/// Raw inequality used by `value changed`; `Undef` is one ordinary value.
pub fn value_neq(a: Value, b: Value) -> bool {
    a != b
}
