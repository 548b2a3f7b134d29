//! Semantic algebras: values, interfaces, entities, stores with join, dual
//! stores, references and entity environments.

mod env;
mod interface;
mod store;
mod value;

pub use env::{and_rho, constant_bool, instantiate, or_rho, BoolFn, EnvEntity, Reference};
pub use interface::{EnvInterface, Interface};
pub use store::{combine_entities, ConflictError, Entity, MemberKind, Store, UnknownEntity};
pub use value::{cross_type_comparisons, reset_cross_type_comparisons, value_eq, value_neq, Value};

/// The stores of two consecutive orchestration steps. Rules only read it.
#[derive(Clone, Copy, Debug)]
pub struct DualStore<'a> {
    pub previous: &'a Store,
    pub current: &'a Store,
}

impl<'a> DualStore<'a> {
    pub fn new(previous: &'a Store, current: &'a Store) -> Self {
        Self { previous, current }
    }
}
