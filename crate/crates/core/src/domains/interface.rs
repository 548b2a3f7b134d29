use std::collections::BTreeMap;
use std::sync::Arc;

use crate::syntax::TypeTag;

/// Typed signatures of one interface.
///
/// Invoking action `a` on an entity writes its argument to the entity's
/// implicit event `a`; that updater is the same for every action, so only
/// the parameter type is kept here.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interface {
    pub attributes: BTreeMap<String, TypeTag>,
    pub events: BTreeMap<String, TypeTag>,
    pub actions: BTreeMap<String, TypeTag>,
}

impl Interface {
    pub fn attribute_type(&self, name: &str) -> Option<TypeTag> {
        self.attributes.get(name).copied()
    }

    /// Type of an event readable on entities of this interface: a sensed
    /// event or the implicit event of an action.
    pub fn event_type(&self, name: &str) -> Option<TypeTag> {
        self.events.get(name).or_else(|| self.actions.get(name)).copied()
    }

    pub fn action_type(&self, name: &str) -> Option<TypeTag> {
        self.actions.get(name).copied()
    }

    pub fn is_implicit_event(&self, name: &str) -> bool {
        self.actions.contains_key(name)
    }

    /// Type of any member, events first.
    pub fn member_type(&self, name: &str) -> Option<TypeTag> {
        self.event_type(name).or_else(|| self.attribute_type(name))
    }

    /// Keys of the event map of an entity of this interface.
    pub fn event_keys(&self) -> impl Iterator<Item = &String> {
        self.events.keys().chain(self.actions.keys())
    }
}

/// The interface environment. Built once from the specification and never
/// mutated; clones share the same allocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnvInterface {
    interfaces: Arc<BTreeMap<String, Interface>>,
}

impl EnvInterface {
    pub fn new(interfaces: BTreeMap<String, Interface>) -> Self {
        Self { interfaces: Arc::new(interfaces) }
    }

    pub fn get(&self, name: &str) -> Option<&Interface> {
        self.interfaces.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.interfaces.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Interface)> {
        self.interfaces.iter()
    }

    pub fn len(&self) -> usize {
        self.interfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interfaces.is_empty()
    }

    /// True when both handles refer to the very same environment.
    pub fn same_instance(&self, other: &EnvInterface) -> bool {
        Arc::ptr_eq(&self.interfaces, &other.interfaces)
    }
}
