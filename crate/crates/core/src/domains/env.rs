use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::Store;

/// What an entity variable denotes inside a rule: still an interface, or a
/// concrete entity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reference {
    Interface(String),
    Instance(String),
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Interface(i) => write!(f, "Interface {i}"),
            Reference::Instance(i) => write!(f, "Instance {i}"),
        }
    }
}

/// Entity environment of a rule: variable name to reference.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnvEntity {
    bindings: BTreeMap<String, Reference>,
}

impl EnvEntity {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &str) -> Option<&Reference> {
        self.bindings.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.bindings.contains_key(var)
    }

    /// Functional update.
    pub fn update(&self, var: &str, reference: Reference) -> EnvEntity {
        let mut next = self.clone();
        next.bindings.insert(var.to_string(), reference);
        next
    }

    pub fn bind(mut self, var: &str, reference: Reference) -> Self {
        self.bindings.insert(var.to_string(), reference);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Reference)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// The entity a variable is instantiated to, if any.
    pub fn instance(&self, var: &str) -> Option<&str> {
        match self.bindings.get(var) {
            Some(Reference::Instance(id)) => Some(id),
            _ => None,
        }
    }

    /// Variable to entity map of an instantiated environment.
    pub fn instances(&self) -> BTreeMap<String, String> {
        self.bindings
            .iter()
            .filter_map(|(var, r)| match r {
                Reference::Instance(id) => Some((var.clone(), id.clone())),
                Reference::Interface(_) => None,
            })
            .collect()
    }
}

impl FromIterator<(String, Reference)> for EnvEntity {
    fn from_iter<T: IntoIterator<Item = (String, Reference)>>(iter: T) -> Self {
        Self { bindings: iter.into_iter().collect() }
    }
}

/// All environments obtained by replacing each interface-bound variable with
/// every entity of the store implementing that interface. Instance bindings
/// pass through. The result is the cross product over interface variables,
/// in lexicographic order of variables and entity identifiers; it is empty
/// as soon as one interface has no implementor.
pub fn instantiate(store: &Store, rho: &EnvEntity) -> Vec<EnvEntity> {
    let mut out = vec![EnvEntity::new()];
    for (var, reference) in rho.iter() {
        match reference {
            Reference::Instance(_) => {
                for env in &mut out {
                    env.bindings.insert(var.clone(), reference.clone());
                }
            }
            Reference::Interface(iface) => {
                let candidates: Vec<&String> = store.implementors(iface).collect();
                out = out
                    .iter()
                    .flat_map(|env| {
                        candidates.iter().map(move |id| env.update(var, Reference::Instance((*id).clone())))
                    })
                    .collect();
            }
        }
    }
    out
}

/// A predicate waiting for a complete entity environment.
pub type BoolFn<'a> = Arc<dyn Fn(&EnvEntity) -> bool + Send + Sync + 'a>;

pub fn constant_bool<'a>(value: bool) -> BoolFn<'a> {
    Arc::new(move |_| value)
}

pub fn and_rho<'a>(lhs: BoolFn<'a>, rhs: BoolFn<'a>) -> BoolFn<'a> {
    Arc::new(move |rho| lhs(rho) && rhs(rho))
}

pub fn or_rho<'a>(lhs: BoolFn<'a>, rhs: BoolFn<'a>) -> BoolFn<'a> {
    Arc::new(move |rho| lhs(rho) || rhs(rho))
}
