use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use super::Value;

/// A runtime object: the interface it implements, its attribute values and
/// its event values (sensed events and implicit action events).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Entity {
    pub interface: String,
    pub attributes: BTreeMap<String, Value>,
    pub events: BTreeMap<String, Value>,
}

impl Entity {
    pub fn new(interface: impl Into<String>) -> Self {
        Self { interface: interface.into(), ..Default::default() }
    }

    pub fn with_attribute(mut self, name: &str, value: Value) -> Self {
        self.attributes.insert(name.to_string(), value);
        self
    }

    pub fn with_event(mut self, name: &str, value: Value) -> Self {
        self.events.insert(name.to_string(), value);
        self
    }

    pub fn event(&self, name: &str) -> Value {
        self.events.get(name).copied().unwrap_or_default()
    }

    pub fn attribute(&self, name: &str) -> Value {
        self.attributes.get(name).copied().unwrap_or_default()
    }
}

/// Which map of an entity a conflicting key lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemberKind {
    Attribute,
    Event,
}

impl fmt::Display for MemberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemberKind::Attribute => "attribute",
            MemberKind::Event => "event",
        })
    }
}

/// Two partial stores disagree about an entity.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConflictError {
    #[error("conflicting writes to {kind} `{entity}.{key}`: {left} vs {right}")]
    Value { entity: String, key: String, kind: MemberKind, left: Value, right: Value },
    #[error("entity `{entity}` has interface `{left}` on one side and `{right}` on the other")]
    Interface { entity: String, left: String, right: String },
}

impl ConflictError {
    pub fn entity(&self) -> &str {
        match self {
            ConflictError::Value { entity, .. } | ConflictError::Interface { entity, .. } => entity,
        }
    }

    /// The conflicting member, or the interface marker for interface clashes.
    pub fn key(&self) -> &str {
        match self {
            ConflictError::Value { key, .. } => key,
            ConflictError::Interface { .. } => "interface",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("no entity `{0}` in the store")]
pub struct UnknownEntity(pub String);

fn merge_members(
    entity: &str,
    kind: MemberKind,
    into: &mut BTreeMap<String, Value>,
    from: &BTreeMap<String, Value>,
) -> Result<(), ConflictError> {
    for (key, &value) in from {
        match into.entry(key.clone()) {
            btree_map::Entry::Vacant(slot) => {
                slot.insert(value);
            }
            btree_map::Entry::Occupied(slot) => {
                if *slot.get() != value {
                    return Err(ConflictError::Value {
                        entity: entity.to_string(),
                        key: key.clone(),
                        kind,
                        left: *slot.get(),
                        right: value,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Combines two views of entity `id`: absent sides pass the other through;
/// present sides merge their maps, and keys defined on both must agree.
pub fn combine_entities(id: &str, a: Option<&Entity>, b: Option<&Entity>) -> Result<Option<Entity>, ConflictError> {
    match (a, b) {
        (None, None) => Ok(None),
        (Some(e), None) | (None, Some(e)) => Ok(Some(e.clone())),
        (Some(a), Some(b)) => {
            if a.interface != b.interface {
                return Err(ConflictError::Interface {
                    entity: id.to_string(),
                    left: a.interface.clone(),
                    right: b.interface.clone(),
                });
            }
            let mut merged = a.clone();
            merge_members(id, MemberKind::Attribute, &mut merged.attributes, &b.attributes)?;
            merge_members(id, MemberKind::Event, &mut merged.events, &b.events)?;
            Ok(Some(merged))
        }
    }
}

/// Partial map from entity identifiers to entities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Store {
    entities: BTreeMap<String, Entity>,
}

impl Store {
    /// The empty store.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: &str) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut Entity> {
        self.entities.get_mut(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entities.contains_key(id)
    }

    pub fn insert(&mut self, id: impl Into<String>, entity: Entity) -> Option<Entity> {
        self.entities.insert(id.into(), entity)
    }

    pub fn with(mut self, id: &str, entity: Entity) -> Self {
        self.insert(id, entity);
        self
    }

    pub fn remove(&mut self, id: &str) -> Option<Entity> {
        self.entities.remove(id)
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Entities in identifier order.
    pub fn iter(&self) -> btree_map::Iter<'_, String, Entity> {
        self.entities.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = &String> {
        self.entities.keys()
    }

    /// Identifiers of the entities implementing `interface`, in order.
    pub fn implementors<'a>(&'a self, interface: &'a str) -> impl Iterator<Item = &'a String> + 'a {
        self.entities.iter().filter(move |(_, e)| e.interface == interface).map(|(id, _)| id)
    }

    /// Value of `event` on `entity`; `Undef` when either is missing.
    pub fn access_event(&self, event: &str, entity: &str) -> Value {
        self.get(entity).map(|e| e.event(event)).unwrap_or_default()
    }

    /// Value of `attribute` on `entity`; `Undef` when either is missing.
    pub fn access_attribute(&self, attribute: &str, entity: &str) -> Value {
        self.get(entity).map(|e| e.attribute(attribute)).unwrap_or_default()
    }

    pub fn update_event(&self, event: &str, entity: &str, value: Value) -> Result<Store, UnknownEntity> {
        let mut next = self.clone();
        next.set_event(event, entity, value)?;
        Ok(next)
    }

    pub fn update_attribute(&self, attribute: &str, entity: &str, value: Value) -> Result<Store, UnknownEntity> {
        let mut next = self.clone();
        next.set_attribute(attribute, entity, value)?;
        Ok(next)
    }

    pub fn set_event(&mut self, event: &str, entity: &str, value: Value) -> Result<(), UnknownEntity> {
        let target = self.entities.get_mut(entity).ok_or_else(|| UnknownEntity(entity.to_string()))?;
        target.events.insert(event.to_string(), value);
        Ok(())
    }

    pub fn set_attribute(&mut self, attribute: &str, entity: &str, value: Value) -> Result<(), UnknownEntity> {
        let target = self.entities.get_mut(entity).ok_or_else(|| UnknownEntity(entity.to_string()))?;
        target.attributes.insert(attribute.to_string(), value);
        Ok(())
    }

    /// Event update on a partial effect store. An entity missing from the
    /// partial store gets a skeleton entry that carries only this event,
    /// with its interface taken from `governing`.
    pub fn update_event_partial(
        &self,
        event: &str,
        entity: &str,
        value: Value,
        governing: &Store,
    ) -> Result<Store, UnknownEntity> {
        let mut next = self.clone();
        if !next.contains(entity) {
            let source = governing.get(entity).ok_or_else(|| UnknownEntity(entity.to_string()))?;
            next.insert(entity, Entity::new(source.interface.clone()));
        }
        next.set_event(event, entity, value)?;
        Ok(next)
    }

    /// Pointwise [`combine_entities`] over both key sets.
    pub fn join(&self, other: &Store) -> Result<Store, ConflictError> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        let mut joined = self.clone();
        for (id, entity) in &other.entities {
            let merged = combine_entities(id, joined.get(id), Some(entity))?;
            if let Some(merged) = merged {
                joined.insert(id.clone(), merged);
            }
        }
        Ok(joined)
    }

    /// Left fold of [`Store::join`] in iteration order, starting from the
    /// empty store.
    pub fn join_all<'a, I>(stores: I) -> Result<Store, ConflictError>
    where
        I: IntoIterator<Item = &'a Store>,
    {
        stores.into_iter().try_fold(Store::new(), |acc, s| acc.join(s))
    }
}

impl FromIterator<(String, Entity)> for Store {
    fn from_iter<T: IntoIterator<Item = (String, Entity)>>(iter: T) -> Self {
        Self { entities: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a Store {
    type Item = (&'a String, &'a Entity);
    type IntoIter = btree_map::Iter<'a, String, Entity>;

    fn into_iter(self) -> Self::IntoIter {
        self.entities.iter()
    }
}
