//! Trace serialization. Both formats list entities, members and bindings in
//! key order, so identical runs print identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use pantagruel_core::{ConflictError, Store, TickRecord, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Jsonl,
}

pub fn value_json(v: Value) -> Json {
    match v {
        Value::Nat(n) => json!(n),
        Value::Tr(b) => json!(b),
        Value::Undef => Json::Null,
    }
}

fn members_json(members: &BTreeMap<String, Value>) -> Json {
    Json::Object(members.iter().map(|(k, v)| (k.clone(), value_json(*v))).collect())
}

pub fn store_json(store: &Store) -> Json {
    let entities: Map<String, Json> = store
        .iter()
        .map(|(id, e)| {
            let entity = json!({
                "interface": e.interface,
                "attributes": members_json(&e.attributes),
                "events": members_json(&e.events),
            });
            (id.clone(), entity)
        })
        .collect();
    Json::Object(entities)
}

fn conflict_json(c: &ConflictError) -> Json {
    json!({ "entity": c.entity(), "key": c.key(), "message": c.to_string() })
}

pub fn tick_json(rec: &TickRecord) -> Json {
    let fired: Vec<Json> = rec.fired.iter().map(|f| json!({ "rule": f.rule, "binding": f.binding })).collect();
    let mut out = json!({
        "tick": rec.tick,
        "changes": rec.changes.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "fired": fired,
        "entities": store_json(&rec.snapshot),
    });
    if let Some(c) = &rec.conflict {
        out["conflict"] = conflict_json(c);
    }
    out
}

/// The record of the store before the first tick.
pub fn initial_json(store: &Store) -> Json {
    json!({ "initial": true, "entities": store_json(store) })
}

/// One record, newline terminated.
pub fn serialize_tick(rec: &TickRecord, format: Format) -> String {
    match format {
        Format::Jsonl => format!("{}\n", tick_json(rec)),
        Format::Text => {
            let mut out = format!("tick {}\n", rec.tick);
            let changes: Vec<String> = rec.changes.iter().map(ToString::to_string).collect();
            push_list(&mut out, "changes", &changes);
            let fired: Vec<String> = rec
                .fired
                .iter()
                .map(|f| {
                    let binding: Vec<String> = f.binding.iter().map(|(var, id)| format!("{var}={id}")).collect();
                    format!("rule {} {{{}}}", f.rule, binding.join(", "))
                })
                .collect();
            push_list(&mut out, "fired", &fired);
            if let Some(c) = &rec.conflict {
                let _ = writeln!(out, "  conflict: {c}");
            }
            out.push_str(&store_table(&rec.snapshot));
            out
        }
    }
}

pub fn serialize_initial(store: &Store, format: Format) -> String {
    match format {
        Format::Jsonl => format!("{}\n", initial_json(store)),
        Format::Text => format!("initial\n{}", store_table(store)),
    }
}

/// The store alone, as printed by the REPL's `state` command.
pub fn serialize_store(store: &Store, format: Format) -> String {
    match format {
        Format::Jsonl => format!("{}\n", json!({ "entities": store_json(store) })),
        Format::Text => store_table(store),
    }
}

fn push_list(out: &mut String, label: &str, items: &[String]) {
    if items.is_empty() {
        let _ = writeln!(out, "  {label}: -");
        return;
    }
    let pad = " ".repeat(label.len() + 4);
    for (i, item) in items.iter().enumerate() {
        if i == 0 {
            let _ = writeln!(out, "  {label}: {item}");
        } else {
            let _ = writeln!(out, "{pad}{item}");
        }
    }
}

/// One row per member: entity, interface, member kind, member, value.
fn store_table(store: &Store) -> String {
    let mut rows: Vec<[String; 5]> = Vec::new();
    for (id, e) in store {
        let members = e.attributes.iter().map(|m| ("attr", m)).chain(e.events.iter().map(|m| ("event", m)));
        let mut any = false;
        for (kind, (name, value)) in members {
            rows.push([id.clone(), e.interface.clone(), kind.into(), name.clone(), value.to_string()]);
            any = true;
        }
        if !any {
            rows.push([id.clone(), e.interface.clone(), "-".into(), "-".into(), "-".into()]);
        }
    }
    let mut widths = [0usize; 5];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let mut line = String::from("  ");
        for (i, cell) in row.iter().enumerate() {
            if i + 1 == row.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<width$}  ", width = widths[i]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pantagruel_core::Entity;

    fn s2_like() -> Store {
        Store::new().with(
            "l10",
            Entity::new("Light").with_attribute("room", Value::Nat(101)).with_event("switch", Value::Tr(true)),
        )
    }

    fn record(snapshot: Store) -> TickRecord {
        TickRecord { tick: 2, changes: vec![], fired: vec![], snapshot, conflict: None }
    }

    #[test]
    fn jsonl_entity_shape() {
        let line = serialize_tick(&record(s2_like()), Format::Jsonl);
        assert!(line.contains(r#""l10":{"attributes":{"room":101},"events":{"switch":true},"interface":"Light"}"#));
        assert!(line.ends_with('\n'));
        assert!(!line.contains("conflict"));
    }

    #[test]
    fn jsonl_keys_are_sorted_and_undef_is_null() {
        let store = Store::new().with("x", Entity::new("Light").with_event("switch", Value::Undef));
        let line = serialize_tick(&record(store), Format::Jsonl);
        assert!(line.starts_with(r#"{"changes":[],"entities":{"x":{"attributes":{},"events":{"switch":null}"#));
        assert!(line.trim_end().ends_with(r#""fired":[],"tick":2}"#));
        let empty = serialize_tick(&record(Store::new()), Format::Jsonl);
        assert!(empty.contains(r#""entities":{}"#));
    }

    #[test]
    fn text_table_is_aligned() {
        let store =
            s2_like().with("thermo", Entity::new("TemperatureSensor").with_event("temperature", Value::Nat(30)));
        let text = serialize_tick(&record(store), Format::Text);
        assert_eq!(
            text,
            "tick 2\n  changes: -\n  fired: -\n\
             \x20 l10     Light              attr   room         101\n\
             \x20 l10     Light              event  switch       true\n\
             \x20 thermo  TemperatureSensor  event  temperature  30\n"
        );
    }
}
