//! Core domain types for event logs with objects.
//!
//! An [`EventLog`] holds events, typed object instances, and the derived
//! per-object event sequences. Logs are immutable after construction;
//! construction rejects data that violates the structural invariants.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// UTC instant with millisecond precision, stored as milliseconds since the
/// Unix epoch.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn millis(&self) -> i64 {
        self.0
    }

    /// Seconds between two instants (`self - earlier`).
    pub fn seconds_since(&self, earlier: Timestamp) -> f64 {
        (self.0 - earlier.0) as f64 / 1000.0
    }
}

/// An attribute value: a finite number, a category label, or a timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttributeValue {
    Number(f64),
    Category(String),
    Timestamp(Timestamp),
}

impl AttributeValue {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttributeValue::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_category(&self) -> Option<&str> {
        match self {
            AttributeValue::Category(s) => Some(s),
            _ => None,
        }
    }
}

/// A single event. `refs` maps object-type name to the ordered set of object
/// ids the event references, mirroring the column-per-type layout of object
/// reference tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub id: String,
    pub activity: String,
    pub timestamp: Timestamp,
    pub attrs: BTreeMap<String, AttributeValue>,
    pub refs: BTreeMap<String, Vec<String>>,
}

impl Event {
    /// All object ids referenced by this event, across types.
    pub fn referenced_objects(&self) -> impl Iterator<Item = &str> {
        self.refs.values().flatten().map(String::as_str)
    }
}

/// An object instance. Exactly one type per object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: String,
    pub type_name: String,
    pub attrs: BTreeMap<String, AttributeValue>,
}

/// A structural rule violation found during validation. Violations are data,
/// not failures; each names the offending entity and the rule it breaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl Violation {
    fn new(entity: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            entity: entity.into(),
            rule: rule.into(),
        }
    }
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

/// An immutable event log with objects.
///
/// Events are kept sorted by `(timestamp, id)`; this total order is the
/// tiebreak used everywhere downstream so results are reproducible when
/// timestamps collide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    events: Vec<Event>,
    objects: BTreeMap<String, ObjectInstance>,
    /// Per-object event-id sequences, in log order.
    sigma: BTreeMap<String, Vec<String>>,
    event_index: BTreeMap<String, usize>,
}

impl EventLog {
    /// Build a log, rejecting any input that violates the structural
    /// invariants. The violation list is returned in full on failure.
    pub fn new(
        events: Vec<Event>,
        objects: Vec<ObjectInstance>,
    ) -> core::result::Result<EventLog, Vec<Violation>> {
        Self::with_options(events, objects, false)
    }

    /// As [`EventLog::new`], optionally zero-filling numeric object
    /// attributes that are missing within a type (categoricals are never
    /// filled).
    pub fn with_options(
        mut events: Vec<Event>,
        objects: Vec<ObjectInstance>,
        zero_fill_numeric: bool,
    ) -> core::result::Result<EventLog, Vec<Violation>> {
        let mut violations = Vec::new();

        let mut object_map: BTreeMap<String, ObjectInstance> = BTreeMap::new();
        for obj in objects {
            if obj.id.is_empty() {
                violations.push(Violation::new("<object>", "object id must be non-empty"));
                continue;
            }
            if let Some(prev) = object_map.get(&obj.id) {
                violations.push(Violation::new(
                    &obj.id,
                    format!(
                        "object declared with two types: {} and {}",
                        prev.type_name, obj.type_name
                    ),
                ));
                continue;
            }
            object_map.insert(obj.id.clone(), obj);
        }

        if zero_fill_numeric {
            zero_fill_missing_numeric(&mut object_map);
        }
        violations.extend(check_type_schemas(&object_map));

        events.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));

        let mut event_index = BTreeMap::new();
        for (i, ev) in events.iter().enumerate() {
            if ev.id.is_empty() {
                violations.push(Violation::new("<event>", "event id must be non-empty"));
            }
            if event_index.insert(ev.id.clone(), i).is_some() {
                violations.push(Violation::new(&ev.id, "duplicate event id"));
            }
            for (ty, ids) in &ev.refs {
                for oid in ids {
                    match object_map.get(oid) {
                        None => violations.push(Violation::new(
                            &ev.id,
                            format!("references unknown object {oid}"),
                        )),
                        Some(obj) if &obj.type_name != ty => violations.push(Violation::new(
                            &ev.id,
                            format!(
                                "references object {oid} under type {ty}, but it has type {}",
                                obj.type_name
                            ),
                        )),
                        _ => {}
                    }
                }
            }
            if ev.referenced_objects().next().is_none() {
                violations.push(Violation::new(&ev.id, "event references no objects"));
            }
            for (name, value) in &ev.attrs {
                if let AttributeValue::Number(x) = value {
                    if !x.is_finite() {
                        violations.push(Violation::new(
                            &ev.id,
                            format!("attribute {name} is not finite"),
                        ));
                    }
                }
            }
        }

        if !violations.is_empty() {
            return Err(violations);
        }

        let mut sigma: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for ev in &events {
            let mut seen = BTreeSet::new();
            for oid in ev.referenced_objects() {
                if seen.insert(oid) {
                    sigma
                        .entry(oid.to_string())
                        .or_default()
                        .push(ev.id.clone());
                }
            }
        }

        Ok(EventLog {
            events,
            objects: object_map,
            sigma,
            event_index,
        })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn objects(&self) -> &BTreeMap<String, ObjectInstance> {
        &self.objects
    }

    pub fn object(&self, id: &str) -> Result<&ObjectInstance> {
        self.objects
            .get(id)
            .ok_or_else(|| CoreError::UnknownObject(id.to_string()))
    }

    pub fn event(&self, id: &str) -> Result<&Event> {
        self.event_index
            .get(id)
            .map(|&i| &self.events[i])
            .ok_or_else(|| CoreError::UnknownEvent(id.to_string()))
    }

    /// Position of an event in the `(timestamp, id)` total order.
    pub fn event_position(&self, id: &str) -> Result<usize> {
        self.event_index
            .get(id)
            .copied()
            .ok_or_else(|| CoreError::UnknownEvent(id.to_string()))
    }

    /// The event sequence of an object, in log order.
    pub fn sigma(&self, object_id: &str) -> Result<&[String]> {
        self.sigma
            .get(object_id)
            .map(Vec::as_slice)
            .ok_or_else(|| CoreError::UnknownObject(object_id.to_string()))
    }

    /// All object types declared by the log's objects, sorted.
    pub fn object_types(&self) -> Vec<String> {
        let types: BTreeSet<String> = self.objects.values().map(|o| o.type_name.clone()).collect();
        types.into_iter().collect()
    }

    /// Objects of a given type, sorted by id.
    pub fn objects_of_type(&self, type_name: &str) -> Vec<&ObjectInstance> {
        self.objects
            .values()
            .filter(|o| o.type_name == type_name)
            .collect()
    }

    /// The objects associated to an event: `{ o | e in sigma(o) }`.
    pub fn objects_of_event(&self, event_id: &str) -> Result<BTreeSet<String>> {
        let ev = self.event(event_id)?;
        Ok(ev.referenced_objects().map(str::to_string).collect())
    }

    /// The directly-follows relation: union over all objects of consecutive
    /// pairs in their event sequences, deduplicated.
    pub fn directly_follows(&self) -> BTreeSet<(String, String)> {
        let mut pairs = BTreeSet::new();
        for seq in self.sigma.values() {
            for win in seq.windows(2) {
                pairs.insert((win[0].clone(), win[1].clone()));
            }
        }
        pairs
    }

    /// Re-check every structural invariant. Always empty for a constructed
    /// log; exposed so external callers can audit data before construction.
    pub fn validate(&self) -> Vec<Violation> {
        match EventLog::new(
            self.events.clone(),
            self.objects.values().cloned().collect(),
        ) {
            Ok(_) => Vec::new(),
            Err(v) => v,
        }
    }
}

/// Within one type, all objects must share the same attribute-name set.
fn check_type_schemas(objects: &BTreeMap<String, ObjectInstance>) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut type_schema: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for obj in objects.values() {
        let attrs: BTreeSet<&str> = obj.attrs.keys().map(String::as_str).collect();
        type_schema
            .entry(obj.type_name.as_str())
            .or_insert_with(|| attrs.clone())
            .extend(attrs);
    }
    for obj in objects.values() {
        let schema = &type_schema[obj.type_name.as_str()];
        for &attr in schema {
            if !obj.attrs.contains_key(attr) {
                violations.push(Violation::new(
                    &obj.id,
                    format!(
                        "missing attribute {attr} required by type {}",
                        obj.type_name
                    ),
                ));
            }
        }
        for (name, value) in &obj.attrs {
            if let AttributeValue::Number(x) = value {
                if !x.is_finite() {
                    violations.push(Violation::new(
                        &obj.id,
                        format!("attribute {name} is not finite"),
                    ));
                }
            }
        }
    }
    violations
}

fn zero_fill_missing_numeric(objects: &mut BTreeMap<String, ObjectInstance>) {
    // An attribute counts as numeric for a type if any sibling carries it as
    // a number.
    let mut numeric_attrs: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for obj in objects.values() {
        for (name, value) in &obj.attrs {
            if matches!(value, AttributeValue::Number(_)) {
                numeric_attrs
                    .entry(obj.type_name.clone())
                    .or_default()
                    .insert(name.clone());
            }
        }
    }
    for obj in objects.values_mut() {
        if let Some(attrs) = numeric_attrs.get(&obj.type_name) {
            for attr in attrs {
                obj.attrs
                    .entry(attr.clone())
                    .or_insert(AttributeValue::Number(0.0));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(id: &str, ts: i64, refs: &[(&str, &[&str])]) -> Event {
        Event {
            id: id.to_string(),
            activity: format!("act-{id}"),
            timestamp: Timestamp(ts),
            attrs: BTreeMap::new(),
            refs: refs
                .iter()
                .map(|(ty, ids)| (ty.to_string(), ids.iter().map(|s| s.to_string()).collect()))
                .collect(),
        }
    }

    fn obj(id: &str, ty: &str) -> ObjectInstance {
        ObjectInstance {
            id: id.to_string(),
            type_name: ty.to_string(),
            attrs: BTreeMap::new(),
        }
    }

    #[test]
    fn sigma_is_subsequence_in_log_order() {
        let log = EventLog::new(
            vec![
                ev("b", 2, &[("t", &["x"])]),
                ev("a", 1, &[("t", &["x", "y"])]),
                ev("c", 3, &[("t", &["y"])]),
            ],
            vec![obj("x", "t"), obj("y", "t")],
        )
        .unwrap();
        assert_eq!(log.sigma("x").unwrap(), ["a", "b"]);
        assert_eq!(log.sigma("y").unwrap(), ["a", "c"]);
    }

    #[test]
    fn orphan_event_rejected_at_construction() {
        let err = EventLog::new(vec![ev("a", 1, &[])], vec![]).unwrap_err();
        assert!(err.iter().any(|v| v.entity == "a"));
    }

    #[test]
    fn unknown_object_ref_names_the_event() {
        let err = EventLog::new(vec![ev("e5", 1, &[("t", &["iX"])])], vec![]).unwrap_err();
        assert!(err
            .iter()
            .any(|v| v.entity == "e5" && v.rule.contains("iX")));
    }

    #[test]
    fn duplicate_object_under_second_type_is_one_violation() {
        let err = EventLog::new(
            vec![ev("a", 1, &[("t", &["o1"])])],
            vec![obj("o1", "t"), obj("o1", "u")],
        )
        .unwrap_err();
        let hits: Vec<_> = err.iter().filter(|v| v.entity == "o1").collect();
        assert_eq!(hits.len(), 1);
    }

    #[test]
    fn wrong_type_key_is_a_violation() {
        let err =
            EventLog::new(vec![ev("a", 1, &[("u", &["o1"])])], vec![obj("o1", "t")]).unwrap_err();
        assert!(err
            .iter()
            .any(|v| v.entity == "a" && v.rule.contains("type")));
    }

    #[test]
    fn directly_follows_short_sequences_empty() {
        let log = EventLog::new(
            vec![ev("a", 1, &[("t", &["x"])]), ev("b", 2, &[("t", &["y"])])],
            vec![obj("x", "t"), obj("y", "t")],
        )
        .unwrap();
        assert!(log.directly_follows().is_empty());
    }

    #[test]
    fn objects_of_event_matches_union_of_refs() {
        let log = EventLog::new(
            vec![ev("a", 1, &[("t", &["x"]), ("u", &["z"])])],
            vec![obj("x", "t"), obj("z", "u")],
        )
        .unwrap();
        let got = log.objects_of_event("a").unwrap();
        assert_eq!(
            got,
            ["x", "z"]
                .iter()
                .map(|s| s.to_string())
                .collect::<BTreeSet<_>>()
        );
        assert!(matches!(
            log.objects_of_event("nope"),
            Err(CoreError::UnknownEvent(_))
        ));
    }

    #[test]
    fn schema_incompleteness_detected_and_zero_fill_repairs_numerics() {
        let mut o1 = obj("o1", "t");
        o1.attrs
            .insert("w".to_string(), AttributeValue::Number(1.0));
        let o2 = obj("o2", "t");
        let events = vec![ev("a", 1, &[("t", &["o1", "o2"])])];

        let err = EventLog::new(events.clone(), vec![o1.clone(), o2.clone()]).unwrap_err();
        assert!(err.iter().any(|v| v.entity == "o2"));

        let log = EventLog::with_options(events, vec![o1, o2], true).unwrap();
        assert_eq!(
            log.object("o2").unwrap().attrs["w"],
            AttributeValue::Number(0.0)
        );
    }
}
