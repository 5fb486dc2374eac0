//! JSON-OCEL parsing and emission.
//!
//! The reader accepts the 1.0 key set ("ocel:events", "ocel:objects",
//! "ocel:global-log") and warns on unknown keys instead of failing. The
//! writer produces a canonical form: keys sorted, timestamps as ISO-8601
//! UTC with millisecond precision, so equal logs serialize byte-identically.

use std::collections::BTreeMap;

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};
use hoegkit_core::{AttributeValue, Event, EventLog, ObjectInstance, Timestamp, Violation};
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseReport {
    pub warnings: Vec<String>,
    pub events: usize,
    pub objects: usize,
    pub types: usize,
}

const KNOWN_TOP: [&str; 3] = ["ocel:events", "ocel:objects", "ocel:global-log"];
const KNOWN_EVENT: [&str; 4] = ["ocel:activity", "ocel:timestamp", "ocel:omap", "ocel:vmap"];
const KNOWN_OBJECT: [&str; 2] = ["ocel:type", "ocel:ovmap"];

pub fn format_timestamp(ts: Timestamp) -> String {
    Utc.timestamp_millis_opt(ts.0)
        .single()
        .expect("timestamp in chrono range")
        .to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn parse_timestamp(text: &str) -> Option<Timestamp> {
    DateTime::parse_from_rfc3339(text)
        .ok()
        .map(|dt| Timestamp(dt.timestamp_millis()))
}

fn attr_from_json(value: &Value, entity: &str) -> Result<AttributeValue> {
    match value {
        Value::Number(n) => {
            let x = n
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Parse(format!("{entity}: non-finite number")))?;
            Ok(AttributeValue::Number(x))
        }
        Value::String(s) => Ok(match parse_timestamp(s) {
            Some(ts) => AttributeValue::Timestamp(ts),
            None => AttributeValue::Category(s.clone()),
        }),
        Value::Bool(b) => Ok(AttributeValue::Category(b.to_string())),
        other => Err(CliError::Parse(format!(
            "{entity}: unsupported attribute value {other}"
        ))),
    }
}

fn attr_to_json(value: &AttributeValue) -> Value {
    match value {
        AttributeValue::Number(x) => json!(x),
        AttributeValue::Category(s) => json!(s),
        AttributeValue::Timestamp(ts) => json!(format_timestamp(*ts)),
    }
}

fn as_object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| CliError::Parse(format!("{what} is not a JSON object")))
}

fn required<'a>(map: &'a Map<String, Value>, key: &str, entity: &str) -> Result<&'a Value> {
    map.get(key)
        .ok_or_else(|| CliError::Parse(format!("{entity}: missing mandatory key \"{key}\"")))
}

/// Parse the raw parts of a JSON-OCEL document without enforcing the
/// event-log invariants, so callers can report domain violations separately
/// from I/O problems.
pub fn parse_parts(bytes: &[u8]) -> Result<(Vec<Event>, Vec<ObjectInstance>, Vec<String>)> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| CliError::Parse(format!("input is not UTF-8: {e}")))?;
    let doc: Value =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("malformed JSON: {e}")))?;
    let top = as_object(&doc, "document")?;

    let mut warnings = Vec::new();
    for key in top.keys() {
        if !KNOWN_TOP.contains(&key.as_str()) {
            warnings.push(format!("unknown top-level key \"{key}\""));
        }
    }
    required(top, "ocel:global-log", "document")?;

    let objects_json = as_object(required(top, "ocel:objects", "document")?, "ocel:objects")?;
    let mut objects = Vec::new();
    let mut type_of: BTreeMap<&str, &str> = BTreeMap::new();
    for (oid, entry) in objects_json {
        let entry = as_object(entry, &format!("object {oid}"))?;
        let ty = required(entry, "ocel:type", &format!("object {oid}"))?
            .as_str()
            .ok_or_else(|| CliError::Parse(format!("object {oid}: type is not a string")))?;
        let ovmap = as_object(
            required(entry, "ocel:ovmap", &format!("object {oid}"))?,
            "ocel:ovmap",
        )?;
        let mut attrs = BTreeMap::new();
        for (name, value) in ovmap {
            attrs.insert(
                name.clone(),
                attr_from_json(value, &format!("object {oid}"))?,
            );
        }
        for key in entry.keys() {
            if !KNOWN_OBJECT.contains(&key.as_str()) {
                warnings.push(format!("object {oid}: unknown key \"{key}\""));
            }
        }
        type_of.insert(oid, ty);
        objects.push(ObjectInstance {
            id: oid.clone(),
            type_name: ty.to_string(),
            attrs,
        });
    }

    let events_json = as_object(required(top, "ocel:events", "document")?, "ocel:events")?;
    if events_json.is_empty() {
        warnings.push("empty log".to_string());
    }
    let mut events = Vec::new();
    for (eid, entry) in events_json {
        let entity = format!("event {eid}");
        let entry = as_object(entry, &entity)?;
        let activity = required(entry, "ocel:activity", &entity)?
            .as_str()
            .ok_or_else(|| CliError::Parse(format!("{entity}: activity is not a string")))?;
        let ts_text = required(entry, "ocel:timestamp", &entity)?
            .as_str()
            .ok_or_else(|| CliError::Parse(format!("{entity}: timestamp is not a string")))?;
        let timestamp = parse_timestamp(ts_text).ok_or_else(|| {
            CliError::Parse(format!("{entity}: unparseable timestamp \"{ts_text}\""))
        })?;
        let omap = required(entry, "ocel:omap", &entity)?
            .as_array()
            .ok_or_else(|| CliError::Parse(format!("{entity}: omap is not an array")))?;
        let mut refs: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for oid in omap {
            let oid = oid
                .as_str()
                .ok_or_else(|| CliError::Parse(format!("{entity}: omap entry is not a string")))?;
            // Undeclared references are kept (under a placeholder type) so
            // log construction can report them as violations; the strict
            // parse_ocel entry point turns those into parse errors.
            let ty = type_of.get(oid).copied().unwrap_or("~undeclared");
            let ids = refs.entry(ty.to_string()).or_default();
            if !ids.contains(&oid.to_string()) {
                ids.push(oid.to_string());
            }
        }
        let vmap = as_object(required(entry, "ocel:vmap", &entity)?, "ocel:vmap")?;
        let mut attrs = BTreeMap::new();
        for (name, value) in vmap {
            attrs.insert(name.clone(), attr_from_json(value, &entity)?);
        }
        for key in entry.keys() {
            if !KNOWN_EVENT.contains(&key.as_str()) {
                warnings.push(format!("{entity}: unknown key \"{key}\""));
            }
        }
        events.push(Event {
            id: eid.clone(),
            activity: activity.to_string(),
            timestamp,
            attrs,
            refs,
        });
    }

    Ok((events, objects, warnings))
}

/// Parse a JSON-OCEL document into a validated event log.
pub fn parse_ocel(bytes: &[u8]) -> Result<(EventLog, ParseReport)> {
    let (events, objects, warnings) = parse_parts(bytes)?;
    let log = EventLog::new(events, objects).map_err(|violations| {
        let first = violations
            .first()
            .map(Violation::to_string)
            .unwrap_or_default();
        CliError::Parse(format!("invalid log: {first}"))
    })?;
    let types = log.object_types().len();
    let report = ParseReport {
        warnings,
        events: log.events().len(),
        objects: log.objects().len(),
        types,
    };
    Ok((log, report))
}

/// Canonical JSON-OCEL emission: equal logs produce byte-identical output.
pub fn serialize_log(log: &EventLog) -> String {
    let mut events = Map::new();
    for ev in log.events() {
        let mut omap = Vec::new();
        for ids in ev.refs.values() {
            omap.extend(ids.iter().cloned());
        }
        let vmap: Map<String, Value> = ev
            .attrs
            .iter()
            .map(|(k, v)| (k.clone(), attr_to_json(v)))
            .collect();
        events.insert(
            ev.id.clone(),
            json!({
                "ocel:activity": ev.activity,
                "ocel:timestamp": format_timestamp(ev.timestamp),
                "ocel:omap": omap,
                "ocel:vmap": vmap,
            }),
        );
    }
    let mut objects = Map::new();
    for (oid, obj) in log.objects() {
        let ovmap: Map<String, Value> = obj
            .attrs
            .iter()
            .map(|(k, v)| (k.clone(), attr_to_json(v)))
            .collect();
        objects.insert(
            oid.clone(),
            json!({ "ocel:type": obj.type_name, "ocel:ovmap": ovmap }),
        );
    }
    let attr_names: Vec<String> = {
        let mut names: Vec<String> = log
            .events()
            .iter()
            .flat_map(|e| e.attrs.keys().cloned())
            .chain(log.objects().values().flat_map(|o| o.attrs.keys().cloned()))
            .collect();
        names.sort();
        names.dedup();
        names
    };
    let doc = json!({
        "ocel:global-log": {
            "ocel:version": "1.0",
            "ocel:attribute-names": attr_names,
            "ocel:object-types": log.object_types(),
        },
        "ocel:events": events,
        "ocel:objects": objects,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable document");
    text.push('\n');
    text
}
