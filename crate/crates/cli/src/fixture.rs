//! The order-to-cash running-example log: 10 events over 2 orders, 3 items,
//! 2 packages, and 1 delivery. Every event is stamped 12:00:00 UTC on its
//! calendar date so time arithmetic in tests is exact.

use std::collections::BTreeMap;

use chrono::{TimeZone, Utc};
use hoegkit_core::{AttributeValue, Event, EventLog, ObjectInstance, Timestamp};

fn noon(year: i32, month: u32, day: u32) -> Timestamp {
    let dt = Utc
        .with_ymd_and_hms(year, month, day, 12, 0, 0)
        .single()
        .expect("valid calendar date");
    Timestamp(dt.timestamp_millis())
}

fn event(id: &str, activity: &str, day: u32, resource: &str, refs: &[(&str, &[&str])]) -> Event {
    let month = if day >= 30 { 1 } else { 2 };
    Event {
        id: id.to_string(),
        activity: activity.to_string(),
        timestamp: noon(2023, month, day),
        attrs: BTreeMap::from([(
            "Resource".to_string(),
            AttributeValue::Category(resource.to_string()),
        )]),
        refs: refs
            .iter()
            .map(|(ty, ids)| (ty.to_string(), ids.iter().map(|s| s.to_string()).collect()))
            .collect(),
    }
}

fn object(id: &str, ty: &str, attrs: &[(&str, AttributeValue)]) -> ObjectInstance {
    ObjectInstance {
        id: id.to_string(),
        type_name: ty.to_string(),
        attrs: attrs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    }
}

pub fn build_otc_fixture() -> EventLog {
    use AttributeValue::{Category, Number};
    let objects = vec![
        object("o1", "order", &[("Urgency", Number(1.0))]),
        object("o2", "order", &[("Urgency", Number(3.0))]),
        object("i1", "item", &[("Discount", Number(33.0))]),
        object("i2", "item", &[("Discount", Number(0.0))]),
        object("i3", "item", &[("Discount", Number(25.0))]),
        object(
            "p1",
            "package",
            &[("Weight", Number(3.5)), ("Size", Category("medium".into()))],
        ),
        object(
            "p2",
            "package",
            &[("Weight", Number(3.0)), ("Size", Category("medium".into()))],
        ),
        object(
            "d1",
            "delivery",
            &[
                ("Route length", Category("short".into())),
                ("No. stops", Number(5.0)),
            ],
        ),
    ];

    let events = vec![
        event(
            "e1",
            "Place order",
            30,
            "CloudServiceA",
            &[("order", &["o1"]), ("item", &["i1", "i2"])],
        ),
        event(
            "e2",
            "Pay order",
            30,
            "CloudServiceA",
            &[("order", &["o1"])],
        ),
        event(
            "e3",
            "Place order",
            30,
            "CloudServiceB",
            &[("order", &["o2"]), ("item", &["i3"])],
        ),
        event(
            "e4",
            "Pay order",
            30,
            "CloudServiceB",
            &[("order", &["o2"])],
        ),
        event(
            "e5",
            "Pick item",
            31,
            "WarehouseTeamX",
            &[("order", &["o1"]), ("item", &["i1"])],
        ),
        event(
            "e6",
            "Pick item",
            31,
            "WarehouseTeamX",
            &[("order", &["o2"]), ("item", &["i3"])],
        ),
        event(
            "e7",
            "Pack item",
            31,
            "WarehouseTeamX",
            &[("order", &["o1"]), ("item", &["i1"]), ("package", &["p1"])],
        ),
        event(
            "e8",
            "Pack item",
            31,
            "WarehouseTeamX",
            &[("order", &["o2"]), ("item", &["i3"]), ("package", &["p2"])],
        ),
        event(
            "e9",
            "Ship package",
            1,
            "WarehouseTeamY",
            &[
                ("order", &["o1", "o2"]),
                ("item", &["i1", "i3"]),
                ("package", &["p1", "p2"]),
                ("delivery", &["d1"]),
            ],
        ),
        event(
            "e10",
            "Confirm delivery",
            2,
            "PostalServiceP",
            &[
                ("order", &["o1", "o2"]),
                ("item", &["i1", "i3"]),
                ("package", &["p1", "p2"]),
                ("delivery", &["d1"]),
            ],
        ),
    ];

    EventLog::new(events, objects).expect("fixture log is valid")
}
