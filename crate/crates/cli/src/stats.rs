//! Dataset summary statistics.

use std::collections::BTreeSet;

use hoegkit_core::{count_cases, EventLog, ExtractionStrategy};
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogStats {
    pub events: usize,
    pub event_attrs: usize,
    pub objects: usize,
    pub object_types: usize,
    pub object_attrs: usize,
    pub cases: usize,
    pub mean_object_interactions_per_event: f64,
}

pub fn log_stats(log: &EventLog, strategy: &ExtractionStrategy) -> Result<LogStats> {
    let event_attrs: BTreeSet<&str> = log
        .events()
        .iter()
        .flat_map(|e| e.attrs.keys().map(String::as_str))
        .collect();
    let object_attrs: BTreeSet<&str> = log
        .objects()
        .values()
        .flat_map(|o| o.attrs.keys().map(String::as_str))
        .collect();
    let total_interactions: usize = log
        .events()
        .iter()
        .map(|e| e.referenced_objects().collect::<BTreeSet<_>>().len())
        .sum();
    let n = log.events().len();
    Ok(LogStats {
        events: n,
        event_attrs: event_attrs.len(),
        objects: log.objects().len(),
        object_types: log.object_types().len(),
        object_attrs: object_attrs.len(),
        cases: count_cases(log, strategy)?,
        mean_object_interactions_per_event: if n == 0 {
            0.0
        } else {
            total_interactions as f64 / n as f64
        },
    })
}

impl LogStats {
    pub fn summary_row(&self) -> String {
        format!(
            "events={} objects={} types={} cases={} mean_interactions={:.2}",
            self.events,
            self.objects,
            self.object_types,
            self.cases,
            self.mean_object_interactions_per_event
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::build_otc_fixture;

    #[test]
    fn fixture_stats() {
        let log = build_otc_fixture();
        let s = log_stats(&log, &ExtractionStrategy::ConnectedComponents).unwrap();
        assert_eq!(s.events, 10);
        assert_eq!(s.objects, 8);
        assert_eq!(s.object_types, 4);
        assert_eq!(s.event_attrs, 1);
        assert_eq!(s.object_attrs, 6);
        assert_eq!(s.cases, 1);
        assert_eq!(s.mean_object_interactions_per_event, 3.1);
        assert_eq!(
            s.summary_row(),
            "events=10 objects=8 types=4 cases=1 mean_interactions=3.10"
        );

        let by_item = log_stats(&log, &ExtractionStrategy::LeadingType("item".into())).unwrap();
        assert_eq!(by_item.cases, 3);
    }

    #[test]
    fn empty_log_stats() {
        let log = EventLog::new(vec![], vec![]).unwrap();
        let s = log_stats(&log, &ExtractionStrategy::ConnectedComponents).unwrap();
        assert_eq!(s.events, 0);
        assert_eq!(s.cases, 0);
        assert_eq!(s.mean_object_interactions_per_event, 0.0);
    }
}
