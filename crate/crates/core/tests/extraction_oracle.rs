//! Extraction checked against an independent brute-force component finder,
//! plus partition and encoding invariants on randomized logs.

use std::collections::{BTreeMap, BTreeSet};

use hoegkit_core::synth::random_log;
use hoegkit_core::{
    build_object_graph, encode_hoeg, extract_connected_components, extract_leading_type,
    fit_normalization, remaining_time, EventLog, FeatureConfig, FeatureFlags, EVENT_NODE_TYPE,
};

/// Brute-force connected components: repeated BFS over the object graph.
fn bfs_components(log: &EventLog) -> Vec<BTreeSet<String>> {
    let graph = build_object_graph(log);
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for id in &graph.nodes {
        adjacency.entry(id).or_default();
    }
    for (a, b) in &graph.edges {
        adjacency.get_mut(a.as_str()).unwrap().push(b);
        adjacency.get_mut(b.as_str()).unwrap().push(a);
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut components = Vec::new();
    for start in adjacency.keys() {
        if seen.contains(*start) {
            continue;
        }
        let mut component = BTreeSet::new();
        let mut queue = vec![*start];
        while let Some(node) = queue.pop() {
            if !seen.insert(node) {
                continue;
            }
            component.insert(node.to_string());
            queue.extend(&adjacency[node]);
        }
        components.push(component);
    }
    components
}

#[test]
fn connected_components_agree_with_repeated_bfs() {
    for seed in 0..300u64 {
        let log = random_log(seed, 200, 60);
        let got: BTreeSet<BTreeSet<String>> = extract_connected_components(&log)
            .into_iter()
            .map(|ex| ex.object_ids.into_iter().collect())
            .collect();
        let want: BTreeSet<BTreeSet<String>> = bfs_components(&log)
            .into_iter()
            .filter(|c| {
                // executions only cover objects referenced by at least one event
                c.iter().any(|o| {
                    log.events()
                        .iter()
                        .any(|e| e.referenced_objects().any(|r| r == o))
                })
            })
            .collect();
        assert_eq!(got, want, "seed {seed}");
    }
}

#[test]
fn connected_components_partition_events() {
    for seed in 0..100u64 {
        let log = random_log(seed + 1000, 80, 40);
        let executions = extract_connected_components(&log);
        let mut seen_events: BTreeSet<&str> = BTreeSet::new();
        for ex in &executions {
            for e in &ex.event_ids {
                assert!(
                    seen_events.insert(e),
                    "event {e} in two executions (seed {seed})"
                );
            }
        }
        assert_eq!(seen_events.len(), log.events().len(), "seed {seed}");
    }
}

#[test]
fn leading_type_executions_cover_every_event_touching_that_type() {
    for seed in 0..60u64 {
        let log = random_log(seed + 2000, 60, 40);
        let ty = "type0";
        if !log.object_types().contains(&ty.to_string()) {
            continue;
        }
        let executions = extract_leading_type(&log, ty).unwrap();
        let referenced_leads = log
            .objects_of_type(ty)
            .iter()
            .filter(|o| {
                log.events()
                    .iter()
                    .any(|e| e.referenced_objects().any(|r| r == o.id))
            })
            .count();
        assert_eq!(executions.len(), referenced_leads, "seed {seed}");
        let covered: BTreeSet<&str> = executions
            .iter()
            .flat_map(|ex| ex.event_ids.iter().map(String::as_str))
            .collect();
        for event in log.events() {
            if event.refs.contains_key(ty) {
                assert!(covered.contains(event.id.as_str()), "seed {seed}");
            }
        }
        // each execution's objects stay inside one connected component
        let components = bfs_components(&log);
        for ex in &executions {
            let first = ex.object_ids.iter().next().unwrap();
            let home = components.iter().find(|c| c.contains(first)).unwrap();
            for o in &ex.object_ids {
                assert!(home.contains(o), "seed {seed}");
            }
        }
    }
}

#[test]
fn encoded_graphs_have_consistent_shapes_and_monotone_targets() {
    for seed in 0..60u64 {
        let log = random_log(seed + 3000, 40, 30);
        let executions = extract_connected_components(&log);
        let refs: Vec<&_> = executions.iter().collect();
        let cfg = FeatureConfig::fit(&log, &refs, FeatureFlags::default());
        let stats = fit_normalization(&refs, &log, &cfg).unwrap();
        for ex in &executions {
            let hoeg = encode_hoeg(ex, &log, &cfg, &stats, None).unwrap();
            assert_eq!(hoeg.event_count(), ex.event_ids.len());
            for et in &hoeg.edge_types {
                let (src_ty, dst_ty) = (&et.subject, &et.object);
                let n_src = hoeg.features[src_ty].cols();
                let n_dst = hoeg.features[dst_ty].cols();
                for &(u, v) in &hoeg.adjacency[et] {
                    assert!((u as usize) < n_src && (v as usize) < n_dst);
                }
            }
            // raw remaining time never increases along the event order
            let raw: Vec<f64> = ex
                .event_ids
                .iter()
                .map(|e| remaining_time(ex, e, &log).unwrap())
                .collect();
            for w in raw.windows(2) {
                assert!(w[0] >= w[1]);
            }
            assert_eq!(*raw.last().unwrap(), 0.0);
            assert_eq!(hoeg.targets.len(), hoeg.features[EVENT_NODE_TYPE].cols());
        }
    }
}

#[test]
fn normalization_stats_depend_only_on_the_train_split() {
    let log = random_log(42, 60, 50);
    let executions = extract_connected_components(&log);
    if executions.len() < 2 {
        panic!("need at least two executions for this test");
    }
    let refs: Vec<&_> = executions.iter().collect();
    let cfg = FeatureConfig::fit(&log, &refs, FeatureFlags::default());
    let (train, rest) = refs.split_at(refs.len() / 2);

    let stats_train_only = fit_normalization(train, &log, &cfg).unwrap();
    let stats_all = fit_normalization(&refs, &log, &cfg).unwrap();

    // Re-fitting on the same train split is exactly reproducible.
    let again = fit_normalization(train, &log, &cfg).unwrap();
    assert_eq!(stats_train_only.target.mean, again.target.mean);
    assert_eq!(stats_train_only.target.std, again.target.std);

    // Including held-out executions changes the stats, so using train-only
    // stats genuinely excludes the held-out data.
    assert!(!rest.is_empty());
    assert_ne!(stats_train_only.target.mean, stats_all.target.mean);
}
