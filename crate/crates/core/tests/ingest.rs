use netsize::harness::stream_rng;
use netsize::ingest::{load_edge_list, write_edge_list, EdgeListSpec};
use netsize::{clustering_stats, GraphFamily};

#[test]
fn generated_graph_survives_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let g = GraphFamily::ConfigLognormal
        .generate(3.0, 2000, &mut stream_rng(1, &[]))
        .unwrap();
    write_edge_list(
        &g,
        &["lognormal 3 2000".into()],
        std::fs::File::create(&path).unwrap(),
    )
    .unwrap();

    let loaded = load_edge_list(&EdgeListSpec::new(&path)).unwrap();
    let original: Vec<_> = g.sorted_edges();
    let mut back: Vec<_> = loaded
        .graph
        .sorted_edges()
        .into_iter()
        .map(|(u, v)| (loaded.id_map[u] as usize, loaded.id_map[v] as usize))
        .collect();
    back.sort_unstable();
    assert_eq!(back, original);
    assert_eq!(loaded.report.edges, g.edge_count());
    assert_eq!(
        loaded.report.nodes + loaded.report.isolated_dropped,
        g.degrees().filter(|&d| d > 0).count()
    );
}

#[test]
fn directed_listing_with_filter_matches_its_undirected_core() {
    let dir = tempfile::tempdir().unwrap();
    // each friendship listed in both directions, as in SNAP dumps, plus a loop
    let arcs = "# src dst\n1 2\n2 1\n2 3\n3 2\n3 1\n1 3\n3 4\n4 3\n9 9\n";
    std::fs::write(dir.path().join("arcs.txt"), arcs).unwrap();
    std::fs::write(dir.path().join("keep.txt"), "1\n2\n3\n9\n").unwrap();
    let spec = EdgeListSpec {
        symmetrize: true,
        dedupe: true,
        drop_loops: true,
        node_filter: Some(dir.path().join("keep.txt")),
        ..EdgeListSpec::new(dir.path().join("arcs.txt"))
    };
    let ingested = load_edge_list(&spec).unwrap();
    let r = &ingested.report;
    assert_eq!((r.nodes, r.edges), (3, 3));
    assert_eq!(
        (
            r.edges_read,
            r.filtered_dropped,
            r.loops_dropped,
            r.duplicates_dropped
        ),
        (9, 2, 1, 3)
    );
    assert_eq!(ingested.id_map, vec![1, 2, 3]);
    let stats = clustering_stats(&ingested.graph);
    assert_eq!((stats.average_clustering, stats.transitivity), (1.0, 1.0));
}
