//! Edge-list input and output.
//!
//! The format is one `u v` pair of decimal IDs per line; blank lines and
//! anything after `#` are ignored. On loading, IDs are relabelled to
//! `0..n` in ascending order of the original ID and vertices left without
//! edges are dropped, so every vertex of the result has degree at least 1.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeListSpec {
    pub path: PathBuf,
    /// Lines are directed arcs; the graph gets the union of both directions.
    pub symmetrize: bool,
    /// Keep only edges whose endpoints are both listed in this file.
    pub node_filter: Option<PathBuf>,
    /// Collapse parallel edges.
    pub dedupe: bool,
    pub drop_loops: bool,
}

impl EdgeListSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        EdgeListSpec {
            path: path.into(),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub edges_read: usize,
    pub loops_dropped: usize,
    /// Parallel edges collapsed by dedupe or symmetrization.
    pub duplicates_dropped: usize,
    /// Edges with an endpoint outside the node filter.
    pub filtered_dropped: usize,
    /// IDs that ended up without any edge.
    pub isolated_dropped: usize,
    pub nodes: usize,
    pub edges: usize,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes={} edges={} read={} loops_dropped={} duplicates_dropped={} filtered_dropped={} isolated_dropped={}",
            self.nodes,
            self.edges,
            self.edges_read,
            self.loops_dropped,
            self.duplicates_dropped,
            self.filtered_dropped,
            self.isolated_dropped
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ingested {
    pub graph: MultiGraph,
    /// Original ID of each vertex.
    pub id_map: Vec<u64>,
    pub report: IngestReport,
}

fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn read_node_filter(path: &Path) -> Result<HashSet<u64>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut ids = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let text = content(&line);
        if text.is_empty() {
            continue;
        }
        ids.insert(text.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: format!("bad node ID {text:?}"),
        })?);
    }
    Ok(ids)
}

pub fn load_edge_list(spec: &EdgeListSpec) -> Result<Ingested> {
    let file = std::fs::File::open(&spec.path)?;
    read_edge_list(BufReader::new(file), spec)
}

/// [`load_edge_list`] on an already opened reader; `spec.path` is only used
/// in messages.
pub fn read_edge_list<R: BufRead>(reader: R, spec: &EdgeListSpec) -> Result<Ingested> {
    let filter = spec
        .node_filter
        .as_deref()
        .map(read_node_filter)
        .transpose()?;
    let mut report = IngestReport::default();
    let mut mentioned = BTreeSet::new();
    let mut seen_pairs = HashSet::new();
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        report.lines += 1;
        let text = content(&line);
        if text.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: spec.path.clone(),
            line: i + 1,
            msg,
        };
        let mut fields = text.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected two node IDs, found {text:?}")));
        };
        let id = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| parse_err(format!("bad node ID {s:?}")))
        };
        let (u, v) = (id(a)?, id(b)?);
        report.edges_read += 1;
        if let Some(keep) = &filter {
            if !keep.contains(&u) || !keep.contains(&v) {
                report.filtered_dropped += 1;
                continue;
            }
        }
        mentioned.insert(u);
        mentioned.insert(v);
        if u == v && spec.drop_loops {
            report.loops_dropped += 1;
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if (spec.dedupe || spec.symmetrize) && !seen_pairs.insert(pair) {
            report.duplicates_dropped += 1;
            continue;
        }
        edges.push(pair);
    }
    let endpoints: BTreeSet<u64> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    report.isolated_dropped = mentioned.len() - endpoints.len();
    let id_map: Vec<u64> = endpoints.into_iter().collect();
    if id_map.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let index = |x: u64| id_map.binary_search(&x).expect("endpoint is mapped");
    let graph = MultiGraph::from_edges(
        id_map.len(),
        edges.iter().map(|&(u, v)| (index(u), index(v))),
    )?;
    report.nodes = graph.n();
    report.edges = graph.edge_count();
    Ok(Ingested {
        graph,
        id_map,
        report,
    })
}

/// Writes `g` as an edge list, preceded by `header` as `#` comment lines.
pub fn write_edge_list<W: Write>(g: &MultiGraph, header: &[String], mut writer: W) -> Result<()> {
    for line in header {
        writeln!(writer, "# {line}")?;
    }
    for &(u, v) in g.edges() {
        writeln!(writer, "{u} {v}")?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes `new_id original_id` lines.
pub fn write_id_map<W: Write>(id_map: &[u64], mut writer: W) -> Result<()> {
    writeln!(writer, "# new_id original_id")?;
    for (new, original) in id_map.iter().enumerate() {
        writeln!(writer, "{new} {original}")?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ingest(text: &str, spec: EdgeListSpec) -> Result<Ingested> {
        read_edge_list(text.as_bytes(), &spec)
    }

    #[test]
    fn symmetrize_collapses_reverse_arcs() {
        let spec = EdgeListSpec {
            symmetrize: true,
            dedupe: true,
            ..EdgeListSpec::new("t.txt")
        };
        let out = ingest("0 1\n1 0\n", spec).unwrap();
        assert_eq!((out.report.nodes, out.report.edges), (2, 1));
        assert_eq!(out.report.duplicates_dropped, 1);
    }

    #[test]
    fn loops_dropped_and_isolated_removed() {
        let spec = EdgeListSpec {
            drop_loops: true,
            ..EdgeListSpec::new("t.txt")
        };
        let out = ingest("# comment\n2 2\n5 7 # trailing\n\n", spec).unwrap();
        assert_eq!(out.report.loops_dropped, 1);
        assert_eq!(out.report.isolated_dropped, 1);
        assert_eq!(out.id_map, vec![5, 7]);
        assert_eq!(out.graph.edges(), &[(0, 1)]);
    }

    #[test]
    fn parallel_edges_kept_without_dedupe() {
        let out = ingest("1 2\n2 1\n1 1\n", EdgeListSpec::new("t.txt")).unwrap();
        assert_eq!(out.report.edges, 3);
        assert!(!out.graph.is_simple());
    }

    #[test]
    fn node_filter_drops_edges_to_excluded_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let filter = dir.path().join("keep.txt");
        std::fs::write(&filter, "1\n2\n3\n").unwrap();
        let spec = EdgeListSpec {
            node_filter: Some(filter),
            ..EdgeListSpec::new("t.txt")
        };
        let out = ingest("1 2\n2 3\n3 4\n4 5\n", spec).unwrap();
        assert_eq!(out.report.filtered_dropped, 2);
        assert_eq!(out.id_map, vec![1, 2, 3]);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        for (text, needle) in [
            ("0 1\n0 x\n", "t.txt:2"),
            ("0 1\n\n3\n", "t.txt:3"),
            ("0 1 2\n", "t.txt:1"),
        ] {
            let e = ingest(text, EdgeListSpec::new("t.txt")).unwrap_err();
            assert!(e.to_string().contains(needle), "{e}");
        }
        assert!(matches!(
            ingest("# nothing\n", EdgeListSpec::new("t.txt")),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn write_then_load_round_trip() {
        let g = MultiGraph::from_edges(6, [(0, 1), (1, 1), (2, 4), (4, 2), (5, 0)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &["family test".into()], &mut buf).unwrap();
        let out = ingest(
            std::str::from_utf8(&buf).unwrap(),
            EdgeListSpec::new("g.txt"),
        )
        .unwrap();
        let mut back: Vec<(usize, usize)> = out
            .graph
            .sorted_edges()
            .into_iter()
            .map(|(u, v)| (out.id_map[u] as usize, out.id_map[v] as usize))
            .collect();
        back.sort_unstable();
        assert_eq!(back, g.sorted_edges());
        let mut map = Vec::new();
        write_id_map(&out.id_map, &mut map).unwrap();
        assert!(String::from_utf8(map).unwrap().ends_with("4 5\n"));
    }
}
