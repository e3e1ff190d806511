//! Temporal edge-list ingestion and immutable snapshot graphs.
//!
//! A [`TemporalGraph`] keeps every timestamped edge as loaded (including
//! repeat contacts between the same pair). A [`Snapshot`] is the simple
//! undirected graph of everything seen up to a cutoff `t0`, stored as a
//! CSR adjacency so feature code can scan neighbor lists without hashing.
//! An [`ObservationWindow`] is the set of brand-new pairs that appear in
//! `(t0, t_end]`.

use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// External vertex identifier as it appears in edge-list files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexId(pub u64);

impl From<u64> for VertexId {
    fn from(id: u64) -> Self {
        VertexId(id)
    }
}

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// One undirected timestamped edge. `(u, v, t)` and `(v, u, t)` are the
/// same edge; self-loops are dropped at load time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub t: i64,
}

/// Dense external-to-internal vertex numbering.
///
/// Internal ids are assigned in ascending external-id order, so a neighbor
/// list sorted by internal id is also sorted by external id.
#[derive(Debug, PartialEq)]
pub(crate) struct VertexIndex {
    ext: Vec<u64>,
    int: HashMap<u64, u32>,
}

impl VertexIndex {
    fn from_ids(mut ids: Vec<u64>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        let int = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as u32))
            .collect();
        VertexIndex { ext: ids, int }
    }

    pub(crate) fn len(&self) -> usize {
        self.ext.len()
    }

    pub(crate) fn internal(&self, id: VertexId) -> Result<u32> {
        self.int.get(&id.0).copied().ok_or(Error::UnknownVertex(id))
    }

    pub(crate) fn external(&self, internal: u32) -> VertexId {
        VertexId(self.ext[internal as usize])
    }
}

/// Timestamped undirected edge multiset plus the vertex numbering shared
/// by every snapshot and window derived from it.
#[derive(Debug)]
pub struct TemporalGraph {
    edges: Vec<TemporalEdge>,
    index: Arc<VertexIndex>,
    lines_read: usize,
    dropped_self_loops: usize,
}

impl TemporalGraph {
    /// Builds a graph from in-memory `(u, v, t)` triples, applying the same
    /// self-loop rule as the file loader.
    pub fn from_edges(raw: &[(u64, u64, i64)]) -> Self {
        let mut ids = Vec::with_capacity(raw.len() * 2);
        let mut edges = Vec::with_capacity(raw.len());
        let mut dropped = 0usize;
        for &(u, v, t) in raw {
            ids.push(u);
            ids.push(v);
            if u == v {
                dropped += 1;
                continue;
            }
            edges.push(TemporalEdge {
                u: VertexId(u),
                v: VertexId(v),
                t,
            });
        }
        TemporalGraph {
            edges,
            index: Arc::new(VertexIndex::from_ids(ids)),
            lines_read: raw.len(),
            dropped_self_loops: dropped,
        }
    }

    pub fn temporal_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.index.len()
    }

    /// Number of non-empty, non-comment lines consumed by the loader.
    pub fn lines_read(&self) -> usize {
        self.lines_read
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.index.ext.iter().map(|&id| VertexId(id))
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.index.int.contains_key(&id.0)
    }

    pub(crate) fn index(&self) -> &Arc<VertexIndex> {
        &self.index
    }

    /// Largest timestamp in the graph, if any edge exists.
    pub fn max_timestamp(&self) -> Option<i64> {
        self.edges.iter().map(|e| e.t).max()
    }
}

/// Parses an edge list: one `u v t` triple per line, whitespace separated,
/// `#` comment lines and blank lines skipped. Self-loops are dropped and
/// counted. Ids and timestamps must be non-negative integers.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<TemporalGraph> {
    let mut edges = Vec::new();
    let mut ids = Vec::new();
    let mut lines_read = 0usize;
    let mut dropped = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        lines_read += 1;
        let mut fields = text.split_whitespace();
        let u = parse_id(fields.next(), lineno)?;
        let v = parse_id(fields.next(), lineno)?;
        let t = parse_timestamp(fields.next(), lineno)?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "expected exactly three fields \"u v t\"".into(),
            });
        }
        ids.push(u);
        ids.push(v);
        if u == v {
            dropped += 1;
            continue;
        }
        edges.push(TemporalEdge {
            u: VertexId(u),
            v: VertexId(v),
            t,
        });
    }

    Ok(TemporalGraph {
        edges,
        index: Arc::new(VertexIndex::from_ids(ids)),
        lines_read,
        dropped_self_loops: dropped,
    })
}

/// Writes the temporal edges in storage order as `u v t` lines.
pub fn write_edge_list<W: std::io::Write>(graph: &TemporalGraph, mut w: W) -> Result<()> {
    for e in graph.edges() {
        writeln!(w, "{} {} {}", e.u, e.v, e.t)?;
    }
    Ok(())
}

fn raw_field<'a>(field: Option<&'a str>, line: usize, what: &str) -> Result<&'a str> {
    field.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })
}

fn parse_error(raw: &str, line: usize, what: &str) -> Error {
    let kind = if raw.starts_with('-') {
        "negative"
    } else {
        "invalid"
    };
    Error::Parse {
        line,
        message: format!("{kind} {what} {raw:?}"),
    }
}

fn parse_id(field: Option<&str>, line: usize) -> Result<u64> {
    let raw = raw_field(field, line, "vertex id")?;
    raw.parse().map_err(|_| parse_error(raw, line, "vertex id"))
}

fn parse_timestamp(field: Option<&str>, line: usize) -> Result<i64> {
    let raw = raw_field(field, line, "timestamp")?;
    let value: i64 = raw
        .parse()
        .map_err(|_| parse_error(raw, line, "timestamp"))?;
    if value < 0 {
        return Err(parse_error(raw, line, "timestamp"));
    }
    Ok(value)
}

/// Simple undirected graph of all edges known at a cutoff time.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, PartialEq)]
pub struct Snapshot {
    index: Arc<VertexIndex>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
    max_degree: usize,
    t0: i64,
}

/// Builds the simple graph of all pairs with at least one edge at `t <= t0`.
/// Parallel temporal edges collapse to a single adjacency entry.
pub fn snapshot_at(graph: &TemporalGraph, t0: i64) -> Snapshot {
    let index = Arc::clone(graph.index());
    let n = index.len();

    // Both directions of every pair, sorted, deduplicated: CSR rows come out
    // sorted by internal id without a per-row sort pass.
    let mut directed = Vec::with_capacity(graph.edges.len() * 2);
    for e in &graph.edges {
        if e.t <= t0 {
            let ui = index.internal(e.u).expect("edge endpoint indexed");
            let vi = index.internal(e.v).expect("edge endpoint indexed");
            directed.push((ui, vi));
            directed.push((vi, ui));
        }
    }
    directed.sort_unstable();
    directed.dedup();

    let mut offsets = vec![0usize; n + 1];
    for &(u, _) in &directed {
        offsets[u as usize + 1] += 1;
    }
    for i in 1..offsets.len() {
        offsets[i] += offsets[i - 1];
    }
    let adj: Vec<u32> = directed.iter().map(|&(_, v)| v).collect();
    let max_degree = (0..n)
        .map(|u| offsets[u + 1] - offsets[u])
        .max()
        .unwrap_or(0);

    Snapshot {
        index,
        offsets,
        adj,
        max_degree,
        t0,
    }
}

impl Snapshot {
    /// Vertex count (includes vertices with no edge at `t0`).
    pub fn vertex_count(&self) -> usize {
        self.index.len()
    }

    /// Unique undirected edge count.
    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn cutoff(&self) -> i64 {
        self.t0
    }

    pub fn contains(&self, u: VertexId) -> bool {
        self.index.int.contains_key(&u.0)
    }

    /// Sorted neighbor list of `u` (ascending external id).
    pub fn neighbors(&self, u: VertexId) -> Result<impl Iterator<Item = VertexId> + '_> {
        let ui = self.index.internal(u)?;
        Ok(self.adj_of(ui).iter().map(move |&v| self.index.external(v)))
    }

    pub fn degree(&self, u: VertexId) -> Result<usize> {
        let ui = self.index.internal(u)?;
        Ok(self.adj_of(ui).len())
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> Result<bool> {
        let ui = self.index.internal(u)?;
        let vi = self.index.internal(v)?;
        Ok(self.has_edge_internal(ui, vi))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.index.ext.iter().map(|&id| VertexId(id))
    }

    /// Unique undirected edges as external id pairs, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.index.len() as u32).flat_map(move |u| {
            self.adj_of(u)
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (self.index.external(u), self.index.external(v)))
        })
    }

    pub(crate) fn index(&self) -> &Arc<VertexIndex> {
        &self.index
    }

    pub(crate) fn internal(&self, u: VertexId) -> Result<u32> {
        self.index.internal(u)
    }

    pub(crate) fn external(&self, u: u32) -> VertexId {
        self.index.external(u)
    }

    pub(crate) fn adj_of(&self, u: u32) -> &[u32] {
        &self.adj[self.offsets[u as usize]..self.offsets[u as usize + 1]]
    }

    pub(crate) fn degree_internal(&self, u: u32) -> usize {
        self.offsets[u as usize + 1] - self.offsets[u as usize]
    }

    pub(crate) fn has_edge_internal(&self, u: u32, v: u32) -> bool {
        self.adj_of(u).binary_search(&v).is_ok()
    }

    /// Structural fingerprint of the CSR arrays, used by determinism checks.
    pub fn structural_digest(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut mix = |x: u64| {
            h ^= x;
            h = h.wrapping_mul(0x100000001b3);
        };
        mix(self.index.len() as u64);
        for &o in &self.offsets {
            mix(o as u64);
        }
        for &v in &self.adj {
            mix(v as u64);
        }
        h
    }

    /// Snapshot stats for the `ingest-stats` JSON output.
    pub fn stats(&self, dropped_self_loops: usize) -> SnapshotStats {
        SnapshotStats {
            n: self.vertex_count(),
            m: self.edge_count(),
            max_degree: self.max_degree,
            dropped_self_loops,
        }
    }
}

/// JSON payload for snapshot statistics.
#[derive(Debug, Serialize)]
pub struct SnapshotStats {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub dropped_self_loops: usize,
}

/// Pairs first seen strictly after `t_start` and no later than `t_end`.
#[derive(Debug)]
pub struct ObservationWindow {
    t_start: i64,
    t_end: i64,
    new_edges: BTreeSet<(u32, u32)>,
    index: Arc<VertexIndex>,
}

/// Collects the deduplicated pairs with an occurrence in `(t0, t_end]` that
/// are absent from `snap`. `snap` must be the snapshot of `graph` at `t0`.
pub fn window_edges(
    graph: &TemporalGraph,
    snap: &Snapshot,
    t0: i64,
    t_end: i64,
) -> Result<ObservationWindow> {
    if t_end <= t0 {
        return Err(Error::InvalidArgument(format!(
            "t_end ({t_end}) must be greater than t0 ({t0})"
        )));
    }
    let index = Arc::clone(graph.index());
    let mut new_edges = BTreeSet::new();
    for e in &graph.edges {
        if e.t > t0 && e.t <= t_end {
            let ui = index.internal(e.u).expect("edge endpoint indexed");
            let vi = index.internal(e.v).expect("edge endpoint indexed");
            let pair = (ui.min(vi), ui.max(vi));
            if !snap.has_edge_internal(pair.0, pair.1) {
                new_edges.insert(pair);
            }
        }
    }
    Ok(ObservationWindow {
        t_start: t0,
        t_end,
        new_edges,
        index,
    })
}

impl ObservationWindow {
    pub fn t_start(&self) -> i64 {
        self.t_start
    }

    pub fn t_end(&self) -> i64 {
        self.t_end
    }

    pub fn new_edge_count(&self) -> usize {
        self.new_edges.len()
    }

    /// New pairs as external ids, ascending by internal pair.
    pub fn new_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.new_edges
            .iter()
            .map(|&(u, v)| (self.index.external(u), self.index.external(v)))
    }

    pub fn contains(&self, u: VertexId, v: VertexId) -> bool {
        match (self.index.internal(u), self.index.internal(v)) {
            (Ok(ui), Ok(vi)) => self.contains_internal(ui, vi),
            _ => false,
        }
    }

    pub(crate) fn contains_internal(&self, u: u32, v: u32) -> bool {
        self.new_edges.contains(&(u.min(v), u.max(v)))
    }

    pub(crate) fn pairs_internal(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.new_edges.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn load(text: &str) -> TemporalGraph {
        load_edge_list(Cursor::new(text)).unwrap()
    }

    #[test]
    fn loads_plain_edge_list() {
        let g = load("1 2 10\n2 3 11");
        assert_eq!(g.temporal_edge_count(), 2);
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.dropped_self_loops(), 0);
        assert_eq!(g.lines_read(), 2);
    }

    #[test]
    fn drops_and_counts_self_loops() {
        let g = load("1 1 5");
        assert_eq!(g.temporal_edge_count(), 0);
        assert_eq!(g.dropped_self_loops(), 1);
        assert_eq!(g.vertex_count(), 1);
    }

    #[test]
    fn keeps_undirected_duplicates_in_temporal_graph() {
        let g = load("1 2 10\n2 1 12");
        assert_eq!(g.temporal_edge_count(), 2);
        let snap = snapshot_at(&g, 100);
        assert_eq!(snap.edge_count(), 1);
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let g = load("# header\n\n1 2 3\n  # indented comment\n");
        assert_eq!(g.temporal_edge_count(), 1);
        assert_eq!(g.lines_read(), 1);
    }

    #[test]
    fn rejects_malformed_lines_with_line_number() {
        let err = load_edge_list(Cursor::new("1 2 3\n4 five 6")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        let err = load_edge_list(Cursor::new("1 2")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = load_edge_list(Cursor::new("1 2 3 4")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_negative_ids_and_timestamps() {
        assert!(matches!(
            load_edge_list(Cursor::new("-1 2 3")).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
        assert!(matches!(
            load_edge_list(Cursor::new("1 2 -3")).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn accepts_full_u64_id_range() {
        let g = load(&format!("{} 2 1", u64::MAX));
        assert_eq!(g.vertex_count(), 2);
        let snap = snapshot_at(&g, 10);
        assert_eq!(snap.degree(VertexId(u64::MAX)).unwrap(), 1);
    }

    #[test]
    fn snapshot_filters_by_cutoff() {
        let g = load("1 2 10\n2 3 20");
        let snap = snapshot_at(&g, 15);
        assert_eq!(snap.edge_count(), 1);
        assert!(snap.has_edge(VertexId(1), VertexId(2)).unwrap());
        assert!(!snap.has_edge(VertexId(2), VertexId(3)).unwrap());
    }

    #[test]
    fn snapshot_collapses_parallel_edges() {
        let g = load("1 2 10\n1 2 5");
        let snap = snapshot_at(&g, 10);
        assert_eq!(snap.edge_count(), 1);
        assert_eq!(snap.degree(VertexId(1)).unwrap(), 1);
    }

    #[test]
    fn snapshot_before_all_edges_is_empty_but_keeps_vertices() {
        let g = load("1 2 10\n2 3 20");
        let snap = snapshot_at(&g, 5);
        assert_eq!(snap.vertex_count(), 3);
        assert_eq!(snap.edge_count(), 0);
        assert_eq!(snap.max_degree(), 0);
    }

    #[test]
    fn neighbors_sorted_and_empty_for_isolated() {
        let g = load("1 2 1\n1 3 1\n2 3 1\n9 9 1");
        let snap = snapshot_at(&g, 10);
        let n1: Vec<u64> = snap.neighbors(VertexId(1)).unwrap().map(|v| v.0).collect();
        assert_eq!(n1, vec![2, 3]);
        let n9: Vec<u64> = snap.neighbors(VertexId(9)).unwrap().map(|v| v.0).collect();
        assert!(n9.is_empty());
    }

    #[test]
    fn star_neighbors_sorted_regardless_of_file_order() {
        let g = load("1 9 1\n1 2 1\n1 5 1");
        let snap = snapshot_at(&g, 10);
        let n: Vec<u64> = snap.neighbors(VertexId(1)).unwrap().map(|v| v.0).collect();
        assert_eq!(n, vec![2, 5, 9]);
    }

    #[test]
    fn degree_and_has_edge_on_path() {
        let g = load("1 2 1\n2 3 1");
        let snap = snapshot_at(&g, 10);
        assert_eq!(snap.degree(VertexId(2)).unwrap(), 2);
        assert!(!snap.has_edge(VertexId(1), VertexId(3)).unwrap());
        assert_eq!(snap.max_degree(), 2);
    }

    #[test]
    fn empty_graph_max_degree_zero() {
        let g = load("");
        let snap = snapshot_at(&g, 0);
        assert_eq!(snap.max_degree(), 0);
        assert_eq!(snap.vertex_count(), 0);
    }

    #[test]
    fn unknown_vertex_is_a_lookup_error() {
        let g = load("1 2 1");
        let snap = snapshot_at(&g, 10);
        assert!(matches!(
            snap.degree(VertexId(77)).unwrap_err(),
            Error::UnknownVertex(VertexId(77))
        ));
    }

    #[test]
    fn window_excludes_observed_pairs() {
        let g = load("1 2 10\n3 4 20");
        let snap = snapshot_at(&g, 10);
        let w = window_edges(&g, &snap, 10, 30).unwrap();
        let pairs: Vec<(u64, u64)> = w.new_edges().map(|(a, b)| (a.0, b.0)).collect();
        assert_eq!(pairs, vec![(3, 4)]);
    }

    #[test]
    fn window_dedups_pairs() {
        let g = load("5 6 12\n5 6 18");
        let snap = snapshot_at(&g, 10);
        let w = window_edges(&g, &snap, 10, 20).unwrap();
        assert_eq!(w.new_edge_count(), 1);
    }

    #[test]
    fn empty_window_allowed() {
        let g = load("1 2 10");
        let snap = snapshot_at(&g, 10);
        let w = window_edges(&g, &snap, 10, 20).unwrap();
        assert_eq!(w.new_edge_count(), 0);
    }

    #[test]
    fn window_rejects_bad_interval() {
        let g = load("1 2 10");
        let snap = snapshot_at(&g, 10);
        assert!(matches!(
            window_edges(&g, &snap, 10, 10).unwrap_err(),
            Error::InvalidArgument(_)
        ));
    }

    #[test]
    fn adjacency_is_symmetric_and_degrees_sum_to_twice_edges() {
        let g = load("1 2 1\n1 3 1\n2 3 2\n3 4 3\n2 5 4\n7 8 5");
        let snap = snapshot_at(&g, 10);
        let mut degree_sum = 0;
        for u in snap.vertices() {
            degree_sum += snap.degree(u).unwrap();
            for v in snap.neighbors(u).unwrap().collect::<Vec<_>>() {
                assert!(snap.has_edge(v, u).unwrap(), "asymmetry at {u}-{v}");
            }
        }
        assert_eq!(degree_sum, 2 * snap.edge_count());
    }

    #[test]
    fn snapshot_and_window_edge_sets_are_disjoint() {
        let g = load("1 2 1\n2 3 5\n1 3 12\n4 5 15\n2 3 14");
        let snap = snapshot_at(&g, 10);
        let w = window_edges(&g, &snap, 10, 20).unwrap();
        for (u, v) in w.new_edges() {
            assert!(!snap.has_edge(u, v).unwrap());
        }
        assert_eq!(w.new_edge_count(), 2); // (1,3) and (4,5); (2,3) already observed
    }

    #[test]
    fn loading_twice_is_byte_deterministic() {
        let text = "9 1 4\n1 2 1\n5 2 2\n2 9 3\n";
        let a = snapshot_at(&load(text), 10);
        let b = snapshot_at(&load(text), 10);
        assert_eq!(a, b);
        assert_eq!(a.structural_digest(), b.structural_digest());
    }
}
