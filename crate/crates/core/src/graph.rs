//! Immutable simple-graph representation and elementary queries.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Dense 0-based node index.
pub type NodeId = u32;

/// A simple graph (no self-loops, no parallel edges), directed or undirected.
///
/// Neighbor lists are sorted ascending so iteration order is reproducible;
/// the deterministic tie-breaking in the tourist walk relies on this.
/// Undirected edges appear in both endpoint lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    directed: bool,
    adjacency: Vec<Vec<NodeId>>,
}

/// Result of [`build_graph`]: the sanitized graph plus what was dropped.
#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub graph: Graph,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
}

/// Build a graph from an edge list, dropping self-loops and duplicates.
///
/// Node ids must lie in `[0, n)`; an out-of-range edge is an error naming the
/// offending pair.
pub fn build_graph(n: usize, edges: &[(NodeId, NodeId)], directed: bool) -> Result<BuildOutcome> {
    let mut adjacency = vec![Vec::new(); n];
    let mut self_loops = 0usize;
    for &(u, v) in edges {
        if u as usize >= n || v as usize >= n {
            return Err(Error::EdgeOutOfRange { u, v, n });
        }
        if u == v {
            self_loops += 1;
            continue;
        }
        adjacency[u as usize].push(v);
        if !directed {
            adjacency[v as usize].push(u);
        }
    }
    let mut duplicate_entries = 0usize;
    for list in &mut adjacency {
        list.sort_unstable();
        let before = list.len();
        list.dedup();
        duplicate_entries += before - list.len();
    }
    // For undirected graphs each duplicate input edge was inserted twice.
    let dropped_duplicates = if directed {
        duplicate_entries
    } else {
        duplicate_entries / 2
    };
    Ok(BuildOutcome {
        graph: Graph {
            directed,
            adjacency,
        },
        dropped_self_loops: self_loops,
        dropped_duplicates,
    })
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.adjacency[i as usize]
    }

    pub fn out_degree(&self, i: NodeId) -> usize {
        self.adjacency[i as usize].len()
    }

    /// Number of edges (undirected) or arcs (directed).
    pub fn edge_count(&self) -> usize {
        let entries: usize = self.adjacency.iter().map(Vec::len).sum();
        if self.directed {
            entries
        } else {
            entries / 2
        }
    }

    /// All edges in canonical order: `u < v` for undirected graphs, every arc
    /// for directed ones, sorted lexicographically.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adjacency.iter().enumerate() {
            let u = u as NodeId;
            for &v in list {
                if self.directed || u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// Induced subgraph on the largest weakly-connected component, re-indexed
    /// densely. Ties between equally sized components go to the one holding
    /// the smallest original node id; relative id order is preserved.
    pub fn largest_connected_component(&self) -> Graph {
        let n = self.node_count();
        if n == 0 {
            return self.clone();
        }
        // Weak connectivity: for directed graphs walk arcs in both directions.
        let mut reverse: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        if self.directed {
            for (u, list) in self.adjacency.iter().enumerate() {
                for &v in list {
                    reverse[v as usize].push(u as NodeId);
                }
            }
        }
        let mut component = vec![usize::MAX; n];
        let mut members: Vec<Vec<NodeId>> = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if component[s] != usize::MAX {
                continue;
            }
            let id = members.len();
            let mut nodes = Vec::new();
            component[s] = id;
            stack.push(s as NodeId);
            while let Some(u) = stack.pop() {
                nodes.push(u);
                for &v in &self.adjacency[u as usize] {
                    if component[v as usize] == usize::MAX {
                        component[v as usize] = id;
                        stack.push(v);
                    }
                }
                if self.directed {
                    for &v in &reverse[u as usize] {
                        if component[v as usize] == usize::MAX {
                            component[v as usize] = id;
                            stack.push(v);
                        }
                    }
                }
            }
            nodes.sort_unstable();
            members.push(nodes);
        }
        // Components are discovered in order of their smallest node id, so
        // max_by_key keeps the first (smallest-id) component among ties.
        let best = members
            .iter()
            .enumerate()
            .max_by_key(|(idx, nodes)| (nodes.len(), usize::MAX - idx))
            .map(|(idx, _)| idx)
            .unwrap();
        let keep = &members[best];
        let mut remap = vec![NodeId::MAX; n];
        for (new_id, &old_id) in keep.iter().enumerate() {
            remap[old_id as usize] = new_id as NodeId;
        }
        let adjacency = keep
            .iter()
            .map(|&old| {
                self.adjacency[old as usize]
                    .iter()
                    .map(|&v| remap[v as usize])
                    .collect()
            })
            .collect();
        Graph {
            directed: self.directed,
            adjacency,
        }
    }
}

/// Parse the plain edge-list text format.
///
/// `#` lines are comments. An optional first non-comment line
/// `N <n> <directed|undirected>` fixes the node count and orientation;
/// without it, `n = max id + 1` and the graph is undirected. Every other
/// line is a whitespace-separated `u v` pair.
pub fn parse_edge_list(text: &str, origin: &Path) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut directed = false;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut saw_header_slot = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().unwrap();
        if !saw_header_slot {
            saw_header_slot = true;
            if first == "N" {
                let count = tokens
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(origin, line_no, "bad node count in header"))?;
                directed = match tokens.next() {
                    Some("directed") => true,
                    Some("undirected") | None => false,
                    Some(other) => {
                        return Err(Error::parse(
                            origin,
                            line_no,
                            format!("expected directed|undirected, got {other:?}"),
                        ))
                    }
                };
                n = Some(count);
                continue;
            }
        }
        let u = first
            .parse::<NodeId>()
            .map_err(|_| Error::parse(origin, line_no, format!("bad node id {first:?}")))?;
        let v_tok = tokens
            .next()
            .ok_or_else(|| Error::parse(origin, line_no, "missing second endpoint"))?;
        let v = v_tok
            .parse::<NodeId>()
            .map_err(|_| Error::parse(origin, line_no, format!("bad node id {v_tok:?}")))?;
        if tokens.next().is_some() {
            return Err(Error::parse(origin, line_no, "trailing tokens after edge"));
        }
        edges.push((u, v));
    }
    let n = n.unwrap_or_else(|| {
        edges
            .iter()
            .map(|&(u, v)| u.max(v) as usize + 1)
            .max()
            .unwrap_or(0)
    });
    let outcome = build_graph(n, &edges, directed)?;
    Ok(outcome.graph)
}

/// Serialize a graph in the edge-list text format, always with a header so
/// isolated nodes and orientation survive a round trip.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let orientation = if g.is_directed() {
        "directed"
    } else {
        "undirected"
    };
    writeln!(out, "N {} {}", g.node_count(), orientation).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::path::PathBuf;

    fn path() -> PathBuf {
        PathBuf::from("<test>")
    }

    #[test]
    fn path_graph_degrees() {
        let g = build_graph(3, &[(0, 1), (1, 2)], false).unwrap().graph;
        let degrees: Vec<usize> = (0..3).map(|i| g.out_degree(i)).collect();
        assert_eq!(degrees, vec![1, 2, 1]);
    }

    #[test]
    fn dedup_and_self_loop_drop() {
        let out = build_graph(2, &[(0, 1), (0, 1), (1, 1)], false).unwrap();
        assert_eq!(out.graph.edge_count(), 1);
        assert_eq!(out.dropped_duplicates, 1);
        assert_eq!(out.dropped_self_loops, 1);
    }

    #[test]
    fn directed_cycle_out_degrees() {
        let g = build_graph(3, &[(0, 1), (1, 2), (2, 0)], true).unwrap().graph;
        assert!((0..3).all(|i| g.out_degree(i) == 1));
    }

    #[test]
    fn out_of_range_edge_is_reported() {
        let err = build_graph(2, &[(0, 5)], false).unwrap_err();
        assert!(err.to_string().contains("(0, 5)"));
    }

    #[test]
    fn lcc_tie_break_prefers_smallest_id() {
        let g = build_graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], false)
            .unwrap()
            .graph;
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.node_count(), 3);
        assert_eq!(lcc.edges(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn lcc_keeps_strictly_largest() {
        let g = build_graph(5, &[(0, 1), (2, 3), (3, 4), (4, 2)], false)
            .unwrap()
            .graph;
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.node_count(), 3);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = build_graph(4, &[(0, 1), (1, 2), (2, 3)], false).unwrap().graph;
        assert_eq!(g.largest_connected_component(), g);
    }

    #[test]
    fn lcc_single_node() {
        let g = build_graph(1, &[], false).unwrap().graph;
        assert_eq!(g.largest_connected_component().node_count(), 1);
    }

    #[test]
    fn lcc_is_idempotent() {
        let g = build_graph(7, &[(0, 1), (2, 3), (3, 4), (5, 6)], false)
            .unwrap()
            .graph;
        let once = g.largest_connected_component();
        assert_eq!(once.largest_connected_component(), once);
    }

    #[test]
    fn directed_weak_component() {
        // Arcs 0->1, 2->1: weakly connected as one component of size 3.
        let g = build_graph(4, &[(0, 1), (2, 1)], true).unwrap().graph;
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.node_count(), 3);
        assert!(lcc.is_directed());
    }

    #[test]
    fn header_roundtrip_with_isolated_nodes() {
        let g = build_graph(5, &[(1, 3)], false).unwrap().graph;
        let text = write_edge_list(&g);
        let back = parse_edge_list(&text, &path()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn headerless_parse_infers_size() {
        let g = parse_edge_list("# comment\n0 1\n1 2\n", &path()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert!(!g.is_directed());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_edge_list("0 1\n0 x\n", &path()).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    proptest! {
        #[test]
        fn degree_sum_is_twice_edge_count(
            edges in prop::collection::vec((0u32..20, 0u32..20), 0..60)
        ) {
            let g = build_graph(20, &edges, false).unwrap().graph;
            let degree_sum: usize = (0..20).map(|i| g.out_degree(i)).sum();
            prop_assert_eq!(degree_sum, 2 * g.edge_count());
        }

        #[test]
        fn build_then_enumerate_is_dedup_of_input(
            edges in prop::collection::vec((0u32..15, 0u32..15), 0..40)
        ) {
            let g = build_graph(15, &edges, false).unwrap().graph;
            let mut expected: Vec<(u32, u32)> = edges
                .iter()
                .filter(|(u, v)| u != v)
                .map(|&(u, v)| (u.min(v), u.max(v)))
                .collect();
            expected.sort_unstable();
            expected.dedup();
            prop_assert_eq!(g.edges(), expected);
        }

        #[test]
        fn edge_list_roundtrip(
            edges in prop::collection::vec((0u32..12, 0u32..12), 0..30),
            directed in proptest::bool::ANY
        ) {
            let g = build_graph(12, &edges, directed).unwrap().graph;
            let back = parse_edge_list(&write_edge_list(&g), &path()).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
