//! Weighted undirected multigraph with positive integer weights.
//!
//! Vertices are dense `0..n` indices. Parallel edges are kept throughout
//! (contraction never merges them); self-loops are dropped on construction
//! and on contraction. All cut arithmetic is exact `i64`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::prefix::{Weight, INF};

/// Hard cap on the total edge weight of a parsed graph. Keeps every
/// reachable sum (cuts, path aggregates, masked weights) far below the
/// `INF` masking sentinel, so `x + INF` never wraps.
pub const MAX_TOTAL_WEIGHT: Weight = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub w: Weight,
}

/// Undirected weighted multigraph.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    /// Per-vertex list of (neighbor, weight, edge id); each edge appears
    /// once in each endpoint's list.
    adj: Vec<Vec<(u32, Weight, u32)>>,
}

impl Graph {
    /// Build a graph from an edge list. Self-loops are dropped; weights
    /// must be positive.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32, Weight)>) -> Result<Self> {
        let mut kept = Vec::new();
        for (u, v, w) in edges {
            if w <= 0 {
                return Err(Error::NonPositiveWeight { line: 0, weight: w });
            }
            assert!((u as usize) < n && (v as usize) < n, "edge endpoint out of range");
            if u == v {
                continue;
            }
            kept.push(Edge { u, v, w });
        }
        let total: i128 = kept.iter().map(|e| e.w as i128).sum();
        if total > MAX_TOTAL_WEIGHT as i128 {
            return Err(Error::WeightOverflow { total, max: MAX_TOTAL_WEIGHT });
        }
        let mut adj = vec![Vec::new(); n];
        for (id, e) in kept.iter().enumerate() {
            adj[e.u as usize].push((e.v, e.w, id as u32));
            adj[e.v as usize].push((e.u, e.w, id as u32));
        }
        Ok(Graph { n, edges: kept, adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> Edge {
        self.edges[id as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[(u32, Weight, u32)] {
        &self.adj[v as usize]
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn weighted_degree(&self, v: u32) -> Weight {
        self.adj[v as usize].iter().map(|&(_, w, _)| w).sum()
    }

    /// Connected component id per vertex, numbered in order of first
    /// appearance, plus the component count.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let mut comp = vec![u32::MAX; self.n];
        let mut count = 0u32;
        let mut queue = Vec::new();
        for s in 0..self.n {
            if comp[s] != u32::MAX {
                continue;
            }
            comp[s] = count;
            queue.push(s as u32);
            while let Some(u) = queue.pop() {
                for &(v, _, _) in &self.adj[u as usize] {
                    if comp[v as usize] == u32::MAX {
                        comp[v as usize] = count;
                        queue.push(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count as usize)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().1 == 1
    }
}

/// Vertex subset represented as a bitset over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    bits: Vec<u64>,
    n: usize,
    count: usize,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet { bits: vec![0; n.div_ceil(64)], n, count: 0 }
    }

    pub fn from_iter(n: usize, vs: impl IntoIterator<Item = u32>) -> Self {
        let mut s = Self::new(n);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn insert(&mut self, v: u32) {
        let (w, b) = (v as usize / 64, v as usize % 64);
        if self.bits[w] & (1 << b) == 0 {
            self.bits[w] |= 1 << b;
            self.count += 1;
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.bits[v as usize / 64] & (1 << (v as usize % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn complement(&self) -> Self {
        let mut out = Self::new(self.n);
        for v in 0..self.n as u32 {
            if !self.contains(v) {
                out.insert(v);
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.n as u32).filter(move |&v| self.contains(v))
    }
}

/// A cut: one side of the vertex partition plus its crossing weight.
#[derive(Clone, Debug)]
pub struct Cut {
    pub side: VertexSet,
    pub value: Weight,
}

/// Total weight of edges with exactly one endpoint in `side`.
pub fn cut_value(g: &Graph, side: &VertexSet) -> Result<Weight> {
    if side.is_empty() || side.len() >= g.vertex_count() {
        return Err(Error::ImproperSide);
    }
    Ok(g.edges()
        .iter()
        .filter(|e| side.contains(e.u) != side.contains(e.v))
        .map(|e| e.w)
        .sum())
}

/// Relabel vertices through `vertex_map` (old id -> new id, surjective onto
/// `0..new_n`), dropping self-loops and keeping parallel edges. Also
/// returns, per new vertex, the list of old vertices mapped onto it.
pub fn contract(g: &Graph, vertex_map: &[u32], new_n: usize) -> (Graph, Vec<Vec<u32>>) {
    assert_eq!(vertex_map.len(), g.vertex_count());
    let mut groups = vec![Vec::new(); new_n];
    for (old, &new) in vertex_map.iter().enumerate() {
        groups[new as usize].push(old as u32);
    }
    let edges = g
        .edges()
        .iter()
        .map(|e| (vertex_map[e.u as usize], vertex_map[e.v as usize], e.w))
        .filter(|&(u, v, _)| u != v);
    let contracted = Graph::from_edges(new_n, edges).expect("weights preserved by contraction");
    (contracted, groups)
}

/// Parsed edge-list document: the graph plus the token <-> index mapping.
#[derive(Clone, Debug)]
pub struct ParsedGraph {
    pub graph: Graph,
    /// Dense index -> original token.
    pub tokens: Vec<String>,
    /// Original token -> dense index.
    pub index_of: HashMap<String, u32>,
}

/// Parse an edge-list document: one edge per line `u v w`, `#` comments and
/// blank lines ignored, vertex tokens arbitrary. Self-loops are dropped.
pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    let mut tokens: Vec<String> = Vec::new();
    let mut index_of: HashMap<String, u32> = HashMap::new();
    let mut edges: Vec<(u32, u32, Weight)> = Vec::new();
    let intern = |tok: &str, tokens: &mut Vec<String>, index_of: &mut HashMap<String, u32>| {
        if let Some(&i) = index_of.get(tok) {
            return i;
        }
        let i = tokens.len() as u32;
        tokens.push(tok.to_string());
        index_of.insert(tok.to_string(), i);
        i
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (u, v, w) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(v), Some(w), None) => (u, v, w),
            _ => {
                return Err(Error::MalformedLine { line: lineno + 1, text: raw.to_string() });
            }
        };
        let w: Weight = w.parse().map_err(|_| Error::MalformedLine {
            line: lineno + 1,
            text: raw.to_string(),
        })?;
        if w <= 0 || w >= INF {
            return Err(Error::NonPositiveWeight { line: lineno + 1, weight: w });
        }
        let ui = intern(u, &mut tokens, &mut index_of);
        let vi = intern(v, &mut tokens, &mut index_of);
        edges.push((ui, vi, w));
    }
    if tokens.len() < 2 {
        return Err(Error::TooFewVertices);
    }
    let graph = Graph::from_edges(tokens.len(), edges)?;
    Ok(ParsedGraph { graph, tokens, index_of })
}

/// The six-vertex example graph used across the test suites: minimum cut 2
/// with side {G, A, C}.
#[cfg(any(test, feature = "testutil"))]
pub fn example_graph() -> ParsedGraph {
    parse_graph(
        "G C 3\nA G 3\nA C 2\nQ A 1\nC P 1\nQ P 1\nQ E 1\nP E 2\n",
    )
    .expect("example graph parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn side_of(p: &ParsedGraph, toks: &[&str]) -> VertexSet {
        VertexSet::from_iter(
            p.graph.vertex_count(),
            toks.iter().map(|t| p.index_of[*t]),
        )
    }

    #[test]
    fn parse_minimal() {
        let p = parse_graph("a b 1\nb c 1").unwrap();
        assert_eq!(p.graph.vertex_count(), 3);
        assert_eq!(p.graph.edge_count(), 2);
        assert_eq!(p.tokens, vec!["a", "b", "c"]);
    }

    #[test]
    fn parse_example_graph() {
        let p = example_graph();
        assert_eq!(p.graph.vertex_count(), 6);
        assert_eq!(p.graph.edge_count(), 8);
    }

    #[test]
    fn parse_rejects_nonpositive_weight() {
        assert!(matches!(
            parse_graph("a b 0"),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            parse_graph("a b -3\nb c 1"),
            Err(Error::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn parse_rejects_malformed_and_tiny() {
        assert!(matches!(parse_graph("a b"), Err(Error::MalformedLine { .. })));
        assert!(matches!(parse_graph("a b x"), Err(Error::MalformedLine { .. })));
        assert!(matches!(parse_graph("# nothing\n"), Err(Error::TooFewVertices)));
        assert!(matches!(parse_graph("a a 3"), Err(Error::TooFewVertices)));
    }

    #[test]
    fn parse_handles_comments_and_self_loops() {
        let p = parse_graph("# header\na b 2 # trailing\n\nc c 5\na c 1\n").unwrap();
        assert_eq!(p.graph.vertex_count(), 3);
        // self-loop c-c dropped
        assert_eq!(p.graph.edge_count(), 2);
    }

    #[test]
    fn cut_value_example_side() {
        let p = example_graph();
        let side = side_of(&p, &["G", "A", "C"]);
        assert_eq!(cut_value(&p.graph, &side).unwrap(), 2);
        assert_eq!(cut_value(&p.graph, &side.complement()).unwrap(), 2);
    }

    #[test]
    fn cut_value_singleton_is_weighted_degree() {
        let p = example_graph();
        for v in 0..p.graph.vertex_count() as u32 {
            let side = VertexSet::from_iter(p.graph.vertex_count(), [v]);
            assert_eq!(
                cut_value(&p.graph, &side).unwrap(),
                p.graph.weighted_degree(v)
            );
        }
    }

    #[test]
    fn cut_value_rejects_improper_sides() {
        let p = example_graph();
        let empty = VertexSet::new(p.graph.vertex_count());
        assert!(cut_value(&p.graph, &empty).is_err());
        assert!(cut_value(&p.graph, &empty.complement()).is_err());
    }

    #[test]
    fn contract_identity_preserves_graph() {
        let p = example_graph();
        let map: Vec<u32> = (0..p.graph.vertex_count() as u32).collect();
        let (h, groups) = contract(&p.graph, &map, p.graph.vertex_count());
        assert_eq!(h.edge_count(), p.graph.edge_count());
        assert!(groups.iter().all(|g| g.len() == 1));
    }

    #[test]
    fn contract_triangle_merge() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        // merge a=0 and b=1
        let (h, groups) = contract(&g, &[0, 0, 1], 2);
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 2); // parallel pair kept, loop dropped
        assert!(h.edges().iter().all(|e| e.w == 1));
        assert_eq!(groups[0], vec![0, 1]);
    }

    #[test]
    fn contract_preserves_cut_values_for_unseparated_sides() {
        // Merge {Q, E} in the example graph; any side that keeps Q and E
        // together has the same crossing weight before and after.
        let p = example_graph();
        let g = &p.graph;
        let n = g.vertex_count();
        let (q, e) = (p.index_of["Q"], p.index_of["E"]);
        let mut map = vec![0u32; n];
        let mut next = 0u32;
        for v in 0..n as u32 {
            if v == e {
                continue;
            }
            map[v as usize] = next;
            next += 1;
        }
        map[e as usize] = map[q as usize];
        let (h, groups) = contract(g, &map, next as usize);
        for mask in 1..(1u32 << (n - 1)) {
            let side = VertexSet::from_iter(n, (0..n as u32).filter(|&v| mask >> v & 1 == 1));
            if side.contains(q) != side.contains(e) {
                continue;
            }
            let new_side = VertexSet::from_iter(
                h.vertex_count(),
                (0..h.vertex_count() as u32)
                    .filter(|&nv| side.contains(groups[nv as usize][0])),
            );
            if new_side.is_empty() || new_side.len() == h.vertex_count() {
                continue;
            }
            assert_eq!(
                cut_value(g, &side).unwrap(),
                cut_value(&h, &new_side).unwrap()
            );
        }
    }

    #[test]
    fn components_counts() {
        let g = Graph::from_edges(5, [(0, 1, 1), (2, 3, 1)]).unwrap();
        let (comp, count) = g.components();
        assert_eq!(count, 3);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[2], comp[3]);
        assert_ne!(comp[0], comp[4]);
        assert!(!g.is_connected());
    }

    #[test]
    fn contract_preserves_cuts_on_random_small_graphs() {
        // all sides, all single merges, n <= 8
        use rand::Rng as _;
        let mut rng = crate::rng::stream_rng(6, 0);
        for _ in 0..20 {
            let n = rng.gen_range(3..=8usize);
            let g = crate::oracle::random_connected_graph(n, rng.gen_range(0..6), 9, &mut rng);
            let a = rng.gen_range(0..n as u32);
            let b = (a + 1 + rng.gen_range(0..n as u32 - 1)) % n as u32;
            let (lo, hi) = (a.min(b), a.max(b));
            let mut map = vec![0u32; n];
            let mut next = 0u32;
            for v in 0..n as u32 {
                if v == hi {
                    continue;
                }
                map[v as usize] = next;
                next += 1;
            }
            map[hi as usize] = map[lo as usize];
            let (h, groups) = contract(&g, &map, next as usize);
            for mask in 1..(1u32 << n) - 1 {
                let side =
                    VertexSet::from_iter(n, (0..n as u32).filter(|&v| mask >> v & 1 == 1));
                if side.contains(lo) != side.contains(hi) {
                    continue;
                }
                let new_side = VertexSet::from_iter(
                    h.vertex_count(),
                    (0..h.vertex_count() as u32)
                        .filter(|&nv| side.contains(groups[nv as usize][0])),
                );
                assert_eq!(
                    cut_value(&g, &side).unwrap(),
                    cut_value(&h, &new_side).unwrap()
                );
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn prop_cut_value_symmetric_under_complement(seed in 0u64..300) {
            use rand::Rng as _;
            let mut rng = crate::rng::stream_rng(seed, 7);
            let n = rng.gen_range(2..=10usize);
            let g = crate::oracle::random_connected_graph(n, rng.gen_range(0..8), 9, &mut rng);
            let mask = rng.gen_range(1..(1u32 << n) - 1);
            let side = VertexSet::from_iter(n, (0..n as u32).filter(|&v| mask >> v & 1 == 1));
            let direct = cut_value(&g, &side).unwrap();
            proptest::prop_assert_eq!(direct, cut_value(&g, &side.complement()).unwrap());
            // edge-by-edge summation oracle via adjacency lists
            let by_adjacency: Weight = (0..n as u32)
                .filter(|&v| side.contains(v))
                .flat_map(|v| g.neighbors(v).iter().copied())
                .filter(|&(u, _, _)| !side.contains(u))
                .map(|(_, w, _)| w)
                .sum();
            proptest::prop_assert_eq!(direct, by_adjacency);
        }
    }
}
