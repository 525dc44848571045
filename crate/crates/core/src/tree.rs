//! Rooted spanning trees: parent/depth/children arrays, Euler-tour
//! descendant intervals, lowest common ancestors, and minimum spanning
//! tree construction.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::prefix::Weight;

/// Directed rooted tree over dense vertex ids.
///
/// `euler_first`/`euler_last` are preorder entry/exit indices; `x` is a
/// descendant of `v` iff `euler_first[v] <= euler_first[x] <= euler_last[v]`,
/// and the descendants of `v` are a contiguous run of `preorder`.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub root: u32,
    pub parent: Vec<u32>,
    pub children: Vec<Vec<u32>>,
    pub depth: Vec<u32>,
    pub euler_first: Vec<u32>,
    pub euler_last: Vec<u32>,
    /// Vertices in preorder; `preorder[euler_first[v]] == v`.
    pub preorder: Vec<u32>,
}

impl RootedTree {
    /// Build from a parent array (`parent[root] == root`). Children lists
    /// keep ascending vertex order, which fixes the preorder.
    pub fn from_parents(root: u32, parent: Vec<u32>) -> Result<Self> {
        let n = parent.len();
        if n == 0 || parent[root as usize] != root {
            return Err(Error::InvalidTree { reason: "root must be its own parent".into() });
        }
        let mut children = vec![Vec::new(); n];
        for v in 0..n as u32 {
            if v != root {
                if parent[v as usize] as usize >= n {
                    return Err(Error::InvalidTree { reason: format!("parent of {v} out of range") });
                }
                children[parent[v as usize] as usize].push(v);
            }
        }
        let mut depth = vec![0u32; n];
        let mut euler_first = vec![0u32; n];
        let mut euler_last = vec![0u32; n];
        let mut preorder = Vec::with_capacity(n);
        let mut visited = 0usize;
        // Iterative DFS; second stack entry marks exit.
        let mut stack = vec![(root, false)];
        while let Some((v, exit)) = stack.pop() {
            if exit {
                euler_last[v as usize] = preorder.len() as u32 - 1;
                continue;
            }
            euler_first[v as usize] = preorder.len() as u32;
            preorder.push(v);
            visited += 1;
            stack.push((v, true));
            for &c in children[v as usize].iter().rev() {
                depth[c as usize] = depth[v as usize] + 1;
                stack.push((c, false));
            }
        }
        if visited != n {
            return Err(Error::InvalidTree {
                reason: format!("{} of {} vertices unreachable from root", n - visited, n),
            });
        }
        Ok(RootedTree { root, parent, children, depth, euler_first, euler_last, preorder })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// True iff `a` is an ancestor of `x` (every vertex is its own ancestor).
    pub fn is_ancestor(&self, a: u32, x: u32) -> bool {
        self.euler_first[a as usize] <= self.euler_first[x as usize]
            && self.euler_first[x as usize] <= self.euler_last[a as usize]
    }

    /// Descendants of `v` as a contiguous preorder slice.
    pub fn subtree(&self, v: u32) -> &[u32] {
        &self.preorder
            [self.euler_first[v as usize] as usize..=self.euler_last[v as usize] as usize]
    }

    pub fn subtree_set(&self, v: u32) -> VertexSet {
        VertexSet::from_iter(self.len(), self.subtree(v).iter().copied())
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.children[v as usize].is_empty()
    }

    /// Tree edges as (parent, child) pairs in child order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.len() as u32)
            .filter(move |&v| v != self.root)
            .map(move |v| (self.parent[v as usize], v))
    }
}

/// Binary-lifting LCA table for a fixed tree.
pub struct LcaTable<'a> {
    tree: &'a RootedTree,
    up: Vec<Vec<u32>>,
}

impl<'a> LcaTable<'a> {
    pub fn new(tree: &'a RootedTree) -> Self {
        let n = tree.len();
        let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let mut up = Vec::with_capacity(levels);
        up.push(tree.parent.clone());
        for k in 1..levels {
            let prev = &up[k - 1];
            let next: Vec<u32> = (0..n).map(|v| prev[prev[v] as usize]).collect();
            up.push(next);
        }
        LcaTable { tree, up }
    }

    pub fn lca(&self, mut a: u32, b: u32) -> u32 {
        let t = self.tree;
        if t.is_ancestor(a, b) {
            return a;
        }
        if t.is_ancestor(b, a) {
            return b;
        }
        // Lift a until just below the common ancestor.
        for k in (0..self.up.len()).rev() {
            let next = self.up[k][a as usize];
            if !t.is_ancestor(next, b) {
                a = next;
            }
        }
        self.up[0][a as usize]
    }
}

/// Minimum spanning tree of `g` under per-edge costs, rooted at vertex 0.
/// Kruskal with (cost, edge id) ordering, so ties are deterministic.
pub fn spanning_tree(g: &Graph, edge_cost: &[Weight]) -> Result<RootedTree> {
    tree_from_edge_ids(g, &mst_edge_ids(g, edge_cost)?)
}

/// The edge ids picked by the deterministic Kruskal run.
pub fn mst_edge_ids(g: &Graph, edge_cost: &[Weight]) -> Result<Vec<u32>> {
    assert_eq!(edge_cost.len(), g.edge_count());
    let n = g.vertex_count();
    let mut order: Vec<u32> = (0..g.edge_count() as u32).collect();
    order.sort_by_key(|&e| (edge_cost[e as usize], e));
    let mut dsu = DisjointSets::new(n);
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    for e in order {
        let edge = g.edge(e);
        if dsu.union(edge.u, edge.v) {
            chosen.push(e);
            if chosen.len() + 1 == n {
                break;
            }
        }
    }
    if chosen.len() + 1 != n {
        return Err(Error::Disconnected);
    }
    Ok(chosen)
}

/// Orient a spanning edge set into a `RootedTree` rooted at vertex 0.
pub fn tree_from_edge_ids(g: &Graph, edge_ids: &[u32]) -> Result<RootedTree> {
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for &e in edge_ids {
        let edge = g.edge(e);
        adj[edge.u as usize].push(edge.v);
        adj[edge.v as usize].push(edge.u);
    }
    let mut parent = vec![u32::MAX; n];
    parent[0] = 0;
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u as usize] {
            if parent[v as usize] == u32::MAX {
                parent[v as usize] = u;
                queue.push_back(v);
            }
        }
    }
    if parent.contains(&u32::MAX) {
        return Err(Error::Disconnected);
    }
    RootedTree::from_parents(0, parent)
}

/// Union-find with path halving and union by size.
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            self.parent[v as usize] = self.parent[self.parent[v as usize] as usize];
            v = self.parent[v as usize];
        }
        v
    }

    /// Returns false if already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::random_tree;
    use rand::Rng as _;

    #[test]
    fn path_tree_structure() {
        let t = RootedTree::from_parents(0, vec![0, 0, 1, 2]).unwrap();
        assert_eq!(t.depth, vec![0, 1, 2, 3]);
        assert_eq!(t.subtree(1), &[1, 2, 3]);
        assert!(t.is_ancestor(1, 3));
        assert!(!t.is_ancestor(3, 1));
    }

    #[test]
    fn invalid_parents_rejected() {
        assert!(RootedTree::from_parents(0, vec![1, 0]).is_err()); // root not fixed
        assert!(RootedTree::from_parents(0, vec![0, 2, 1]).is_err()); // 2-cycle unreachable
    }

    #[test]
    fn euler_descendant_test_matches_parent_walk() {
        let mut rng = crate::rng::stream_rng(3, 0);
        for _ in 0..40 {
            let n = rng.gen_range(2..=64);
            let t = random_tree(n, &mut rng);
            for a in 0..n as u32 {
                for x in 0..n as u32 {
                    let mut cur = x;
                    let mut walk = cur == a;
                    while cur != t.root {
                        cur = t.parent[cur as usize];
                        walk |= cur == a;
                    }
                    assert_eq!(t.is_ancestor(a, x), walk, "a={a} x={x}");
                }
            }
        }
    }

    #[test]
    fn lca_matches_naive() {
        let mut rng = crate::rng::stream_rng(4, 0);
        for _ in 0..30 {
            let n = rng.gen_range(2..=48);
            let t = random_tree(n, &mut rng);
            let lca = LcaTable::new(&t);
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    let mut anc = a;
                    let naive = loop {
                        if t.is_ancestor(anc, b) {
                            break anc;
                        }
                        anc = t.parent[anc as usize];
                    };
                    assert_eq!(lca.lca(a, b), naive);
                }
            }
        }
    }

    #[test]
    fn mst_on_path_is_the_path() {
        let g = Graph::from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let t = spanning_tree(&g, &[1, 1, 1]).unwrap();
        assert_eq!(t.parent, vec![0, 0, 1, 2]);
    }

    #[test]
    fn mst_triangle_skips_heaviest() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let t = spanning_tree(&g, &[1, 2, 3]).unwrap();
        // cost-3 edge (0,2) omitted: 2 hangs off 1
        assert_eq!(t.parent, vec![0, 0, 1]);
    }

    #[test]
    fn mst_cost_matches_exhaustive_enumeration() {
        // Enumerate all (n-1)-edge subsets and keep the cheapest spanning one.
        let mut rng = crate::rng::stream_rng(5, 0);
        for round in 0..6 {
            let n = if round < 3 { 6usize } else { 16 };
            let m_target = if round < 3 { 9 } else { 20 };
            let mut edges = Vec::new();
            for v in 1..n as u32 {
                edges.push((rng.gen_range(0..v), v, 1));
            }
            while edges.len() < m_target {
                let u = rng.gen_range(0..n as u32);
                let v = rng.gen_range(0..n as u32);
                if u != v {
                    edges.push((u, v, 1));
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let costs: Vec<Weight> = (0..g.edge_count()).map(|_| rng.gen_range(1..=20)).collect();
            let ids = mst_edge_ids(&g, &costs).unwrap();
            let got: Weight = ids.iter().map(|&e| costs[e as usize]).sum();
            let t = spanning_tree(&g, &costs).unwrap();
            assert_eq!(t.len(), n);
            let m = g.edge_count();
            let mut best = Weight::MAX;
            for mask in 0u32..1 << m {
                if mask.count_ones() as usize != n - 1 {
                    continue;
                }
                let mut dsu = DisjointSets::new(n);
                let mut joined = 0;
                let mut cost = 0;
                for e in 0..m {
                    if mask >> e & 1 == 1 {
                        let edge = g.edge(e as u32);
                        if dsu.union(edge.u, edge.v) {
                            joined += 1;
                        }
                        cost += costs[e];
                    }
                }
                if joined == n - 1 {
                    best = best.min(cost);
                }
            }
            assert_eq!(got, best, "round {round} n={n}");
        }
    }

    #[test]
    fn mst_rejects_disconnected() {
        let g = Graph::from_edges(4, [(0, 1, 1), (2, 3, 1)]).unwrap();
        assert!(matches!(spanning_tree(&g, &[1, 1]), Err(Error::Disconnected)));
    }
}
