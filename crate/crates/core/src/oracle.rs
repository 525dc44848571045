//! Independent reference implementations used as test oracles.
//!
//! Everything here is deliberately naive — per-operation simulation,
//! exhaustive enumeration, direct walks — and shares no code with the
//! batch-parallel implementations it checks.

use crate::graph::{cut_value, Graph, VertexSet};
use crate::minpath::{TreeOp, TreeOpKind};
use crate::prefix::{PrefixOp, PrefixOpKind, Weight};
use crate::tree::RootedTree;

/// O(nk) per-operation simulator for prefix batches: stores the n weights
/// and scans prefixes directly.
pub struct NaivePrefixList {
    pub results: Vec<Weight>,
    pub final_weights: Vec<Weight>,
}

impl NaivePrefixList {
    pub fn run(weights: &[Weight], ops: &[PrefixOp]) -> Self {
        let mut order: Vec<usize> = (0..ops.len()).collect();
        order.sort_by_key(|&i| (ops[i].time, matches!(ops[i].kind, PrefixOpKind::Min { .. })));
        let mut w = weights.to_vec();
        let mut results = Vec::new();
        for i in order {
            let op = ops[i];
            match op.kind {
                PrefixOpKind::Add { x } => {
                    for p in 0..=op.index {
                        w[p] += x;
                    }
                }
                PrefixOpKind::Min { .. } => {
                    results.push(*w[..=op.index].iter().min().unwrap());
                }
            }
        }
        NaivePrefixList { results, final_weights: w }
    }
}

/// Per-operation simulator for tree path batches: walks parent chains.
pub struct NaiveTreePath {
    pub results: Vec<Weight>,
    pub final_weights: Vec<Weight>,
}

impl NaiveTreePath {
    pub fn run(tree: &RootedTree, weights: &[Weight], ops: &[TreeOp]) -> Self {
        let mut order: Vec<usize> = (0..ops.len()).collect();
        order.sort_by_key(|&i| (ops[i].time, matches!(ops[i].kind, TreeOpKind::Min { .. })));
        let mut w = weights.to_vec();
        let mut results = Vec::new();
        for i in order {
            let op = ops[i];
            let mut v = op.vertex;
            match op.kind {
                TreeOpKind::Add { x } => loop {
                    w[v as usize] += x;
                    if v == tree.root {
                        break;
                    }
                    v = tree.parent[v as usize];
                },
                TreeOpKind::Min { .. } => {
                    let mut best = Weight::MAX;
                    loop {
                        best = best.min(w[v as usize]);
                        if v == tree.root {
                            break;
                        }
                        v = tree.parent[v as usize];
                    }
                    results.push(best);
                }
            }
        }
        NaiveTreePath { results, final_weights: w }
    }
}

/// Exhaustive global minimum cut over all 2^(n-1) - 1 sides containing
/// vertex 0's complement split. Only for small n.
pub fn exhaustive_min_cut(g: &Graph) -> (Weight, VertexSet) {
    let n = g.vertex_count();
    assert!((2..=20).contains(&n), "exhaustive enumeration needs 2 <= n <= 20");
    let mut best = Weight::MAX;
    let mut best_side = VertexSet::new(n);
    // vertex n-1 fixed outside the side to halve the enumeration
    for mask in 1u64..(1 << (n - 1)) {
        let side = VertexSet::from_iter(n, (0..n as u32 - 1).filter(|&v| mask >> v & 1 == 1));
        let value = cut_value(g, &side).unwrap();
        if value < best {
            best = value;
            best_side = side;
        }
    }
    (best, best_side)
}

/// Brute-force smallest cut crossing at most two edges of the spanning
/// tree: enumerates all single tree edges and all pairs, evaluating each
/// candidate side directly.
pub fn brute_force_two_respecting(g: &Graph, t: &RootedTree) -> Weight {
    let n = g.vertex_count();
    let mut best = Weight::MAX;
    let vs: Vec<u32> = (0..n as u32).filter(|&v| v != t.root).collect();
    for &v in &vs {
        let side = t.subtree_set(v);
        best = best.min(cut_value(g, &side).unwrap());
    }
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            let side = if t.is_ancestor(a, b) {
                // comparable: difference of descendant sets
                let mut s = VertexSet::new(n);
                for &x in t.subtree(a) {
                    if !t.is_ancestor(b, x) {
                        s.insert(x);
                    }
                }
                s
            } else if t.is_ancestor(b, a) {
                let mut s = VertexSet::new(n);
                for &x in t.subtree(b) {
                    if !t.is_ancestor(a, x) {
                        s.insert(x);
                    }
                }
                s
            } else {
                let mut s = t.subtree_set(a);
                for &x in t.subtree(b) {
                    s.insert(x);
                }
                s
            };
            if side.is_empty() || side.len() >= n {
                continue;
            }
            best = best.min(cut_value(g, &side).unwrap());
        }
    }
    best
}

/// Sequential bough identification: from each leaf, walk upward until the
/// current vertex has a sibling (or is the root). Returns boughs ordered
/// leaf-to-top, sorted by leaf id.
pub fn sequential_boughs(t: &RootedTree) -> Vec<Vec<u32>> {
    let n = t.len();
    let mut boughs = Vec::new();
    for v in 0..n as u32 {
        if !t.is_leaf(v) {
            continue;
        }
        let mut bough = vec![v];
        let mut cur = v;
        while cur != t.root {
            let p = t.parent[cur as usize];
            if t.children[p as usize].len() != 1 {
                break;
            }
            bough.push(p);
            cur = p;
        }
        boughs.push(bough);
    }
    boughs.sort_by_key(|b| b[0]);
    boughs
}

/// Recursive subtree sums (DFS oracle).
pub fn dfs_subtree_sums(t: &RootedTree, vals: &[Weight]) -> Vec<Weight> {
    let mut out = vals.to_vec();
    // preorder reversed = children before parents
    for &v in t.preorder.iter().rev() {
        if v != t.root {
            out[t.parent[v as usize] as usize] += out[v as usize];
        }
    }
    out
}

/// Random connected weighted graph: a random tree plus `extra` random
/// non-loop edges, weights in `1..=max_w`.
pub fn random_connected_graph(
    n: usize,
    extra: usize,
    max_w: Weight,
    rng: &mut crate::rng::Rng,
) -> Graph {
    use rand::Rng as _;
    assert!(n >= 2);
    let mut edges = Vec::new();
    for v in 1..n as u32 {
        let p = rng.gen_range(0..v);
        edges.push((p, v, rng.gen_range(1..=max_w)));
    }
    let mut added = 0;
    while added < extra {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        edges.push((u, v, rng.gen_range(1..=max_w)));
        added += 1;
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Uniform random parent-array tree on `n` vertices rooted at 0.
pub fn random_tree(n: usize, rng: &mut crate::rng::Rng) -> RootedTree {
    use rand::Rng as _;
    let mut parent = vec![0u32; n];
    for v in 1..n {
        parent[v] = rng.gen_range(0..v) as u32;
    }
    RootedTree::from_parents(0, parent).unwrap()
}
