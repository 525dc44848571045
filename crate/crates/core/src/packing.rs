//! Spanning-tree packing: skeleton sampling, greedy load-balancing
//! packing, and weighted tree selection.
//!
//! The skeleton keeps each unit of each edge's weight independently with
//! probability p, chosen by exponential search so the packing value lands
//! at a Theta(log n) scale. The greedy packing repeatedly takes a minimum
//! spanning tree under current edge loads and increments the loads of its
//! edges; normalizing by the maximum load gives a feasible fractional
//! packing. Sampling O(log n) trees proportionally to their accumulated
//! weight yields, with high probability, one tree that a minimum cut
//! crosses at most twice.

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::prefix::Weight;
use crate::rng::Rng;
use crate::tree::{tree_from_edge_ids, DisjointSets, RootedTree};

#[derive(Clone, Copy, Debug)]
pub struct PackingParams {
    /// Packing accuracy in (0,1); drives the iteration count.
    pub epsilon: f64,
    /// Desired skeleton packing-value scale: accept p when the packing
    /// value lies in [scale/2 * ln n, 2*scale * ln n].
    pub target_skeleton_cut: f64,
    /// Constant factor on the ceil(multiplier * ln n) trees selected.
    pub tree_count_multiplier: f64,
    /// Recorded for reproducibility; the driver derives the packing
    /// stream from its own run seed.
    pub seed: u64,
}

impl Default for PackingParams {
    fn default() -> Self {
        PackingParams {
            epsilon: 0.2,
            target_skeleton_cut: 12.0,
            tree_count_multiplier: 3.0,
            seed: 0,
        }
    }
}

impl PackingParams {
    pub fn validate(&self) {
        assert!(self.epsilon > 0.0 && self.epsilon < 1.0, "epsilon must lie in (0,1)");
        assert!(self.tree_count_multiplier >= 1.0, "tree multiplier must be >= 1");
    }

    /// Packing iterations derived from epsilon.
    pub fn iterations(&self, n: usize) -> u64 {
        let n = n.max(2) as f64;
        (8.0 * n.ln() / (self.epsilon * self.epsilon)).ceil() as u64
    }

    /// Number of trees sampled from the packing.
    pub fn tree_count(&self, n: usize) -> usize {
        ((self.tree_count_multiplier * (n.max(2) as f64).ln()).ceil() as usize).max(1)
    }
}

/// Unweighted multigraph sampled from a weighted graph; each skeleton edge
/// remembers the original edge it came from.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub graph: Graph,
    /// Skeleton edge id -> original edge id.
    pub orig_edge: Vec<u32>,
    pub p: f64,
}

/// Keep each unit of each edge's weight independently with probability
/// `p`; the vertex set is preserved even if vertices end up isolated.
pub fn sample_skeleton(g: &Graph, p: f64, rng: &mut Rng) -> Skeleton {
    assert!(p > 0.0 && p <= 1.0);
    let mut edges = Vec::new();
    let mut orig_edge = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        let mult = if p >= 1.0 { e.w as u64 } else { binomial(e.w as u64, p, rng) };
        for _ in 0..mult {
            edges.push((e.u, e.v, 1 as Weight));
            orig_edge.push(id as u32);
        }
    }
    let graph = Graph::from_edges(g.vertex_count(), edges).expect("unit weights are valid");
    Skeleton { graph, orig_edge, p }
}

/// Binomial(w, p) draw: exact Bernoulli trials for small w, a clamped
/// normal approximation when w is large enough that the loop would
/// dominate (the skeleton only needs the right concentration).
fn binomial(w: u64, p: f64, rng: &mut Rng) -> u64 {
    const EXACT_CUTOFF: u64 = 4096;
    if w <= EXACT_CUTOFF {
        let mut hits = 0u64;
        for _ in 0..w {
            if rng.gen_bool(p) {
                hits += 1;
            }
        }
        return hits;
    }
    // Box-Muller from two uniform draws
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    let gauss = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    let mean = w as f64 * p;
    let sd = (w as f64 * p * (1.0 - p)).sqrt();
    (mean + sd * gauss).round().clamp(0.0, w as f64) as u64
}

/// Greedy fractional packing on a skeleton.
#[derive(Clone, Debug)]
pub struct TreePacking {
    /// Distinct packed trees, rooted at vertex 0.
    pub trees: Vec<RootedTree>,
    /// Original-graph edge ids backing each tree.
    pub tree_edges: Vec<Vec<u32>>,
    /// Times each distinct tree was picked.
    pub counts: Vec<u64>,
    /// Per skeleton-edge accumulated load (use count).
    pub loads: Vec<u64>,
    pub iterations: u64,
    pub max_load: u64,
}

impl TreePacking {
    /// Feasible packing value: iterations normalized by the max edge load.
    pub fn value(&self) -> f64 {
        if self.max_load == 0 {
            return f64::INFINITY;
        }
        self.iterations as f64 / self.max_load as f64
    }

    /// Per-tree weights; they sum to the packing value.
    pub fn tree_weights(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.max_load.max(1) as f64).collect()
    }
}

/// Run the load-balancing packing loop on a (connected) skeleton:
/// `iterations` rounds of minimum spanning tree under current loads, each
/// adding one unit of weight to the tree and to its edges' loads.
/// `iterations == 0` derives the count from epsilon.
pub fn greedy_tree_packing(sk: &Skeleton, epsilon: f64, iterations: u64) -> Result<TreePacking> {
    let g = &sk.graph;
    let n = g.vertex_count();
    let m = g.edge_count();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let iterations = if iterations > 0 {
        iterations
    } else {
        PackingParams { epsilon, ..Default::default() }.iterations(n)
    };

    let mut loads = vec![0u64; m];
    // Edge ids sorted by (load, id); loads move by exactly one per pick,
    // so each round re-merges the n-1 touched edges instead of re-sorting.
    let mut order: Vec<u32> = (0..m as u32).collect();
    let mut counts: Vec<u64> = Vec::new();
    let mut tree_edges_sk: Vec<Vec<u32>> = Vec::new();
    let mut seen: std::collections::HashMap<Vec<u32>, usize> = std::collections::HashMap::new();

    for _ in 0..iterations {
        // Kruskal over the maintained order
        let mut dsu = DisjointSets::new(n);
        let mut picked = Vec::with_capacity(n - 1);
        for &e in &order {
            let edge = g.edge(e);
            if dsu.union(edge.u, edge.v) {
                picked.push(e);
                if picked.len() + 1 == n {
                    break;
                }
            }
        }
        if picked.len() + 1 != n {
            return Err(Error::Disconnected);
        }
        let mut key = picked.clone();
        key.sort();
        for &e in &picked {
            loads[e as usize] += 1;
        }
        match seen.get(&key) {
            Some(&i) => counts[i] += 1,
            None => {
                seen.insert(key.clone(), counts.len());
                counts.push(1);
                tree_edges_sk.push(key);
            }
        }
        // merge the touched edges (keys +1, relative order kept) back in
        let touched: Vec<bool> = {
            let mut t = vec![false; m];
            for &e in &picked {
                t[e as usize] = true;
            }
            t
        };
        let mut untouched = Vec::with_capacity(m - picked.len());
        let mut moved = Vec::with_capacity(picked.len());
        for &e in &order {
            if touched[e as usize] {
                moved.push(e);
            } else {
                untouched.push(e);
            }
        }
        order.clear();
        let (mut i, mut j) = (0, 0);
        while i < untouched.len() || j < moved.len() {
            let take_untouched = j >= moved.len()
                || (i < untouched.len() && {
                    let a = untouched[i];
                    let b = moved[j];
                    (loads[a as usize], a) < (loads[b as usize], b)
                });
            if take_untouched {
                order.push(untouched[i]);
                i += 1;
            } else {
                order.push(moved[j]);
                j += 1;
            }
        }
    }

    let max_load = loads.iter().copied().max().unwrap_or(0);
    let mut trees = Vec::with_capacity(tree_edges_sk.len());
    let mut tree_edges = Vec::with_capacity(tree_edges_sk.len());
    for key in &tree_edges_sk {
        trees.push(tree_from_edge_ids(g, key)?);
        let mut orig: Vec<u32> = key.iter().map(|&e| sk.orig_edge[e as usize]).collect();
        orig.sort();
        orig.dedup();
        tree_edges.push(orig);
    }
    Ok(TreePacking { trees, tree_edges, counts, loads, iterations, max_load })
}

/// Sample `ceil(multiplier * ln n)` trees with probability proportional to
/// their packing weight (with replacement, deduplicated), lift each onto
/// the original graph, and root it at vertex 0. Trees that do not span
/// `g` (skeleton gaps) are completed with original edges.
pub fn select_trees(
    g: &Graph,
    packing: &TreePacking,
    params: &PackingParams,
    rng: &mut Rng,
) -> Vec<RootedTree> {
    assert!(!packing.counts.is_empty(), "packing must be nonempty");
    let total: u64 = packing.counts.iter().sum();
    let cumulative: Vec<u64> = packing
        .counts
        .iter()
        .scan(0u64, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let mut chosen = std::collections::BTreeSet::new();
    for _ in 0..params.tree_count(g.vertex_count()) {
        let u = rng.gen_range(0..total);
        let idx = cumulative.partition_point(|&c| c <= u);
        chosen.insert(idx);
    }
    chosen
        .into_iter()
        .map(|idx| {
            let ids = complete_spanning(g, &packing.tree_edges[idx]);
            tree_from_edge_ids(g, &ids).expect("completed edge set spans g")
        })
        .collect()
}

/// Extend an edge set to span `g` by adding original edges in id order.
fn complete_spanning(g: &Graph, base: &[u32]) -> Vec<u32> {
    let n = g.vertex_count();
    let mut dsu = DisjointSets::new(n);
    let mut ids = Vec::with_capacity(n - 1);
    for &e in base {
        let edge = g.edge(e);
        if dsu.union(edge.u, edge.v) {
            ids.push(e);
        }
    }
    if ids.len() + 1 < n {
        for e in 0..g.edge_count() as u32 {
            let edge = g.edge(e);
            if dsu.union(edge.u, edge.v) {
                ids.push(e);
                if ids.len() + 1 == n {
                    break;
                }
            }
        }
    }
    ids
}

/// Exponential search for the skeleton probability: halve p until the
/// coarse packing value falls below the window's upper end, backing off
/// one step if the skeleton disconnects. Returns the final packing (full
/// iteration count) on the accepted skeleton.
pub fn skeleton_search(
    g: &Graph,
    params: &PackingParams,
    rng: &mut Rng,
) -> Result<(Skeleton, TreePacking)> {
    params.validate();
    let n = g.vertex_count();
    let ln_n = (n.max(2) as f64).ln();
    let hi = 2.0 * params.target_skeleton_cut * ln_n;
    const COARSE_ITERS: u64 = 64;

    let mut p = 1.0f64;
    let mut accepted: Option<Skeleton> = None;
    loop {
        let sk = sample_skeleton(g, p, rng);
        match greedy_tree_packing(&sk, params.epsilon, COARSE_ITERS) {
            Err(_) => {
                // skeleton too sparse; previous acceptance (if any) stands
                break;
            }
            Ok(coarse) => {
                let value = coarse.value();
                accepted = Some(sk);
                if value <= hi || p <= 1e-9 {
                    break;
                }
                p /= 2.0;
            }
        }
    }
    let sk = accepted.ok_or(Error::Disconnected)?;
    let packing = greedy_tree_packing(&sk, params.epsilon, params.iterations(n))?;
    Ok((sk, packing))
}
