//! Smallest cut of G crossing at most two edges of a given spanning tree.
//!
//! One-edge cuts come from subtree aggregates. For two-edge cuts, each
//! contraction phase walks its boughs bottom-up and back down, streaming
//! AddPath/MinPath operations through a batch minimum-path structure whose
//! initial vertex weights are the one-edge cut values:
//!
//! - incomparable pair (union of two descendant sets): ancestors of the
//!   walk are masked with the `INF` sentinel, incident edges subtract
//!   twice their weight along the other endpoint's root path, and each
//!   query's offset adds the best one-edge value on the remaining bough
//!   (the running-minimum pairing, folded into the offset);
//! - comparable pair (difference of descendant sets): incident edges add
//!   twice their weight, the query fires at the walk vertex's parent, and
//!   the offset corrects for edges internal to the walked subtree (the
//!   lca-weight aggregate of the phase graph) and the vertex's own cut.
//!
//! The search is exact: the returned value equals the true minimum over
//! all cuts crossing at most two tree edges.

use rayon::prelude::*;

use crate::decomp::{decompose_deterministic, find_boughs, Bough};
use crate::error::{Error, Result};
use crate::graph::{contract, cut_value, Graph, VertexSet};
use crate::minpath::{build_minpath, TreeOp};
use crate::prefix::{BatchCounters, Weight, INF, MASKED};
use crate::rng::Rng;
use crate::tree::{LcaTable, RootedTree};

/// Tree edges defining a candidate cut, named by child endpoints
/// (original vertex ids).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutEdges {
    One { child: u32 },
    Incomparable { a_child: u32, b_child: u32 },
    Comparable { upper_child: u32, lower_child: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateKind {
    OneEdge,
    Incomparable,
    Comparable,
}

#[derive(Clone, Copy, Debug)]
pub struct CutCandidate {
    pub value: Weight,
    pub edges: CutEdges,
}

impl CutCandidate {
    pub fn kind(&self) -> CandidateKind {
        match self.edges {
            CutEdges::One { .. } => CandidateKind::OneEdge,
            CutEdges::Incomparable { .. } => CandidateKind::Incomparable,
            CutEdges::Comparable { .. } => CandidateKind::Comparable,
        }
    }
}

/// One contraction phase: the current graph/tree, the mapping back to
/// original vertices, and the boughs processed in this phase.
#[derive(Clone, Debug)]
pub struct Phase {
    pub graph: Graph,
    pub tree: RootedTree,
    /// Phase vertex -> original vertex.
    pub rep: Vec<u32>,
    pub boughs: Vec<Bough>,
}

/// Sum of `vals` over every descendant set, computed by phase-ordered
/// per-path prefix sums over the tree decomposition.
pub fn subtree_sums(t: &RootedTree, vals: &[Weight]) -> Vec<Weight> {
    assert_eq!(vals.len(), t.len());
    let d = decompose_deterministic(t);
    let mut out = vals.to_vec();
    // Paths are produced in phase order; everything hanging off a path was
    // removed in an earlier phase, so its sums are final.
    for path in &d.paths {
        for pos in (0..path.len()).rev() {
            let v = path[pos];
            let in_path_child = path.get(pos + 1).copied();
            let mut acc = out[v as usize];
            for &c in &t.children[v as usize] {
                if Some(c) != in_path_child {
                    acc += out[c as usize];
                }
            }
            if let Some(c) = in_path_child {
                acc += out[c as usize];
            }
            out[v as usize] = acc;
        }
    }
    out
}

/// Total weight of graph edges with both endpoints among the descendants
/// of each vertex: deposit each edge's weight at the endpoints' lowest
/// common ancestor, then sum over subtrees.
pub fn lca_subtree_weights(g: &Graph, t: &RootedTree) -> Vec<Weight> {
    assert_eq!(g.vertex_count(), t.len());
    let lca = LcaTable::new(t);
    let mut deposit = vec![0 as Weight; t.len()];
    for e in g.edges() {
        deposit[lca.lca(e.u, e.v) as usize] += e.w;
    }
    subtree_sums(t, &deposit)
}

/// Value of the cut separating each vertex's descendants from the rest:
/// subtree sums of weighted degree minus twice the internal edge weight.
/// The root's entry is 0 (its descendant set is the whole vertex set).
pub fn one_edge_cut_values(g: &Graph, t: &RootedTree) -> Vec<Weight> {
    let degrees: Vec<Weight> =
        (0..g.vertex_count() as u32).map(|v| g.weighted_degree(v)).collect();
    let degree_sums = subtree_sums(t, &degrees);
    let rho = lca_subtree_weights(g, t);
    let out: Vec<Weight> =
        degree_sums.iter().zip(&rho).map(|(d, r)| d - 2 * r).collect();
    debug_assert_eq!(out[t.root as usize], 0);
    out
}

/// Build the contraction phase sequence: identify boughs, contract every
/// bough onto the parent of its top vertex (in the tree and the graph at
/// once), and repeat while at least two vertices remain.
pub fn build_phases(g: &Graph, t: &RootedTree, rng: &mut Rng) -> Vec<Phase> {
    let mut graph = g.clone();
    let mut tree = t.clone();
    let mut rep: Vec<u32> = (0..g.vertex_count() as u32).collect();
    let mut phases = Vec::new();
    while tree.len() >= 2 {
        let boughs = find_boughs(&tree, rng);
        let n_i = tree.len();
        let mut bough_of = vec![u32::MAX; n_i];
        for (bi, b) in boughs.iter().enumerate() {
            for &v in &b.vertices {
                bough_of[v as usize] = bi as u32;
            }
        }
        let mut new_id = vec![u32::MAX; n_i];
        let mut survivors = 0u32;
        for v in 0..n_i {
            if bough_of[v] == u32::MAX {
                new_id[v] = survivors;
                survivors += 1;
            }
        }
        if survivors == 0 {
            // the tree was a path: its single bough swallowed everything
            phases.push(Phase { graph, tree, rep, boughs });
            break;
        }
        let map: Vec<u32> = (0..n_i)
            .map(|v| {
                if bough_of[v] == u32::MAX {
                    new_id[v]
                } else {
                    let top = boughs[bough_of[v] as usize].top();
                    new_id[tree.parent[top as usize] as usize]
                }
            })
            .collect();
        let (next_graph, _) = contract(&graph, &map, survivors as usize);
        let next_root = new_id[tree.root as usize];
        let mut next_parent = vec![0u32; survivors as usize];
        let mut next_rep = vec![0u32; survivors as usize];
        for v in 0..n_i {
            if new_id[v] != u32::MAX {
                next_parent[new_id[v] as usize] = new_id[tree.parent[v] as usize];
                next_rep[new_id[v] as usize] = rep[v];
            }
        }
        phases.push(Phase { graph, tree, rep, boughs });
        graph = next_graph;
        tree = RootedTree::from_parents(next_root, next_parent)
            .expect("contracted parents form a tree");
        rep = next_rep;
    }
    let bound = (usize::BITS - g.vertex_count().leading_zeros()) as usize; // floor(log2 n) + 1
    assert!(phases.len() <= bound, "phase count {} exceeds {}", phases.len(), bound);
    phases
}

/// First- and second-visit times for every bough vertex of a phase:
/// bottom-up then top-down per bough, boughs in leaf-id order.
fn visit_times(boughs: &[Bough]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut base = 0u64;
    for b in boughs {
        let len = b.vertices.len() as u64;
        out.push(
            (0..len).map(|j| (base + 1 + j, base + 2 * len - j)).collect::<Vec<_>>(),
        );
        base += 2 * len;
    }
    out.into_iter().flatten().collect()
}

/// Tags identifying which walk step produced a query.
#[derive(Clone, Copy, Debug)]
struct IncTag {
    bough: u32,
    pos: u32,
    /// Queried neighbor (phase vertex).
    x: u32,
}

#[derive(Clone, Copy, Debug)]
struct CompTag {
    bough: u32,
    pos: u32,
}

/// The incomparable-case batch: mask the walk's ancestors, subtract twice
/// each incident edge along the other endpoint's root path, query every
/// neighbor. A query's offset is the smallest one-edge cut value on its
/// bough at or above the walk vertex, so the best `result + offset` over
/// the walk equals the best union-of-descendants cut through this bough.
pub fn generate_incomparable_batch(
    phase: &Phase,
    cutvals: &[Weight],
) -> (Vec<TreeOp>, Vec<IncTagOpaque>) {
    let mut ops = Vec::new();
    let mut tags = Vec::new();
    let mut times = visit_times(&phase.boughs).into_iter();
    for (bi, bough) in phase.boughs.iter().enumerate() {
        let len = bough.vertices.len();
        let vt: Vec<(u64, u64)> = (&mut times).take(len).collect();
        // suffix minima of the one-edge values along the bough
        let mut sufc = vec![0 as Weight; len];
        let mut acc = Weight::MAX;
        for j in (0..len).rev() {
            acc = acc.min(cutvals[phase.rep[bough.vertices[j] as usize] as usize]);
            sufc[j] = acc;
        }
        let leaf = bough.leaf();
        ops.push(TreeOp::add(vt[0].0, leaf, INF));
        for (j, &y) in bough.vertices.iter().enumerate() {
            let (t1, t2) = vt[j];
            for &(x, w, _) in phase.graph.neighbors(y) {
                ops.push(TreeOp::add(t1, x, -2 * w));
                tags.push(IncTagOpaque(IncTag { bough: bi as u32, pos: j as u32, x }));
                ops.push(TreeOp::min(t1, x, sufc[j], tags.len() as u64 - 1));
            }
            for &(x, w, _) in phase.graph.neighbors(y).iter().rev() {
                ops.push(TreeOp::add(t2, x, 2 * w));
            }
        }
        ops.push(TreeOp::add(vt[0].1, leaf, -INF));
    }
    (ops, tags)
}

/// The comparable-case batch: add twice each incident edge along the
/// neighbor's root path and query the walk vertex's parent; the offset
/// removes the doubled subtree-internal weight (4 * rho of the phase
/// graph) and the vertex's one-edge value, leaving the difference cut.
pub fn generate_comparable_batch(
    phase: &Phase,
    cutvals: &[Weight],
    rho: &[Weight],
) -> (Vec<TreeOp>, Vec<CompTagOpaque>) {
    let mut ops = Vec::new();
    let mut tags = Vec::new();
    let mut times = visit_times(&phase.boughs).into_iter();
    for (bi, bough) in phase.boughs.iter().enumerate() {
        let vt: Vec<(u64, u64)> = (&mut times).take(bough.vertices.len()).collect();
        for (j, &v) in bough.vertices.iter().enumerate() {
            if v == phase.tree.root {
                // the root's descendant set is not a cut side
                continue;
            }
            let (t1, t2) = vt[j];
            for &(u, w, _) in phase.graph.neighbors(v) {
                ops.push(TreeOp::add(t1, u, 2 * w));
            }
            let offset = -(4 * rho[v as usize] + cutvals[phase.rep[v as usize] as usize]);
            tags.push(CompTagOpaque(CompTag { bough: bi as u32, pos: j as u32 }));
            ops.push(TreeOp::min(t1, phase.tree.parent[v as usize], offset, tags.len() as u64 - 1));
            for &(u, w, _) in phase.graph.neighbors(v).iter().rev() {
                ops.push(TreeOp::add(t2, u, -2 * w));
            }
        }
    }
    (ops, tags)
}

/// Opaque wrappers keep the tag internals private to this module while
/// letting the batch generators stay independently testable.
#[derive(Clone, Copy, Debug)]
pub struct IncTagOpaque(IncTag);

#[derive(Clone, Copy, Debug)]
pub struct CompTagOpaque(CompTag);

/// Statistics from one two-edge search.
#[derive(Clone, Debug, Default)]
pub struct TwoCutStats {
    pub counters: BatchCounters,
    pub phase_count: u32,
    pub batch_ops: u64,
}

#[derive(Clone, Debug)]
pub struct TwoCutOutcome {
    pub candidate: CutCandidate,
    /// Partition side of the winning candidate, re-verified against the
    /// graph before returning.
    pub side: VertexSet,
    pub stats: TwoCutStats,
}


/// Exact smallest cut of `g` crossing at most two edges of `t`.
pub fn two_edge_cut(g: &Graph, t: &RootedTree, rng: &mut Rng) -> Result<TwoCutOutcome> {
    let n = g.vertex_count();
    assert_eq!(t.len(), n, "tree must span g");
    if n < 2 {
        return Err(Error::TooFewVertices);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let cutvals = one_edge_cut_values(g, t);
    let phases = build_phases(g, t, rng);

    let one_best = (0..n as u32)
        .filter(|&v| v != t.root)
        .min_by_key(|&v| (cutvals[v as usize], v))
        .expect("n >= 2 gives a non-root vertex");

    // Per-(phase, case) jobs run independently; the minpath builds need
    // their own derived generators to stay deterministic under rayon.
    struct Job {
        phase: u32,
        ops: Vec<TreeOp>,
        comparable: bool,
        rng: Rng,
    }
    let mut jobs = Vec::new();
    for (pi, phase) in phases.iter().enumerate() {
        use rand::RngCore as _;
        use rand_chacha::rand_core::SeedableRng as _;
        let rho = lca_subtree_weights(&phase.graph, &phase.tree);
        let (inc_ops, _) = generate_incomparable_batch(phase, &cutvals);
        let (comp_ops, _) = generate_comparable_batch(phase, &cutvals, &rho);
        assert_batch_shape(phase, &inc_ops);
        assert_batch_shape(phase, &comp_ops);
        let inc_rng = Rng::seed_from_u64(rng.next_u64());
        let comp_rng = Rng::seed_from_u64(rng.next_u64());
        jobs.push(Job { phase: pi as u32, ops: inc_ops, comparable: false, rng: inc_rng });
        jobs.push(Job { phase: pi as u32, ops: comp_ops, comparable: true, rng: comp_rng });
    }

    struct JobOutcome {
        phase: u32,
        comparable: bool,
        best: Option<(Weight, u32)>, // (candidate value, tag index)
        counters: BatchCounters,
        ops: u64,
    }
    let outcomes: Vec<JobOutcome> = jobs
        .into_par_iter()
        .map(|mut job| {
            let phase = &phases[job.phase as usize];
            let weights: Vec<Weight> = phase
                .rep
                .iter()
                .map(|&orig| cutvals[orig as usize])
                .collect();
            let s = build_minpath(&phase.tree, &weights, &mut job.rng);
            let out = s.execute(&job.ops).expect("generated ops are in range");
            // reversed walks restore the weights exactly
            assert_eq!(out.final_weights, weights, "weight restoration failed");
            let mut best: Option<(Weight, u32)> = None;
            for r in &out.results {
                if r.value >= MASKED {
                    continue;
                }
                let cand = (r.value + r.offset, r.tag as u32);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
            JobOutcome {
                phase: job.phase,
                comparable: job.comparable,
                best,
                counters: out.counters,
                ops: job.ops.len() as u64,
            }
        })
        .collect();

    let mut stats = TwoCutStats {
        counters: BatchCounters { monotone: true, ..Default::default() },
        phase_count: phases.len() as u32,
        batch_ops: 0,
    };
    let mut best_two: Option<(Weight, usize)> = None; // (value, outcome index)
    for (i, o) in outcomes.iter().enumerate() {
        stats.counters.absorb(&o.counters);
        stats.batch_ops += o.ops;
        if let Some((v, _)) = o.best {
            if best_two.is_none_or(|(bv, _)| v < bv) {
                best_two = Some((v, i));
            }
        }
    }

    let candidate = match best_two {
        Some((value, oi)) if value < cutvals[one_best as usize] => {
            let o = &outcomes[oi];
            let phase = &phases[o.phase as usize];
            let tag = o.best.unwrap().1;
            // regenerate the winning job's tags to decode the walk step
            if o.comparable {
                let rho = lca_subtree_weights(&phase.graph, &phase.tree);
                let (_, tags) = generate_comparable_batch(phase, &cutvals, &rho);
                let CompTag { bough, pos } = tags[tag as usize].0;
                recover_comparable(phase, &cutvals, &rho, bough, pos, value)
            } else {
                let (_, tags) = generate_incomparable_batch(phase, &cutvals);
                let IncTag { bough, pos, x } = tags[tag as usize].0;
                recover_incomparable(phase, &cutvals, bough, pos, x, value)
            }
        }
        _ => CutCandidate {
            value: cutvals[one_best as usize],
            edges: CutEdges::One { child: one_best },
        },
    };

    let side = recover_partition(t, &candidate.edges)?;
    let recheck = cut_value(g, &side)?;
    assert_eq!(recheck, candidate.value, "two-edge candidate failed re-verification");
    Ok(TwoCutOutcome { candidate, side, stats })
}

/// Every graph edge is touched at most four times by updates (twice per
/// endpoint visit) and at most twice by queries.
fn assert_batch_shape(phase: &Phase, ops: &[TreeOp]) {
    use crate::minpath::TreeOpKind;
    let m = phase.graph.edge_count().max(1) as u64;
    let adds = ops
        .iter()
        .filter(|o| matches!(o.kind, TreeOpKind::Add { x } if x.abs() < INF))
        .count() as u64;
    let mins = ops.iter().filter(|o| matches!(o.kind, TreeOpKind::Min { .. })).count() as u64;
    assert!(adds <= 4 * m, "add ops {adds} exceed 4m = {}", 4 * m);
    assert!(mins <= 2 * m, "min ops {mins} exceed 2m = {}", 2 * m);
}

/// Deposit each walked incidence at its target, then sum over subtrees:
/// gives, per phase vertex `a`, the total walked edge weight entering
/// `a`'s descendant set.
fn walk_deposits(phase: &Phase, bough: u32, pos: u32) -> Vec<Weight> {
    let mut dep = vec![0 as Weight; phase.tree.len()];
    let b = &phase.boughs[bough as usize];
    for &y in &b.vertices[..=pos as usize] {
        for &(x, w, _) in phase.graph.neighbors(y) {
            dep[x as usize] += w;
        }
    }
    subtree_sums(&phase.tree, &dep)
}

/// Decode the winning incomparable query: pick the suffix-minimum bough
/// vertex and the unmasked ancestor of the queried neighbor that achieved
/// the minimum path weight.
fn recover_incomparable(
    phase: &Phase,
    cutvals: &[Weight],
    bough: u32,
    pos: u32,
    x: u32,
    value: Weight,
) -> CutCandidate {
    let b = &phase.boughs[bough as usize];
    let c_of = |v: u32| cutvals[phase.rep[v as usize] as usize];
    let v0 = b.vertices[pos as usize..]
        .iter()
        .copied()
        .min_by_key(|&v| c_of(v))
        .unwrap();
    let sub = walk_deposits(phase, bough, pos);
    let leaf = b.leaf();
    let mut best: Option<(Weight, u32)> = None;
    let mut a = x;
    loop {
        if !phase.tree.is_ancestor(a, leaf) {
            let w = c_of(a) - 2 * sub[a as usize];
            if best.is_none_or(|(bw, _)| w < bw) {
                best = Some((w, a));
            }
        }
        if a == phase.tree.root {
            break;
        }
        a = phase.tree.parent[a as usize];
    }
    let (raw, t_prime) = best.expect("winning query saw an unmasked ancestor");
    assert_eq!(raw + c_of(v0), value, "incomparable extraction mismatch");
    CutCandidate {
        value,
        edges: CutEdges::Incomparable {
            a_child: phase.rep[v0 as usize],
            b_child: phase.rep[t_prime as usize],
        },
    }
}

/// Decode the winning comparable query: the proper ancestor minimizing
/// the corrected difference-cut value.
fn recover_comparable(
    phase: &Phase,
    cutvals: &[Weight],
    rho: &[Weight],
    bough: u32,
    pos: u32,
    value: Weight,
) -> CutCandidate {
    let v = phase.boughs[bough as usize].vertices[pos as usize];
    let c_of = |a: u32| cutvals[phase.rep[a as usize] as usize];
    let sub = walk_deposits(phase, bough, pos);
    let mut best: Option<(Weight, u32)> = None;
    let mut a = phase.tree.parent[v as usize];
    loop {
        let w = c_of(a) + 2 * sub[a as usize];
        if best.is_none_or(|(bw, _)| w < bw) {
            best = Some((w, a));
        }
        if a == phase.tree.root {
            break;
        }
        a = phase.tree.parent[a as usize];
    }
    let (raw, t_prime) = best.unwrap();
    assert_eq!(raw - 4 * rho[v as usize] - c_of(v), value, "comparable extraction mismatch");
    if t_prime == phase.tree.root {
        // difference against the whole vertex set: same side as the
        // one-edge cut of v
        return CutCandidate { value, edges: CutEdges::One { child: phase.rep[v as usize] } };
    }
    CutCandidate {
        value,
        edges: CutEdges::Comparable {
            upper_child: phase.rep[t_prime as usize],
            lower_child: phase.rep[v as usize],
        },
    }
}

/// Reconstruct the vertex side defined by one or two tree edges: one edge
/// cuts off the child's descendants; an incomparable pair takes the union
/// of both descendant sets; a comparable pair their difference.
pub fn recover_partition(t: &RootedTree, edges: &CutEdges) -> Result<VertexSet> {
    let n = t.len();
    match *edges {
        CutEdges::One { child } => {
            if child == t.root {
                return Err(Error::InvalidEdgePair { reason: "root has no parent edge".into() });
            }
            Ok(t.subtree_set(child))
        }
        CutEdges::Incomparable { a_child, b_child } => {
            if a_child == b_child {
                return Err(Error::InvalidEdgePair { reason: "identical edges".into() });
            }
            if t.is_ancestor(a_child, b_child) || t.is_ancestor(b_child, a_child) {
                return Err(Error::InvalidEdgePair {
                    reason: "edges are comparable, not incomparable".into(),
                });
            }
            let mut side = t.subtree_set(a_child);
            for &x in t.subtree(b_child) {
                side.insert(x);
            }
            Ok(side)
        }
        CutEdges::Comparable { upper_child, lower_child } => {
            if upper_child == lower_child || !t.is_ancestor(upper_child, lower_child) {
                return Err(Error::InvalidEdgePair {
                    reason: "lower edge must descend from upper edge".into(),
                });
            }
            let mut side = VertexSet::new(n);
            for &x in t.subtree(upper_child) {
                if !t.is_ancestor(lower_child, x) {
                    side.insert(x);
                }
            }
            Ok(side)
        }
    }
}
