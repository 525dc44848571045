//! Batch-parallel Minimum Prefix structure over a list.
//!
//! A complete binary tree sits on top of the list; each inner node stores
//! only the difference between the smallest weight in its right and left
//! subtrees. A batch of timestamped AddPrefix/MinPrefix operations is
//! executed as if sequential: one bottom-up sweep produces every
//! intermediate difference state each node ever takes (grouped per node,
//! sorted by time), then a second bottom-up sweep routes the queries
//! through those states.
//!
//! All arithmetic is exact `i64`. Masking uses the large finite sentinel
//! [`INF`]; adding and later subtracting it restores weights exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scan::all_prefix_sums;

pub type Weight = i64;

/// Masking sentinel: strictly larger than any reachable real sum (input
/// total weight is capped far below), yet an ordinary integer so a paired
/// `+INF`/`-INF` update cancels exactly.
pub const INF: Weight = 1 << 60;

/// Threshold above which a value is treated as masked rather than real.
pub const MASKED: Weight = INF / 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixOpKind {
    Add {
        x: Weight,
    },
    Min {
        /// Extraction offset carried through to the result untouched.
        offset: Weight,
        /// Opaque caller identifier carried through to the result.
        tag: u64,
    },
}

/// One timestamped operation on a prefix of the list. The prefix covers
/// leaf positions `0..=index`. Operations sharing a timestamp are applied
/// updates-first.
#[derive(Clone, Copy, Debug)]
pub struct PrefixOp {
    pub time: u64,
    pub index: usize,
    pub kind: PrefixOpKind,
}

impl PrefixOp {
    pub fn add(time: u64, index: usize, x: Weight) -> Self {
        PrefixOp { time, index, kind: PrefixOpKind::Add { x } }
    }

    pub fn min(time: u64, index: usize, offset: Weight, tag: u64) -> Self {
        PrefixOp { time, index, kind: PrefixOpKind::Min { offset, tag } }
    }
}

/// Result of one MinPrefix query: smallest weight in the prefix at the
/// query's time, with the query's offset and tag carried through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinResult {
    pub tag: u64,
    pub offset: Weight,
    pub value: Weight,
}

/// Instrumentation for one batch execution.
#[derive(Clone, Debug, Default)]
pub struct BatchCounters {
    /// Sum of |H(b)| + 1 over nodes touched by the update sweep.
    pub update_node_work: u64,
    /// Same accounting for the query sweep.
    pub query_node_work: u64,
    pub updates: u64,
    pub queries: u64,
    /// Sum of |H(b)| per tree depth (update sweep).
    pub h_per_depth: Vec<u64>,
    /// True iff node processing depths were monotone bottom-up.
    pub monotone: bool,
}

impl BatchCounters {
    pub fn absorb(&mut self, other: &BatchCounters) {
        self.update_node_work += other.update_node_work;
        self.query_node_work += other.query_node_work;
        self.updates += other.updates;
        self.queries += other.queries;
        self.monotone &= other.monotone;
    }
}

/// Output of a batch execution.
#[derive(Clone, Debug)]
pub struct BatchOutput {
    /// One entry per MinPrefix op, ordered by time.
    pub results: Vec<MinResult>,
    /// Leaf weights after all updates.
    pub final_weights: Vec<Weight>,
    /// Final difference value per tree node (diagnostics; leaves carry 0).
    pub node_deltas: Vec<Weight>,
    pub counters: BatchCounters,
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    left: u32,
    right: u32,
    parent: u32,
    depth: u32,
    /// Initial difference min0(right) - min0(left); 0 at leaves.
    delta0: Weight,
    /// Smallest initial weight in the subtree.
    min0: Weight,
}

impl Node {
    #[cfg_attr(not(test), allow(dead_code))]
    fn is_leaf(&self) -> bool {
        self.left == NONE
    }
}

/// Per-node state carried up by the update sweep.
#[derive(Clone, Debug, Default)]
struct UpdState {
    /// Relevant update sequence ranks, ascending.
    h: Vec<u64>,
    /// Increment of each relevant update.
    x: Vec<Weight>,
    /// Change of the node's subtree minimum per relevant update.
    phi: Vec<Weight>,
}

/// What the query sweep needs from the update sweep, per node.
#[derive(Clone, Debug)]
struct Hist {
    h: Vec<u64>,
    /// Difference state after each relevant update (inner nodes).
    delta: Vec<Weight>,
}

#[derive(Clone, Copy, Debug)]
struct QEntry {
    seq: u64,
    d: Weight,
    qpos: u32,
}

/// Complete binary tree over exactly `n` leaves (no padding); every leaf
/// sits at depth `ceil(log2 n)` or one above, so a leaf-to-root path has
/// at most `ceil(log2 n) + 1` nodes.
#[derive(Clone, Debug)]
pub struct PrefixStructure {
    weights0: Vec<Weight>,
    nodes: Vec<Node>,
    /// Leaf position -> node id.
    leaf_node: Vec<u32>,
    max_depth: u32,
}

fn ceil_log2(n: usize) -> u32 {
    n.next_power_of_two().trailing_zeros()
}

impl PrefixStructure {
    pub fn build(weights: &[Weight]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyList);
        }
        let n = weights.len();
        let mut s = PrefixStructure {
            weights0: weights.to_vec(),
            nodes: Vec::with_capacity(2 * n - 1),
            leaf_node: vec![0; n],
            max_depth: 0,
        };
        s.build_range(0, n, 0, NONE);
        debug_assert_eq!(s.nodes.len(), 2 * n - 1);
        Ok(s)
    }

    fn build_range(&mut self, lo: usize, hi: usize, depth: u32, parent: u32) -> u32 {
        let id = self.nodes.len() as u32;
        self.max_depth = self.max_depth.max(depth);
        let size = hi - lo;
        if size == 1 {
            self.nodes.push(Node {
                left: NONE,
                right: NONE,
                parent,
                depth,
                delta0: 0,
                min0: self.weights0[lo],
            });
            self.leaf_node[lo] = id;
            return id;
        }
        self.nodes.push(Node { left: 0, right: 0, parent, depth, delta0: 0, min0: 0 });
        // Complete split: deep leaves pack leftmost, so all leaves end up
        // on the bottom two levels.
        let h = ceil_log2(size);
        let half = 1usize << (h - 1);
        let quarter = half / 2;
        let n_left = half.min((size - quarter).max(quarter.max(1)));
        let left = self.build_range(lo, lo + n_left, depth + 1, id);
        let right = self.build_range(lo + n_left, hi, depth + 1, id);
        let (lmin, rmin) = (self.nodes[left as usize].min0, self.nodes[right as usize].min0);
        let node = &mut self.nodes[id as usize];
        node.left = left;
        node.right = right;
        node.min0 = lmin.min(rmin);
        node.delta0 = rmin - lmin;
        id
    }

    pub fn len(&self) -> usize {
        self.weights0.len()
    }

    /// Never true: construction rejects empty lists.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn initial_weights(&self) -> &[Weight] {
        &self.weights0
    }

    pub fn min0_root(&self) -> Weight {
        self.nodes[0].min0
    }

    /// Initial difference per node, in construction order (diagnostics).
    pub fn node_delta0(&self) -> Vec<Weight> {
        self.nodes.iter().map(|nd| nd.delta0).collect()
    }

    /// Smallest initial weight below each node, recomputed directly from
    /// the leaf ranges (test oracle helper).
    fn is_right_child(&self, id: u32) -> bool {
        let p = self.nodes[id as usize].parent;
        p != NONE && self.nodes[p as usize].right == id
    }

    /// Execute a batch of prefix operations as if sequential. Input may
    /// arrive in any order; it is stable-sorted by time with updates
    /// preceding queries at equal timestamps.
    pub fn execute_batch(&self, ops: &[PrefixOp]) -> Result<BatchOutput> {
        let n = self.len();
        for op in ops {
            if op.index >= n {
                return Err(Error::IndexOutOfRange { index: op.index, len: n });
            }
        }
        let mut order: Vec<u32> = (0..ops.len() as u32).collect();
        order.sort_by_key(|&i| {
            (ops[i as usize].time, matches!(ops[i as usize].kind, PrefixOpKind::Min { .. }))
        });

        // Sequence ranks replace raw times: unique, and updates precede
        // queries sharing a timestamp.
        let mut updates: Vec<(u64, u32, Weight)> = Vec::new();
        let mut queries: Vec<(u64, u32, u32)> = Vec::new();
        let mut results = Vec::new();
        for (seq, &i) in order.iter().enumerate() {
            let op = ops[i as usize];
            match op.kind {
                PrefixOpKind::Add { x } => updates.push((seq as u64, op.index as u32, x)),
                PrefixOpKind::Min { offset, tag } => {
                    queries.push((seq as u64, op.index as u32, results.len() as u32));
                    results.push(MinResult { tag, offset, value: 0 });
                }
            }
        }

        let mut counters = BatchCounters {
            updates: updates.len() as u64,
            queries: queries.len() as u64,
            h_per_depth: vec![0; self.max_depth as usize + 1],
            monotone: true,
            ..Default::default()
        };

        let (hist, root_mins) = self.update_sweep(&updates, &mut counters);
        self.query_sweep(&queries, &hist, &root_mins, &mut counters, &mut results);

        // Final weights via a suffix accumulation of per-leaf bumps: an
        // update at leaf i raises every position <= i.
        let mut bump = vec![0 as Weight; n];
        for &(_, leaf, x) in &updates {
            bump[leaf as usize] += x;
        }
        let mut final_weights = self.weights0.clone();
        let mut acc = 0;
        for p in (0..n).rev() {
            acc += bump[p];
            final_weights[p] += acc;
        }

        let node_deltas = self
            .nodes
            .iter()
            .enumerate()
            .map(|(b, nd)| match &hist[b] {
                Some(h) if !h.delta.is_empty() => *h.delta.last().unwrap(),
                _ => nd.delta0,
            })
            .collect();

        // Work identity: every update is relevant on one leaf-to-root path
        // of <= ceil(log2 n) + 1 nodes, and at most 2n - 1 nodes exist.
        assert!(
            counters.update_node_work
                <= counters.updates * (ceil_log2(n) as u64 + 1) + 2 * n as u64,
            "prefix work counter identity violated"
        );
        assert!(counters.monotone, "sweeps must touch levels bottom-up");

        Ok(BatchOutput { results, final_weights, node_deltas, counters })
    }

    /// Bottom-up update sweep. Returns the per-node history (relevant
    /// times and difference states) plus the root's minimum stream.
    fn update_sweep(
        &self,
        updates: &[(u64, u32, Weight)],
        counters: &mut BatchCounters,
    ) -> (Vec<Option<Hist>>, Vec<(u64, Weight)>) {
        let mut hist: Vec<Option<Hist>> = vec![None; self.nodes.len()];
        let mut levels: Vec<Vec<(u32, UpdState)>> =
            vec![Vec::new(); self.max_depth as usize + 1];

        // Group the updates by leaf; stable sort keeps ascending seq
        // within each group.
        let mut by_leaf: Vec<u32> = (0..updates.len() as u32).collect();
        by_leaf.sort_by_key(|&i| updates[i as usize].1);
        let mut i = 0;
        while i < by_leaf.len() {
            let leaf = updates[by_leaf[i] as usize].1;
            let mut state = UpdState::default();
            while i < by_leaf.len() && updates[by_leaf[i] as usize].1 == leaf {
                let (seq, _, x) = updates[by_leaf[i] as usize];
                state.h.push(seq);
                state.x.push(x);
                state.phi.push(x); // at a leaf the minimum moves by the increment
                i += 1;
            }
            let node = self.leaf_node[leaf as usize];
            let depth = self.nodes[node as usize].depth;
            levels[depth as usize].push((node, state));
        }
        for level in &mut levels {
            level.sort_by_key(|&(node, _)| node);
        }

        let mut last_depth = u32::MAX;
        let mut root_state: Option<UpdState> = None;
        for d in (0..=self.max_depth).rev() {
            let level = std::mem::take(&mut levels[d as usize]);
            if level.is_empty() {
                continue;
            }
            counters.monotone &= d < last_depth || last_depth == u32::MAX;
            last_depth = d;
            for (_, state) in &level {
                counters.update_node_work += state.h.len() as u64 + 1;
                counters.h_per_depth[d as usize] += state.h.len() as u64;
            }
            if d == 0 {
                let (root, state) = level.into_iter().next().unwrap();
                debug_assert_eq!(root, 0);
                root_state = Some(state);
                break;
            }
            // Pair sibling states and merge them into parent states.
            let mut tagged: Vec<(u32, bool, u32, UpdState)> = level
                .into_iter()
                .map(|(node, st)| {
                    (self.nodes[node as usize].parent, self.is_right_child(node), node, st)
                })
                .collect();
            tagged.sort_by_key(|&(parent, right, _, _)| (parent, right));
            let mut groups: Vec<(u32, Option<UpdState>, Option<UpdState>)> = Vec::new();
            for (parent, right, _, st) in tagged {
                match groups.last_mut() {
                    Some((p, _, r)) if *p == parent => {
                        debug_assert!(right && r.is_none());
                        *r = Some(st);
                    }
                    _ => {
                        let (l, r) = if right { (None, Some(st)) } else { (Some(st), None) };
                        groups.push((parent, l, r));
                    }
                }
            }
            let merged: Vec<(u32, UpdState, Hist)> = if groups.len() >= 16 {
                groups
                    .into_par_iter()
                    .map(|(parent, l, r)| self.merge_updates(parent, l, r))
                    .collect()
            } else {
                groups
                    .into_iter()
                    .map(|(parent, l, r)| self.merge_updates(parent, l, r))
                    .collect()
            };
            for (parent, state, h) in merged {
                hist[parent as usize] = Some(h);
                levels[d as usize - 1].push((parent, state));
            }
        }

        // The root minimum after every update, for query extraction.
        let root_mins = match root_state {
            Some(state) => {
                let sums = all_prefix_sums(&state.phi);
                let min0 = self.nodes[0].min0;
                state.h.iter().zip(sums).map(|(&seq, s)| (seq, min0 + s)).collect()
            }
            None => Vec::new(),
        };
        (hist, root_mins)
    }

    /// Merge two child update states into the parent state, producing the
    /// parent's difference history along the way.
    fn merge_updates(
        &self,
        parent: u32,
        l: Option<UpdState>,
        r: Option<UpdState>,
    ) -> (u32, UpdState, Hist) {
        let l = l.unwrap_or_default();
        let r = r.unwrap_or_default();
        let total = l.h.len() + r.h.len();
        let delta0 = self.nodes[parent as usize].delta0;

        let mut h = Vec::with_capacity(total);
        let mut x = Vec::with_capacity(total);
        // Materialized per-side minimum changes: an update relevant only to
        // the left child leaves the right subtree untouched (phi_r = 0); an
        // update relevant only to the right child covers the whole left
        // subtree (phi_l = its increment).
        let mut phi_l = Vec::with_capacity(total);
        let mut phi_r = Vec::with_capacity(total);
        let (mut i, mut j) = (0, 0);
        while i < l.h.len() || j < r.h.len() {
            let take_left = j >= r.h.len() || (i < l.h.len() && l.h[i] < r.h[j]);
            if take_left {
                h.push(l.h[i]);
                x.push(l.x[i]);
                phi_l.push(l.phi[i]);
                phi_r.push(0);
                i += 1;
            } else {
                h.push(r.h[j]);
                x.push(r.x[j]);
                phi_l.push(r.x[j]);
                phi_r.push(r.phi[j]);
                j += 1;
            }
        }

        let sum_l = all_prefix_sums(&phi_l);
        let sum_r = all_prefix_sums(&phi_r);
        let delta: Vec<Weight> =
            sum_r.iter().zip(&sum_l).map(|(r, l)| delta0 + r - l).collect();

        let phi: Vec<Weight> = (0..total)
            .map(|k| {
                let dprev = if k == 0 { delta0 } else { delta[k - 1] };
                let dnew = delta[k];
                match (dprev > 0, dnew > 0) {
                    (true, true) => phi_l[k],
                    (false, true) => phi_l[k] - dprev,
                    (false, false) => phi_r[k],
                    (true, false) => phi_r[k] + dprev,
                }
            })
            .collect();

        let state = UpdState { h: h.clone(), x, phi };
        (parent, state, Hist { h, delta })
    }

    /// Bottom-up query sweep: carries per-query intermediate differences
    /// `d` upward, reading each node's difference state at the query's
    /// time, then converts to absolute minima at the root.
    fn query_sweep(
        &self,
        queries: &[(u64, u32, u32)],
        hist: &[Option<Hist>],
        root_mins: &[(u64, Weight)],
        counters: &mut BatchCounters,
        results: &mut [MinResult],
    ) {
        if queries.is_empty() {
            return;
        }
        let mut levels: Vec<Vec<(u32, Vec<QEntry>)>> =
            vec![Vec::new(); self.max_depth as usize + 1];
        let mut by_leaf: Vec<u32> = (0..queries.len() as u32).collect();
        by_leaf.sort_by_key(|&i| queries[i as usize].1);
        let mut i = 0;
        while i < by_leaf.len() {
            let leaf = queries[by_leaf[i] as usize].1;
            let mut entries = Vec::new();
            while i < by_leaf.len() && queries[by_leaf[i] as usize].1 == leaf {
                let (seq, _, qpos) = queries[by_leaf[i] as usize];
                entries.push(QEntry { seq, d: 0, qpos });
                i += 1;
            }
            let node = self.leaf_node[leaf as usize];
            let depth = self.nodes[node as usize].depth;
            levels[depth as usize].push((node, entries));
        }
        for level in &mut levels {
            level.sort_by_key(|&(node, _)| node);
        }

        let mut last_depth = u32::MAX;
        let mut root_entries: Option<Vec<QEntry>> = None;
        for d in (0..=self.max_depth).rev() {
            let level = std::mem::take(&mut levels[d as usize]);
            if level.is_empty() {
                continue;
            }
            counters.monotone &= d < last_depth || last_depth == u32::MAX;
            last_depth = d;
            for (_, entries) in &level {
                counters.query_node_work += entries.len() as u64 + 1;
            }
            if d == 0 {
                root_entries = Some(level.into_iter().next().unwrap().1);
                break;
            }
            let mut tagged: Vec<(u32, bool, Vec<QEntry>)> = level
                .into_iter()
                .map(|(node, es)| {
                    (self.nodes[node as usize].parent, self.is_right_child(node), es)
                })
                .collect();
            tagged.sort_by_key(|&(parent, right, _)| (parent, right));
            type Sides = (u32, Option<Vec<QEntry>>, Option<Vec<QEntry>>);
            let mut groups: Vec<Sides> = Vec::new();
            for (parent, right, es) in tagged {
                match groups.last_mut() {
                    Some((p, _, r)) if *p == parent => {
                        debug_assert!(right && r.is_none());
                        *r = Some(es);
                    }
                    _ => {
                        let (l, r) = if right { (None, Some(es)) } else { (Some(es), None) };
                        groups.push((parent, l, r));
                    }
                }
            }
            let merged: Vec<(u32, Vec<QEntry>)> = if groups.len() >= 16 {
                groups
                    .into_par_iter()
                    .map(|(parent, l, r)| (parent, self.merge_queries(parent, l, r, hist)))
                    .collect()
            } else {
                groups
                    .into_iter()
                    .map(|(parent, l, r)| (parent, self.merge_queries(parent, l, r, hist)))
                    .collect()
            };
            for (parent, entries) in merged {
                levels[d as usize - 1].push((parent, entries));
            }
        }

        // At the root every query reads the last overall minimum at or
        // before its time (initially the built minimum).
        let entries = root_entries.expect("queries reach the root");
        let min0 = self.nodes[0].min0;
        let mut k = 0usize;
        let mut current = min0;
        for q in entries {
            while k < root_mins.len() && root_mins[k].0 < q.seq {
                current = root_mins[k].1;
                k += 1;
            }
            results[q.qpos as usize].value = q.d + current;
        }
    }

    /// Merge child query streams through one inner node, applying the
    /// three-case difference rule against the node's state at each query's
    /// time (last update at or before it, initially the built difference).
    fn merge_queries(
        &self,
        parent: u32,
        l: Option<Vec<QEntry>>,
        r: Option<Vec<QEntry>>,
        hist: &[Option<Hist>],
    ) -> Vec<QEntry> {
        let l = l.unwrap_or_default();
        let r = r.unwrap_or_default();
        let delta0 = self.nodes[parent as usize].delta0;
        let empty = (Vec::new(), Vec::new());
        let (h, delta): (&[u64], &[Weight]) = match &hist[parent as usize] {
            Some(hs) => (&hs.h, &hs.delta),
            None => (&empty.0, &empty.1),
        };

        let mut out = Vec::with_capacity(l.len() + r.len());
        let (mut i, mut j, mut k) = (0, 0, 0);
        let mut current = delta0;
        while i < l.len() || j < r.len() {
            let take_left = j >= r.len() || (i < l.len() && l[i].seq < r[j].seq);
            let (q, from_left) = if take_left {
                let q = l[i];
                i += 1;
                (q, true)
            } else {
                let q = r[j];
                j += 1;
                (q, false)
            };
            // segmented broadcast of the last difference state before q
            while k < h.len() && h[k] < q.seq {
                current = delta[k];
                k += 1;
            }
            let dl = if from_left { q.d } else { 0 };
            let dr = if from_left { 0 } else { q.d };
            let d = if current > 0 {
                dl
            } else if !from_left && dr + current < 0 {
                dr
            } else {
                dl - current
            };
            out.push(QEntry { seq: q.seq, d, qpos: q.qpos });
        }
        out
    }
}
