//! Batch MinPath/AddPath over a rooted tree.
//!
//! Each vertex-to-root operation expands into at most ceil(log2 n) prefix
//! operations, one per decomposition path met on the walk: the vertex's
//! own path up to the vertex, and every ancestor path up to the vertex
//! where the previous path attaches. All per-path batches run
//! independently; a Min result is the fold of its routed prefix minima.

use rayon::prelude::*;

use crate::decomp::{decompose, PathDecomposition};
use crate::error::{Error, Result};
use crate::prefix::{BatchCounters, MinResult, PrefixOp, PrefixStructure, Weight};
use crate::rng::Rng;
use crate::tree::RootedTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeOpKind {
    Add { x: Weight },
    Min { offset: Weight, tag: u64 },
}

/// One timestamped operation on the path from `vertex` to the root.
/// Operations sharing a timestamp apply updates-first.
#[derive(Clone, Copy, Debug)]
pub struct TreeOp {
    pub time: u64,
    pub vertex: u32,
    pub kind: TreeOpKind,
}

impl TreeOp {
    pub fn add(time: u64, vertex: u32, x: Weight) -> Self {
        TreeOp { time, vertex, kind: TreeOpKind::Add { x } }
    }

    pub fn min(time: u64, vertex: u32, offset: Weight, tag: u64) -> Self {
        TreeOp { time, vertex, kind: TreeOpKind::Min { offset, tag } }
    }
}

#[derive(Clone, Debug)]
pub struct TreeBatchOutput {
    /// One entry per Min op, ordered by time.
    pub results: Vec<MinResult>,
    /// Per-vertex weights after all updates.
    pub final_weights: Vec<Weight>,
    pub counters: BatchCounters,
}

/// Prefix structures over the decomposition paths plus precomputed routes.
pub struct MinPathStructure {
    decomp: PathDecomposition,
    prefixes: Vec<PrefixStructure>,
    /// Per vertex: (path id, prefix end position) pairs from the vertex's
    /// own path up to the root's path.
    route: Vec<Vec<(u32, u32)>>,
}

/// Decompose the tree, build one prefix structure per path (weights in
/// front-to-back order), and precompute every vertex's route.
pub fn build_minpath(t: &RootedTree, weights: &[Weight], rng: &mut Rng) -> MinPathStructure {
    assert_eq!(weights.len(), t.len());
    let decomp = decompose(t, rng);
    let prefixes: Vec<PrefixStructure> = decomp
        .paths
        .iter()
        .map(|path| {
            let ws: Vec<Weight> = path.iter().map(|&v| weights[v as usize]).collect();
            PrefixStructure::build(&ws).expect("paths are nonempty")
        })
        .collect();
    let n = t.len();
    let bound = crate::prefix_route_bound(n);
    let route: Vec<Vec<(u32, u32)>> = (0..n as u32)
        .map(|v| {
            let mut hops = Vec::new();
            let (mut pid, pos) = decomp.path_of[v as usize];
            hops.push((pid, pos));
            while let Some(a) = decomp.attach[pid as usize] {
                let (apid, apos) = decomp.path_of[a as usize];
                hops.push((apid, apos));
                pid = apid;
            }
            assert!(hops.len() <= bound, "route of {v} exceeds log bound");
            hops
        })
        .collect();
    MinPathStructure { decomp, prefixes, route }
}

impl MinPathStructure {
    pub fn decomposition(&self) -> &PathDecomposition {
        &self.decomp
    }

    pub fn route(&self, v: u32) -> &[(u32, u32)] {
        &self.route[v as usize]
    }

    /// Execute a batch of tree operations as if sequential.
    pub fn execute(&self, ops: &[TreeOp]) -> Result<TreeBatchOutput> {
        let n = self.route.len();
        for op in ops {
            if op.vertex as usize >= n {
                return Err(Error::UnknownVertex { vertex: op.vertex as usize, len: n });
            }
        }
        let mut order: Vec<u32> = (0..ops.len() as u32).collect();
        order.sort_by_key(|&i| {
            (ops[i as usize].time, matches!(ops[i as usize].kind, TreeOpKind::Min { .. }))
        });

        // Expand each op to one prefix op per routed path, all sharing the
        // op's sequence rank; Min expansions carry the query's canonical
        // index as tag so per-path results can be folded back together.
        let mut expanded: Vec<(u32, PrefixOp)> = Vec::new();
        let mut results: Vec<MinResult> = Vec::new();
        for (seq, &i) in order.iter().enumerate() {
            let op = ops[i as usize];
            let hops = &self.route[op.vertex as usize];
            debug_assert!({
                let mut pids: Vec<u32> = hops.iter().map(|h| h.0).collect();
                pids.dedup();
                pids.len() == hops.len()
            });
            match op.kind {
                TreeOpKind::Add { x } => {
                    for &(pid, pos) in hops {
                        expanded.push((pid, PrefixOp::add(seq as u64, pos as usize, x)));
                    }
                }
                TreeOpKind::Min { offset, tag } => {
                    let qpos = results.len() as u64;
                    for &(pid, pos) in hops {
                        expanded.push((pid, PrefixOp::min(seq as u64, pos as usize, 0, qpos)));
                    }
                    results.push(MinResult { tag, offset, value: Weight::MAX });
                }
            }
        }

        // One stable sort groups the per-path batches while keeping each
        // path's ops in time order.
        expanded.sort_by_key(|&(pid, _)| pid);
        let mut slices: Vec<(u32, &[(u32, PrefixOp)])> = Vec::new();
        let mut start = 0;
        for end in 1..=expanded.len() {
            if end == expanded.len() || expanded[end].0 != expanded[start].0 {
                slices.push((expanded[start].0, &expanded[start..end]));
                start = end;
            }
        }

        let outputs: Vec<(u32, crate::prefix::BatchOutput)> = slices
            .par_iter()
            .map(|&(pid, chunk)| {
                let ops: Vec<PrefixOp> = chunk.iter().map(|&(_, op)| op).collect();
                let out = self.prefixes[pid as usize]
                    .execute_batch(&ops)
                    .expect("expanded ops stay in range");
                (pid, out)
            })
            .collect();

        let mut counters = BatchCounters { monotone: true, ..Default::default() };
        let mut final_weights: Vec<Weight> = (0..n)
            .map(|v| {
                let (pid, pos) = self.decomp.path_of[v];
                self.prefixes[pid as usize].initial_weights()[pos as usize]
            })
            .collect();
        for (pid, out) in &outputs {
            counters.absorb(&out.counters);
            for r in &out.results {
                let slot = &mut results[r.tag as usize];
                slot.value = slot.value.min(r.value);
            }
            let path = &self.decomp.paths[*pid as usize];
            for (pos, &v) in path.iter().enumerate() {
                final_weights[v as usize] = out.final_weights[pos];
            }
        }
        Ok(TreeBatchOutput { results, final_weights, counters })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{random_tree, NaiveTreePath};
    use crate::rng::stream_rng;
    use rand::Rng as _;

    fn weights_for(n: usize, rng: &mut crate::rng::Rng) -> Vec<Weight> {
        (0..n).map(|_| rng.gen_range(-20..=20)).collect()
    }

    #[test]
    fn path_tree_single_prefix_structure() {
        let t = RootedTree::from_parents(0, vec![0, 0, 1, 2]).unwrap();
        let mut rng = stream_rng(41, 0);
        let s = build_minpath(&t, &[5, 3, 8, 1], &mut rng);
        assert_eq!(s.prefixes.len(), 1);
        assert_eq!(s.route(3), &[(0, 3)]);
    }

    #[test]
    fn star_routes_have_length_two() {
        let t = RootedTree::from_parents(0, vec![0, 0, 0, 0]).unwrap();
        let mut rng = stream_rng(42, 0);
        let s = build_minpath(&t, &[0; 4], &mut rng);
        for v in 1..4u32 {
            assert_eq!(s.route(v).len(), 2);
        }
        assert_eq!(s.route(0).len(), 1);
    }

    #[test]
    fn route_union_matches_parent_chain() {
        let mut rng = stream_rng(43, 0);
        for _ in 0..80 {
            let n = rng.gen_range(1..=256);
            let t = random_tree(n, &mut rng);
            let s = build_minpath(&t, &vec![0; n], &mut rng);
            for v in 0..n as u32 {
                let mut want = vec![v];
                let mut cur = v;
                while cur != t.root {
                    cur = t.parent[cur as usize];
                    want.push(cur);
                }
                want.sort();
                let mut got = Vec::new();
                for &(pid, pos) in s.route(v) {
                    got.extend_from_slice(&s.decomp.paths[pid as usize][..=pos as usize]);
                }
                got.sort();
                assert_eq!(got, want, "n={n} v={v}");
            }
        }
    }

    #[test]
    fn min_on_fresh_structure() {
        let t = RootedTree::from_parents(0, vec![0, 0, 1]).unwrap();
        let mut rng = stream_rng(44, 0);
        let s = build_minpath(&t, &[4, 9, 6], &mut rng);
        let out = s.execute(&[TreeOp::min(1, 2, 0, 0)]).unwrap();
        assert_eq!(out.results[0].value, 4);
    }

    #[test]
    fn add_then_min_at_root() {
        let t = RootedTree::from_parents(0, vec![0, 0, 1]).unwrap();
        let mut rng = stream_rng(45, 0);
        let s = build_minpath(&t, &[4, 9, 6], &mut rng);
        let out = s
            .execute(&[TreeOp::add(1, 0, -10), TreeOp::min(2, 0, 0, 0)])
            .unwrap();
        assert_eq!(out.results[0].value, -6);
    }

    #[test]
    fn unknown_vertex_rejected() {
        let t = RootedTree::from_parents(0, vec![0, 0]).unwrap();
        let mut rng = stream_rng(46, 0);
        let s = build_minpath(&t, &[0, 0], &mut rng);
        assert!(s.execute(&[TreeOp::min(1, 9, 0, 0)]).is_err());
    }

    #[test]
    fn matches_parent_chain_simulator() {
        let mut rng = stream_rng(47, 0);
        for round in 0..200 {
            let n = rng.gen_range(1..=64);
            let k = rng.gen_range(0..=128);
            let t = random_tree(n, &mut rng);
            let weights = weights_for(n, &mut rng);
            let ops: Vec<TreeOp> = (0..k)
                .map(|_| {
                    let time = rng.gen_range(0..=60u64);
                    let v = rng.gen_range(0..n as u32);
                    if rng.gen_bool(0.5) {
                        TreeOp::add(time, v, rng.gen_range(-9..=9))
                    } else {
                        TreeOp::min(time, v, 0, 0)
                    }
                })
                .collect();
            let s = build_minpath(&t, &weights, &mut rng);
            let out = s.execute(&ops).unwrap();
            let naive = NaiveTreePath::run(&t, &weights, &ops);
            let got: Vec<Weight> = out.results.iter().map(|r| r.value).collect();
            assert_eq!(got, naive.results, "round={round} n={n} k={k}");
            assert_eq!(out.final_weights, naive.final_weights, "round={round}");
        }
    }
}
