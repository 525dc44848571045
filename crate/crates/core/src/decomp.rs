//! Tree decomposition into boughs and root-anchored vertex-disjoint paths.
//!
//! A bough starts at a leaf and climbs until the first vertex that has a
//! sibling (or the root, when the tree is a path). Boughs are identified
//! by repeatedly contracting an independent set of edges whose endpoints
//! are both non-branching, keeping merged labels as linked lists with head
//! and tail pointers; the independent set comes from random mate coins or,
//! deterministically, from a 3-coloring of the non-branching chains.
//!
//! Removing all boughs and repeating yields the path decomposition: the
//! number of leaves at least halves per phase, so any root-to-leaf path
//! meets at most `floor(log2 #leaves) + 1` paths.

use rand::Rng as _;

use crate::rng::Rng;
use crate::tree::RootedTree;

const NONE: u32 = u32::MAX;

/// A maximal leaf-anchored chain, ordered leaf to top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bough {
    pub vertices: Vec<u32>,
}

impl Bough {
    pub fn leaf(&self) -> u32 {
        self.vertices[0]
    }

    pub fn top(&self) -> u32 {
        *self.vertices.last().unwrap()
    }
}

/// Vertex-disjoint root-anchored paths covering the tree.
#[derive(Clone, Debug)]
pub struct PathDecomposition {
    /// Each path ordered front (nearest root) to back.
    pub paths: Vec<Vec<u32>>,
    /// Per vertex: (path id, position from front).
    pub path_of: Vec<(u32, u32)>,
    /// Per path: parent of its front vertex (none for the root's path).
    pub attach: Vec<Option<u32>>,
    /// Per path: bough phase that produced it.
    pub phase: Vec<u32>,
    pub phase_count: u32,
}

enum SelectMode<'a> {
    RandomMate(&'a mut Rng),
    ThreeColoring,
}

/// Contraction engine over the alive-induced subtree of `parent`.
/// Returns boughs (leaf to top, sorted by leaf id) and the round count.
fn identify_boughs(
    parent: &[u32],
    root: u32,
    alive: &[bool],
    mode: &mut SelectMode,
) -> (Vec<Bough>, usize) {
    let n = parent.len();
    debug_assert!(alive[root as usize]);
    let mut cur_parent = vec![NONE; n];
    let mut child_count = vec![0u32; n];
    let mut only_child = vec![NONE; n];
    let mut alive_count = 0usize;
    for v in 0..n as u32 {
        if !alive[v as usize] {
            continue;
        }
        alive_count += 1;
        if v != root {
            let p = parent[v as usize];
            debug_assert!(alive[p as usize], "parent of an alive vertex must be alive");
            cur_parent[v as usize] = p;
            child_count[p as usize] += 1;
            only_child[p as usize] = v;
        }
    }
    for v in 0..n {
        if child_count[v] > 1 {
            only_child[v] = NONE;
        }
    }

    // Merged-label linked lists, leaf to top, with head and tail pointers.
    // A blob is always represented by its topmost label, so the tail
    // pointer is the representative itself.
    let mut head: Vec<u32> = (0..n as u32).collect();
    let mut next = vec![NONE; n];
    let mut merged = vec![false; n];

    let live = |v: u32, merged: &[bool]| alive[v as usize] && !merged[v as usize];
    let nb = |v: u32, child_count: &[u32]| child_count[v as usize] <= 1;

    // Candidate child endpoints: alive, non-root, both edge endpoints
    // non-branching. The set can only shrink modulo parent rewiring.
    let mut worklist: Vec<u32> = (0..n as u32)
        .filter(|&v| live(v, &merged) && v != root && nb(v, &child_count))
        .collect();
    let mut rounds = 0usize;
    let mut coins = vec![false; n];
    let round_cap = 8 * (usize::BITS - n.max(2).leading_zeros()) as usize + 16;

    loop {
        worklist.retain(|&v| live(v, &merged));
        let candidates: Vec<u32> = worklist
            .iter()
            .copied()
            .filter(|&v| nb(cur_parent[v as usize], &child_count))
            .collect();
        if candidates.is_empty() {
            break;
        }
        rounds += 1;

        let selected: Vec<u32> = match mode {
            // Past the cap, fall back to the deterministic selection so
            // termination does not ride on the coins.
            SelectMode::RandomMate(rng) if rounds <= round_cap => {
                for v in 0..n as u32 {
                    if live(v, &merged) && nb(v, &child_count) {
                        coins[v as usize] = rng.gen::<bool>();
                    }
                }
                let mut candidate_child = vec![false; n];
                for &v in &candidates {
                    candidate_child[v as usize] = true;
                }
                candidates
                    .iter()
                    .copied()
                    .filter(|&v| {
                        let p = cur_parent[v as usize];
                        // an edge with no adjacent candidate edge is always
                        // independent; take it regardless of the coins
                        let isolated = !candidate_child[p as usize]
                            && (only_child[v as usize] == NONE
                                || !candidate_child[only_child[v as usize] as usize]);
                        isolated || (coins[p as usize] && !coins[v as usize])
                    })
                    .collect()
            }
            _ => select_by_coloring(&candidates, &cur_parent, &child_count, root, &merged, alive),
        };

        for &v in &selected {
            let p = cur_parent[v as usize];
            debug_assert!(live(p, &merged) && nb(p, &child_count) && child_count[p as usize] == 1);
            // child's own child edge must not be selected alongside
            debug_assert!(
                only_child[v as usize] == NONE
                    || !selected.contains(&only_child[v as usize])
            );
            // concatenate labels: v's segment lies below p's
            next[v as usize] = head[p as usize];
            head[p as usize] = head[v as usize];
            merged[v as usize] = true;
            child_count[p as usize] = child_count[v as usize];
            only_child[p as usize] = only_child[v as usize];
            if only_child[v as usize] != NONE {
                cur_parent[only_child[v as usize] as usize] = p;
            }
        }
    }

    let mut boughs = Vec::new();
    for v in 0..n as u32 {
        if live(v, &merged) && child_count[v as usize] == 0 {
            let mut vertices = Vec::new();
            let mut cur = head[v as usize];
            while cur != NONE {
                vertices.push(cur);
                cur = next[cur as usize];
            }
            debug_assert_eq!(*vertices.last().unwrap(), v);
            boughs.push(Bough { vertices });
        }
    }
    boughs.sort_by_key(|b| b.leaf());
    debug_assert!(alive_count == 0 || !boughs.is_empty());
    (boughs, rounds)
}

/// Deterministic independent-set selection: 3-color the non-branching
/// chains, take the color class with the most selectable vertices, and
/// select each such vertex's child edge.
fn select_by_coloring(
    candidates: &[u32],
    cur_parent: &[u32],
    child_count: &[u32],
    root: u32,
    merged: &[bool],
    alive: &[bool],
) -> Vec<u32> {
    let n = cur_parent.len();
    let nb = |v: u32| child_count[v as usize] <= 1;
    let live = |v: u32| alive[v as usize] && !merged[v as usize];
    let pred: Vec<Option<u32>> = (0..n as u32)
        .map(|v| {
            if !live(v) || !nb(v) || v == root {
                return None;
            }
            let p = cur_parent[v as usize];
            (p != NONE && nb(p)).then_some(p)
        })
        .collect();
    let colors = three_coloring(&pred);
    // A candidate edge is (parent, v); selecting by the parent's color
    // keeps selected edges disjoint because chain neighbors differ.
    let mut count = [0usize; 3];
    for &v in candidates {
        count[colors[cur_parent[v as usize] as usize] as usize] += 1;
    }
    let best = (0..3).max_by_key(|&c| (count[c], 3 - c)).unwrap() as u8;
    candidates
        .iter()
        .copied()
        .filter(|&v| colors[cur_parent[v as usize] as usize] == best)
        .collect()
}

/// 3-coloring of chain vertices by iterated bit tricks on the chain
/// predecessor pointers (`pred` must be injective). Adjacent chain
/// vertices receive different colors.
pub fn three_coloring(pred: &[Option<u32>]) -> Vec<u8> {
    let n = pred.len();
    let mut color: Vec<u64> = (0..n as u64).collect();
    #[cfg(debug_assertions)]
    {
        let mut seen = std::collections::HashSet::new();
        for p in pred.iter().flatten() {
            assert!(seen.insert(*p), "pred must be injective (chains)");
        }
    }
    loop {
        let max = color.iter().copied().max().unwrap_or(0);
        if max < 6 {
            break;
        }
        color = (0..n)
            .map(|v| {
                let c = color[v];
                let pc = match pred[v] {
                    Some(p) => color[p as usize],
                    None => c ^ 1,
                };
                let k = (c ^ pc).trailing_zeros() as u64;
                2 * k + ((c >> k) & 1)
            })
            .collect();
    }
    // successor pointers to shrink 6 colors down to 3
    let mut succ = vec![NONE; n];
    for (v, p) in pred.iter().enumerate() {
        if let Some(p) = p {
            succ[*p as usize] = v as u32;
        }
    }
    for cls in (3..6u64).rev() {
        let snapshot = color.clone();
        for v in 0..n {
            if snapshot[v] != cls {
                continue;
            }
            let pc = pred[v].map(|p| snapshot[p as usize]);
            let sc = (succ[v] != NONE).then(|| snapshot[succ[v] as usize]);
            color[v] = (0..3u64).find(|c| Some(*c) != pc && Some(*c) != sc).unwrap();
        }
    }
    color.iter().map(|&c| c as u8).collect()
}

fn all_alive(n: usize) -> Vec<bool> {
    vec![true; n]
}

/// Identify the boughs of `t` with the random-mate contraction.
pub fn find_boughs(t: &RootedTree, rng: &mut Rng) -> Vec<Bough> {
    find_boughs_with_rounds(t, rng).0
}

/// Same, also reporting the contraction round count (for bound checks).
pub fn find_boughs_with_rounds(t: &RootedTree, rng: &mut Rng) -> (Vec<Bough>, usize) {
    let alive = all_alive(t.len());
    identify_boughs(&t.parent, t.root, &alive, &mut SelectMode::RandomMate(rng))
}

/// Identify the boughs of `t` with the deterministic 3-coloring selection.
pub fn find_boughs_deterministic(t: &RootedTree) -> Vec<Bough> {
    let alive = all_alive(t.len());
    identify_boughs(&t.parent, t.root, &alive, &mut SelectMode::ThreeColoring).0
}

/// Decompose `t` into vertex-disjoint root-anchored paths by repeatedly
/// identifying and removing boughs.
pub fn decompose(t: &RootedTree, rng: &mut Rng) -> PathDecomposition {
    decompose_impl(t, &mut SelectMode::RandomMate(rng))
}

/// Fully deterministic variant (3-coloring bough identification).
pub fn decompose_deterministic(t: &RootedTree) -> PathDecomposition {
    decompose_impl(t, &mut SelectMode::ThreeColoring)
}

fn decompose_impl(t: &RootedTree, mode: &mut SelectMode) -> PathDecomposition {
    let n = t.len();
    let mut alive = all_alive(n);
    let mut remaining = n;
    let mut out = PathDecomposition {
        paths: Vec::new(),
        path_of: vec![(NONE, NONE); n],
        attach: Vec::new(),
        phase: Vec::new(),
        phase_count: 0,
    };
    while remaining > 0 {
        let (boughs, _) = identify_boughs(&t.parent, t.root, &alive, mode);
        for bough in &boughs {
            let pid = out.paths.len() as u32;
            // reverse to front = nearest root
            let path: Vec<u32> = bough.vertices.iter().rev().copied().collect();
            for (pos, &v) in path.iter().enumerate() {
                debug_assert!(alive[v as usize]);
                alive[v as usize] = false;
                remaining -= 1;
                out.path_of[v as usize] = (pid, pos as u32);
            }
            let front = path[0];
            out.attach.push((front != t.root).then(|| t.parent[front as usize]));
            out.phase.push(out.phase_count);
            out.paths.push(path);
        }
        out.phase_count += 1;
    }
    debug_assert!(out.path_of.iter().all(|&(p, _)| p != NONE));
    out
}

impl PathDecomposition {
    /// Number of decomposition paths met on the walk from `v` to the root.
    pub fn route_len(&self, v: u32, t: &RootedTree) -> usize {
        let mut count = 1;
        let (mut pid, _) = self.path_of[v as usize];
        while let Some(a) = self.attach[pid as usize] {
            debug_assert_ne!(self.paths[pid as usize][0], t.root);
            pid = self.path_of[a as usize].0;
            count += 1;
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{random_tree, sequential_boughs};
    use crate::rng::stream_rng;
    use crate::tree::RootedTree;

    fn boughs_as_vecs(bs: &[Bough]) -> Vec<Vec<u32>> {
        bs.iter().map(|b| b.vertices.clone()).collect()
    }

    /// The nine-vertex tree used in the decomposition figures: root r with
    /// child chain splitting into four leaf chains.
    fn figure_tree() -> RootedTree {
        // 0=r, 1=w0, 2=w1, 3=w4, 4=w6, 5=w5, 6=w7, 7=w8, 8=w9, 9=w3
        let parent = vec![0, 0, 1, 2, 3, 1, 5, 5, 7, 1];
        RootedTree::from_parents(0, parent).unwrap()
    }

    #[test]
    fn figure_tree_has_four_boughs() {
        let mut rng = stream_rng(31, 0);
        let bs = find_boughs(&figure_tree(), &mut rng);
        assert_eq!(bs.len(), 4);
        let got = boughs_as_vecs(&bs);
        assert!(got.contains(&vec![4, 3, 2])); // w6 w4 w1
        assert!(got.contains(&vec![6])); // w7
        assert!(got.contains(&vec![8, 7])); // w9 w8
        assert!(got.contains(&vec![9])); // w3
    }

    #[test]
    fn path_tree_is_one_bough_to_root() {
        let t = RootedTree::from_parents(0, vec![0, 0, 1, 2, 3]).unwrap();
        let mut rng = stream_rng(32, 0);
        let bs = find_boughs(&t, &mut rng);
        assert_eq!(boughs_as_vecs(&bs), vec![vec![4, 3, 2, 1, 0]]);
    }

    #[test]
    fn star_gives_singleton_boughs() {
        let t = RootedTree::from_parents(0, vec![0, 0, 0, 0, 0]).unwrap();
        let mut rng = stream_rng(33, 0);
        let bs = find_boughs(&t, &mut rng);
        assert_eq!(bs.len(), 4);
        assert!(bs.iter().all(|b| b.vertices.len() == 1));
    }

    #[test]
    fn singleton_tree_is_one_singleton_bough() {
        let t = RootedTree::from_parents(0, vec![0]).unwrap();
        let mut rng = stream_rng(34, 0);
        assert_eq!(boughs_as_vecs(&find_boughs(&t, &mut rng)), vec![vec![0]]);
        assert_eq!(boughs_as_vecs(&find_boughs_deterministic(&t)), vec![vec![0]]);
    }

    #[test]
    fn two_vertex_path_single_bough() {
        let t = RootedTree::from_parents(0, vec![0, 0]).unwrap();
        assert_eq!(boughs_as_vecs(&find_boughs_deterministic(&t)), vec![vec![1, 0]]);
    }

    #[test]
    fn complete_binary_tree_depth3_has_leaf_singletons() {
        // 15 vertices, every inner vertex branches
        let parent = vec![0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6];
        let t = RootedTree::from_parents(0, parent).unwrap();
        let bs = find_boughs_deterministic(&t);
        assert_eq!(bs.len(), 8);
        assert!(bs.iter().all(|b| b.vertices.len() == 1 && b.leaf() >= 7));
    }

    #[test]
    fn random_trees_match_sequential_walk_oracle() {
        let mut rng = stream_rng(35, 0);
        for _ in 0..120 {
            use rand::Rng as _;
            let n = rng.gen_range(1..=256);
            let t = random_tree(n, &mut rng);
            let want = sequential_boughs(&t);
            let got_r = boughs_as_vecs(&find_boughs(&t, &mut rng));
            let got_d = boughs_as_vecs(&find_boughs_deterministic(&t));
            assert_eq!(got_r, want, "random-mate, n={n}");
            assert_eq!(got_d, want, "3-coloring, n={n}");
        }
    }

    #[test]
    fn random_mate_round_bound() {
        // contraction settles within 4*log2(n) rounds across a seeded corpus
        let mut rng = stream_rng(36, 0);
        let mut violations = 0;
        for i in 0..1000 {
            use rand::Rng as _;
            let n = rng.gen_range(2..=4096);
            let t = random_tree(n, &mut rng);
            let (_, rounds) = find_boughs_with_rounds(&t, &mut rng);
            let bound = 4 * (usize::BITS - n.leading_zeros()) as usize;
            if rounds > bound {
                violations += 1;
                eprintln!("round bound violation #{i}: n={n} rounds={rounds} bound={bound}");
            }
        }
        assert_eq!(violations, 0);
    }

    #[test]
    fn three_coloring_chains_valid() {
        use rand::Rng as _;
        // single chain of n vertices
        let mut rng = stream_rng(37, 0);
        for n in [1usize, 2, 7, 100, 1000] {
            let pred: Vec<Option<u32>> =
                (0..n).map(|v| if v == 0 { None } else { Some(v as u32 - 1) }).collect();
            let colors = three_coloring(&pred);
            assert!(colors.iter().all(|&c| c < 3));
            for v in 1..n {
                assert_ne!(colors[v], colors[v - 1], "n={n} v={v}");
            }
            let _ = rng.gen::<u32>();
        }
        // two disjoint chains stay independently valid
        let pred = vec![None, Some(0), None, Some(2), Some(3)];
        let colors = three_coloring(&pred);
        assert_ne!(colors[0], colors[1]);
        assert_ne!(colors[2], colors[3]);
        assert_ne!(colors[3], colors[4]);
    }

    #[test]
    fn decompose_path_is_single_path_single_phase() {
        let t = RootedTree::from_parents(0, vec![0, 0, 1, 2]).unwrap();
        let mut rng = stream_rng(38, 0);
        let d = decompose(&t, &mut rng);
        assert_eq!(d.paths, vec![vec![0, 1, 2, 3]]);
        assert_eq!(d.phase_count, 1);
        assert_eq!(d.attach, vec![None]);
    }

    #[test]
    fn decompose_complete_binary_tree_route_lengths() {
        // n = 2^k - 1: every root-to-leaf walk meets exactly k paths
        for k in 2..=6u32 {
            let n = (1usize << k) - 1;
            let parent: Vec<u32> =
                (0..n as u32).map(|v| if v == 0 { 0 } else { (v - 1) / 2 }).collect();
            let t = RootedTree::from_parents(0, parent).unwrap();
            let d = decompose_deterministic(&t);
            for v in (n / 2) as u32..n as u32 {
                assert_eq!(d.route_len(v, &t), k as usize, "k={k} leaf={v}");
            }
        }
    }

    #[test]
    fn decompose_covers_disjointly_and_respects_bounds() {
        use rand::Rng as _;
        let mut rng = stream_rng(39, 0);
        for _ in 0..150 {
            let n = rng.gen_range(1..=1024);
            let t = random_tree(n, &mut rng);
            let d = decompose(&t, &mut rng);
            // disjoint cover
            let mut seen = vec![false; n];
            for path in &d.paths {
                for &v in path {
                    assert!(!seen[v as usize]);
                    seen[v as usize] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
            // fronts closest to root within each path
            for path in &d.paths {
                for w in path.windows(2) {
                    assert_eq!(t.parent[w[1] as usize], w[0]);
                }
            }
            // route bound: phases <= floor(log2 leaves) + 1
            let leaves = (0..n as u32).filter(|&v| t.is_leaf(v)).count();
            let bound = (usize::BITS - leaves.max(1).leading_zeros()) as usize;
            assert!(
                d.phase_count as usize <= bound,
                "n={n} leaves={leaves} phases={} bound={bound}",
                d.phase_count
            );
            for v in 0..n as u32 {
                assert!(d.route_len(v, &t) <= d.phase_count as usize);
            }
        }
    }

    #[test]
    fn decompose_deterministic_equals_randomized_paths() {
        use rand::Rng as _;
        let mut rng = stream_rng(40, 0);
        for _ in 0..60 {
            let n = rng.gen_range(1..=256);
            let t = random_tree(n, &mut rng);
            let a = decompose(&t, &mut rng);
            let b = decompose_deterministic(&t);
            let mut pa = a.paths.clone();
            let mut pb = b.paths.clone();
            pa.sort();
            pb.sort();
            assert_eq!(pa, pb);
        }
    }
}
