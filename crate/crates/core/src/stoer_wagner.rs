//! Stoer-Wagner global minimum cut (sequential oracle).
//!
//! Maximum-adjacency search with vertex merging on a dense matrix;
//! exact for positive integer weights. Used to verify the randomized
//! pipeline, not on its critical path.

use crate::graph::{Cut, Graph, VertexSet};
use crate::prefix::Weight;

/// Exact global minimum cut value and a witnessing side. A disconnected
/// graph yields value 0 with one connected component as the side.
pub fn stoer_wagner(g: &Graph) -> (Weight, Cut) {
    let n = g.vertex_count();
    assert!(n >= 2);
    let (comp, count) = g.components();
    if count > 1 {
        let side = VertexSet::from_iter(
            n,
            (0..n as u32).filter(|&v| comp[v as usize] == 0),
        );
        return (0, Cut { side, value: 0 });
    }

    // adjacency matrix with parallel edges merged
    let mut w = vec![vec![0 as Weight; n]; n];
    for e in g.edges() {
        w[e.u as usize][e.v as usize] += e.w;
        w[e.v as usize][e.u as usize] += e.w;
    }
    let mut members: Vec<Vec<u32>> = (0..n as u32).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best_value = Weight::MAX;
    let mut best_side: Vec<u32> = Vec::new();

    while active.len() > 1 {
        // maximum adjacency order starting from the first active vertex
        let mut order = Vec::with_capacity(active.len());
        let mut in_a = vec![false; n];
        let mut conn = vec![0 as Weight; n];
        let start = active[0];
        order.push(start);
        in_a[start] = true;
        for &v in &active {
            if v != start {
                conn[v] = w[start][v];
            }
        }
        for _ in 1..active.len() {
            let next = active
                .iter()
                .copied()
                .filter(|&v| !in_a[v])
                .max_by_key(|&v| (conn[v], std::cmp::Reverse(v)))
                .unwrap();
            order.push(next);
            in_a[next] = true;
            for &v in &active {
                if !in_a[v] {
                    conn[v] += w[next][v];
                }
            }
        }
        let t = order[order.len() - 1];
        let s = order[order.len() - 2];
        // cut of the phase: the last-added supernode against the rest
        let phase_value = conn[t];
        if phase_value < best_value {
            best_value = phase_value;
            best_side = members[t].clone();
        }
        // merge t into s
        let t_members = std::mem::take(&mut members[t]);
        members[s].extend(t_members);
        for &v in &active {
            if v != s && v != t {
                w[s][v] += w[t][v];
                w[v][s] = w[s][v];
            }
        }
        active.retain(|&v| v != t);
    }

    let side = VertexSet::from_iter(n, best_side);
    (best_value, Cut { side, value: best_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cut_value, example_graph};
    use crate::oracle::{exhaustive_min_cut, random_connected_graph};
    use rand::Rng as _;

    #[test]
    fn example_graph_min_cut_is_two() {
        let p = example_graph();
        let (value, cut) = stoer_wagner(&p.graph);
        assert_eq!(value, 2);
        assert_eq!(cut_value(&p.graph, &cut.side).unwrap(), 2);
        // the witnessing side is {G, A, C} or its complement
        let want: Vec<u32> = ["G", "A", "C"].iter().map(|t| p.index_of[*t]).collect();
        let got: Vec<u32> = cut.side.iter().collect();
        let comp: Vec<u32> = cut.side.complement().iter().collect();
        let mut want = want;
        want.sort();
        assert!(got == want || comp == want);
    }

    #[test]
    fn single_edge_cut_is_its_weight() {
        let g = Graph::from_edges(2, [(0, 1, 5)]).unwrap();
        assert_eq!(stoer_wagner(&g).0, 5);
    }

    #[test]
    fn disconnected_reports_zero_with_component_side() {
        let g = Graph::from_edges(6, [(0, 1, 1), (1, 2, 1), (3, 4, 1), (4, 5, 1)]).unwrap();
        let (value, cut) = stoer_wagner(&g);
        assert_eq!(value, 0);
        assert_eq!(cut_value(&g, &cut.side).unwrap(), 0);
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let mut rng = crate::rng::stream_rng(51, 0);
        for round in 0..150 {
            let n = rng.gen_range(2..=10);
            let extra = rng.gen_range(0..=8);
            let g = random_connected_graph(n, extra, 9, &mut rng);
            let (value, cut) = stoer_wagner(&g);
            let (want, _) = exhaustive_min_cut(&g);
            assert_eq!(value, want, "round={round} n={n}");
            assert_eq!(cut_value(&g, &cut.side).unwrap(), value);
        }
    }
}
