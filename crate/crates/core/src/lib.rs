//! parcut: randomized parallel minimum cut.
//!
//! The pipeline packs spanning trees against a sampled skeleton so that,
//! with high probability, some packed tree crosses a minimum cut at most
//! twice; for each candidate tree an exact search finds the smallest cut
//! crossing at most two of its edges, driven by a batch-parallel
//! minimum-path structure over the tree's bough decomposition. A
//! Stoer-Wagner oracle is included for verification.

pub mod decomp;
pub mod driver;
pub mod error;
pub mod graph;
pub mod minpath;
pub mod packing;
pub mod prefix;
pub mod rng;
pub mod scan;
pub mod stoer_wagner;
pub mod tree;
pub mod twocut;

#[cfg(any(test, feature = "testutil"))]
pub mod oracle;

pub use error::{Error, Result};
pub use graph::{cut_value, parse_graph, Cut, Graph, ParsedGraph, VertexSet};
pub use prefix::{Weight, INF};
pub use tree::RootedTree;

/// Most decomposition paths any vertex-to-root walk can meet:
/// `ceil(log2 n)`, and 1 for the singleton tree.
pub(crate) fn prefix_route_bound(n: usize) -> usize {
    (n.next_power_of_two().trailing_zeros() as usize).max(1)
}
