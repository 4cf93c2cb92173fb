//! Weighted-graph primitives: instances, metric closure, spanning trees and
//! the zero-contracted terminal trees the greedy phases operate on.

mod closure;
mod contracted;
mod dsu;
mod instance;
mod tree;

pub use closure::MetricClosure;
pub use contracted::ContractedTree;
pub use dsu::DisjointSet;
pub use instance::{GraphEdge, Instance};
pub use tree::{kruskal, kruskal_indices, minimum_spanning_tree, Edge, Tree};

/// Identifier of a node. Ids below the instance vertex count are original
/// vertices; larger ids are private Steiner-point copies.
pub type NodeId = usize;

/// Exact edge/tree cost: input weights scaled to a common integer denominator.
pub type Cost = i64;

/// Sentinel distance for unreachable vertex pairs.
pub const UNREACHABLE: Cost = Cost::MAX / 4;
