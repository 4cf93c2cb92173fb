use serde::Serialize;

use super::{Cost, DisjointSet, NodeId};
use crate::error::{Result, SteinerError};

/// An undirected input edge. Weights are already scaled to integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: Cost,
}

/// A Steiner tree problem instance: weighted graph plus terminal set.
///
/// Vertex ids are zero-based. `weight_denominator` records the common
/// denominator the decimal input weights were scaled by, so that a cost `c`
/// stands for `c / weight_denominator` in input units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    vertex_count: usize,
    edges: Vec<GraphEdge>,
    terminals: Vec<NodeId>,
    weight_denominator: i64,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        vertex_count: usize,
        edges: Vec<GraphEdge>,
        terminals: impl IntoIterator<Item = NodeId>,
    ) -> Result<Self> {
        Self::with_denominator(name, vertex_count, edges, terminals, 1)
    }

    pub fn with_denominator(
        name: impl Into<String>,
        vertex_count: usize,
        edges: Vec<GraphEdge>,
        terminals: impl IntoIterator<Item = NodeId>,
        weight_denominator: i64,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(SteinerError::InvalidInstance(
                "graph has no vertices".into(),
            ));
        }
        if weight_denominator <= 0 {
            return Err(SteinerError::InvalidInstance(
                "weight denominator must be positive".into(),
            ));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(SteinerError::InvalidInstance(format!(
                    "edge {} has an endpoint outside 1..={}",
                    i + 1,
                    vertex_count
                )));
            }
            if e.u == e.v {
                return Err(SteinerError::InvalidInstance(format!(
                    "edge {} is a self-loop on vertex {}",
                    i + 1,
                    e.u + 1
                )));
            }
            if e.weight < 0 {
                return Err(SteinerError::InvalidInstance(format!(
                    "edge {} has negative weight",
                    i + 1
                )));
            }
        }
        let mut terminals: Vec<NodeId> = terminals.into_iter().collect();
        terminals.sort_unstable();
        terminals.dedup();
        if let Some(&t) = terminals.iter().find(|&&t| t >= vertex_count) {
            return Err(SteinerError::InvalidInstance(format!(
                "terminal {} is not a vertex",
                t + 1
            )));
        }
        if terminals.len() < 2 {
            return Err(SteinerError::InvalidInstance(format!(
                "need at least 2 terminals, got {}",
                terminals.len()
            )));
        }
        let mut dsu = DisjointSet::new(vertex_count);
        for e in &edges {
            dsu.union(e.u, e.v);
        }
        let first = terminals[0];
        if let Some(&t) = terminals.iter().find(|&&t| !dsu.same(first, t)) {
            return Err(SteinerError::DisconnectedTerminals(first, t));
        }
        Ok(Instance {
            name: name.into(),
            vertex_count,
            edges,
            terminals,
            weight_denominator,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    /// Sorted, deduplicated terminal ids.
    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: NodeId) -> bool {
        self.terminals.binary_search(&v).is_ok()
    }

    pub fn weight_denominator(&self) -> i64 {
        self.weight_denominator
    }

    /// Converts an exact scaled cost back into input units.
    pub fn to_units(&self, cost: Cost) -> f64 {
        cost as f64 / self.weight_denominator as f64
    }

    /// Cheapest input edge joining `u` and `v`, if any.
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<Cost> {
        self.edges
            .iter()
            .filter(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
            .map(|e| e.weight)
            .min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: usize, v: usize, w: Cost) -> GraphEdge {
        GraphEdge { u, v, weight: w }
    }

    #[test]
    fn rejects_self_loops_and_bad_ids() {
        assert!(Instance::new("x", 2, vec![e(0, 0, 1)], [0, 1]).is_err());
        assert!(Instance::new("x", 2, vec![e(0, 2, 1)], [0, 1]).is_err());
        assert!(Instance::new("x", 2, vec![e(0, 1, -1)], [0, 1]).is_err());
    }

    #[test]
    fn rejects_single_terminal() {
        let err = Instance::new("x", 2, vec![e(0, 1, 1)], [0]).unwrap_err();
        assert!(matches!(err, SteinerError::InvalidInstance(_)));
    }

    #[test]
    fn rejects_disconnected_terminals() {
        let err = Instance::new("x", 4, vec![e(0, 1, 1), e(2, 3, 1)], [0, 3]).unwrap_err();
        assert_eq!(err, SteinerError::DisconnectedTerminals(0, 3));
    }

    #[test]
    fn terminals_are_sorted_and_deduplicated() {
        let inst = Instance::new("x", 3, vec![e(0, 1, 1), e(1, 2, 1)], [2, 0, 2]).unwrap();
        assert_eq!(inst.terminals(), &[0, 2]);
        assert!(inst.is_terminal(2));
        assert!(!inst.is_terminal(1));
    }
}
