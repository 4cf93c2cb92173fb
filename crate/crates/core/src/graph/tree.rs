use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use super::{Cost, DisjointSet, NodeId};
use crate::error::{Result, SteinerError};

/// Undirected weighted edge with endpoints normalized so that `u <= v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: Cost,
}

impl Edge {
    pub fn new(a: NodeId, b: NodeId, weight: Cost) -> Self {
        Edge {
            u: a.min(b),
            v: a.max(b),
            weight,
        }
    }

    /// Global tie-break order: weight, then smaller endpoint, then larger.
    pub fn key(&self) -> (Cost, NodeId, NodeId) {
        (self.weight, self.u, self.v)
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }

    pub fn touches(&self, x: NodeId) -> bool {
        self.u == x || self.v == x
    }

    pub fn other(&self, x: NodeId) -> NodeId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// A tree over an explicit node set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tree {
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    total_cost: Cost,
}

impl Tree {
    /// Builds a tree, checking that `edges` connect `nodes` without cycles.
    pub fn from_edges(nodes: impl IntoIterator<Item = NodeId>, edges: Vec<Edge>) -> Result<Tree> {
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.is_empty() {
            return Err(SteinerError::Internal("tree without nodes".into()));
        }
        if edges.len() + 1 != nodes.len() {
            return Err(SteinerError::Internal(format!(
                "{} edges cannot form a tree on {} nodes",
                edges.len(),
                nodes.len()
            )));
        }
        let mut dsu = DisjointSet::new(nodes.len());
        for e in &edges {
            let a = nodes
                .binary_search(&e.u)
                .map_err(|_| SteinerError::UnknownNode(e.u))?;
            let b = nodes
                .binary_search(&e.v)
                .map_err(|_| SteinerError::UnknownNode(e.v))?;
            if !dsu.union(a, b) {
                return Err(SteinerError::Internal(format!(
                    "edge {}-{} closes a cycle",
                    e.u, e.v
                )));
            }
        }
        let total_cost = edges.iter().map(|e| e.weight).sum();
        Ok(Tree {
            nodes,
            edges,
            total_cost,
        })
    }

    /// Tree spanning all endpoints of `edges`.
    pub fn from_edge_list(edges: Vec<Edge>) -> Result<Tree> {
        let nodes: Vec<NodeId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
        Tree::from_edges(nodes, edges)
    }

    pub fn singleton(node: NodeId) -> Tree {
        Tree {
            nodes: vec![node],
            edges: Vec::new(),
            total_cost: 0,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_cost(&self) -> Cost {
        self.total_cost
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.edges.iter().filter(|e| e.touches(node)).count()
    }

    pub fn adjacency(&self) -> BTreeMap<NodeId, Vec<(NodeId, usize)>> {
        let mut adj: BTreeMap<NodeId, Vec<(NodeId, usize)>> =
            self.nodes.iter().map(|&n| (n, Vec::new())).collect();
        for (i, e) in self.edges.iter().enumerate() {
            adj.get_mut(&e.u).expect("endpoint").push((e.v, i));
            adj.get_mut(&e.v).expect("endpoint").push((e.u, i));
        }
        adj
    }

    /// Indices of the edges on the unique `u`–`v` path.
    pub fn path_edges(&self, u: NodeId, v: NodeId) -> Result<Vec<usize>> {
        for x in [u, v] {
            if !self.contains(x) {
                return Err(SteinerError::UnknownNode(x));
            }
        }
        let adj = self.adjacency();
        let mut via: BTreeMap<NodeId, usize> = BTreeMap::new();
        let mut queue = VecDeque::from([u]);
        let mut seen = vec![u];
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &(y, ei) in &adj[&x] {
                if !seen.contains(&y) {
                    seen.push(y);
                    via.insert(y, ei);
                    queue.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = v;
        while cur != u {
            let ei = via[&cur];
            path.push(ei);
            cur = self.edges[ei].other(cur);
        }
        Ok(path)
    }

    /// Maximum edge on the `u`–`v` path, ties resolved by the global edge order.
    pub fn bottleneck_edge(&self, u: NodeId, v: NodeId) -> Result<Edge> {
        if u == v {
            return Err(SteinerError::Degenerate(format!(
                "bottleneck query on identical endpoints {u}"
            )));
        }
        self.path_edges(u, v)?
            .into_iter()
            .map(|i| self.edges[i])
            .max_by_key(Edge::key)
            .ok_or_else(|| SteinerError::Internal("empty path".into()))
    }

    /// Repeatedly removes leaves for which `keep` is false.
    pub fn prune_leaves(&self, keep: impl Fn(NodeId) -> bool) -> Tree {
        let mut edges = self.edges.clone();
        let mut nodes = self.nodes.clone();
        loop {
            let mut degree: BTreeMap<NodeId, usize> = nodes.iter().map(|&n| (n, 0)).collect();
            for e in &edges {
                *degree.get_mut(&e.u).expect("endpoint") += 1;
                *degree.get_mut(&e.v).expect("endpoint") += 1;
            }
            let doomed: Vec<NodeId> = degree
                .iter()
                .filter(|&(&n, &d)| d <= 1 && !keep(n) && nodes.len() > 1)
                .map(|(&n, _)| n)
                .collect();
            if doomed.is_empty() {
                break;
            }
            // Remove one at a time so two adjacent doomed leaves never empty the tree.
            let n = doomed[0];
            nodes.retain(|&x| x != n);
            edges.retain(|e| !e.touches(n));
        }
        let total_cost = edges.iter().map(|e| e.weight).sum();
        Tree {
            nodes,
            edges,
            total_cost,
        }
    }
}

/// Runs Kruskal over `edges` and returns the indices of the chosen edges.
///
/// Edges are considered in global order; among edges with identical keys,
/// the one listed first wins.
pub fn kruskal_indices(nodes: &[NodeId], edges: &[Edge]) -> Result<Vec<usize>> {
    let mut sorted_nodes = nodes.to_vec();
    sorted_nodes.sort_unstable();
    sorted_nodes.dedup();
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by_key(|&i| edges[i].key());
    let mut dsu = DisjointSet::new(sorted_nodes.len());
    let mut chosen = Vec::with_capacity(sorted_nodes.len().saturating_sub(1));
    for i in order {
        let e = &edges[i];
        let a = sorted_nodes
            .binary_search(&e.u)
            .map_err(|_| SteinerError::UnknownNode(e.u))?;
        let b = sorted_nodes
            .binary_search(&e.v)
            .map_err(|_| SteinerError::UnknownNode(e.v))?;
        if dsu.union(a, b) {
            chosen.push(i);
            if chosen.len() + 1 == sorted_nodes.len() {
                break;
            }
        }
    }
    if chosen.len() + 1 != sorted_nodes.len() {
        return Err(SteinerError::Disconnected);
    }
    Ok(chosen)
}

/// Minimum spanning tree of the graph `(nodes, edges)`.
pub fn kruskal(nodes: &[NodeId], edges: &[Edge]) -> Result<Tree> {
    let chosen = kruskal_indices(nodes, edges)?;
    Tree::from_edges(
        nodes.iter().copied(),
        chosen.into_iter().map(|i| edges[i]).collect(),
    )
}

/// Minimum spanning tree of the complete graph on `nodes` whose edge weights
/// come from `weight` (`None` meaning the pair is not adjacent).
pub fn minimum_spanning_tree<F>(nodes: &[NodeId], weight: F) -> Result<Tree>
where
    F: Fn(NodeId, NodeId) -> Option<Cost>,
{
    let mut edges = Vec::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if let Some(w) = weight(a, b) {
                edges.push(Edge::new(a, b, w));
            }
        }
    }
    kruskal(nodes, &edges)
}
