use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use super::{kruskal, Cost, Edge, Instance, NodeId, Tree, UNREACHABLE};
use crate::error::{Result, SteinerError};

const NO_PRED: usize = usize::MAX;

/// Dense all-pairs shortest-path matrix with predecessor links.
#[derive(Debug, Clone)]
pub struct MetricClosure {
    n: usize,
    dist: Vec<Cost>,
    // pred[s * n + v] is the vertex before v on the chosen s -> v path.
    pred: Vec<usize>,
    pred_weight: Vec<Cost>,
}

impl MetricClosure {
    /// Runs Dijkstra from every vertex. Fails if two terminals are not joined.
    pub fn new(instance: &Instance) -> Result<Self> {
        let n = instance.vertex_count();
        let mut adj: Vec<Vec<(NodeId, Cost)>> = vec![Vec::new(); n];
        for e in instance.edges() {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        let mut dist = vec![UNREACHABLE; n * n];
        let mut pred = vec![NO_PRED; n * n];
        let mut pred_weight = vec![0; n * n];
        for s in 0..n {
            let row = s * n;
            dist[row + s] = 0;
            let mut heap = BinaryHeap::from([Reverse((0, s))]);
            let mut done = vec![false; n];
            while let Some(Reverse((d, x))) = heap.pop() {
                if done[x] {
                    continue;
                }
                done[x] = true;
                for &(y, w) in &adj[x] {
                    let nd = d + w;
                    let cur = dist[row + y];
                    // Equal-length paths keep the smaller predecessor id.
                    if nd < cur || (nd == cur && !done[y] && x < pred[row + y]) {
                        dist[row + y] = nd;
                        pred[row + y] = x;
                        pred_weight[row + y] = w;
                        heap.push(Reverse((nd, y)));
                    }
                }
            }
        }
        let closure = MetricClosure {
            n,
            dist,
            pred,
            pred_weight,
        };
        let terms = instance.terminals();
        for &t in &terms[1..] {
            if closure.dist(terms[0], t) >= UNREACHABLE {
                return Err(SteinerError::DisconnectedTerminals(terms[0], t));
            }
        }
        Ok(closure)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: NodeId, v: NodeId) -> Cost {
        self.dist[u * self.n + v]
    }

    pub fn is_reachable(&self, u: NodeId, v: NodeId) -> bool {
        self.dist(u, v) < UNREACHABLE
    }

    /// Original-graph edges of the stored shortest `u`–`v` path.
    pub fn path(&self, u: NodeId, v: NodeId) -> Result<Vec<Edge>> {
        if u >= self.n {
            return Err(SteinerError::UnknownNode(u));
        }
        if v >= self.n {
            return Err(SteinerError::UnknownNode(v));
        }
        if !self.is_reachable(u, v) {
            return Err(SteinerError::Disconnected);
        }
        let row = u * self.n;
        let mut out = Vec::new();
        let mut cur = v;
        while cur != u {
            let p = self.pred[row + cur];
            out.push(Edge::new(p, cur, self.pred_weight[row + cur]));
            cur = p;
        }
        Ok(out)
    }

    /// Expands closure edges into original-graph paths and returns a tree
    /// inside their union spanning `keep`, with every leaf outside `keep`
    /// pruned. The result never costs more than the closure edges did.
    pub fn realize(&self, pairs: &[(NodeId, NodeId)], keep: &[NodeId]) -> Result<Tree> {
        let mut union: BTreeMap<(NodeId, NodeId), Cost> = BTreeMap::new();
        for &(a, b) in pairs {
            if a == b {
                continue;
            }
            for e in self.path(a, b)? {
                union
                    .entry(e.endpoints())
                    .and_modify(|w| *w = (*w).min(e.weight))
                    .or_insert(e.weight);
            }
        }
        if union.is_empty() {
            return match keep {
                [] => Err(SteinerError::Internal("nothing to realize".into())),
                [single] => Ok(Tree::singleton(*single)),
                _ => Err(SteinerError::Disconnected),
            };
        }
        let edges: Vec<Edge> = union
            .iter()
            .map(|(&(a, b), &w)| Edge::new(a, b, w))
            .collect();
        let nodes: Vec<NodeId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
        let tree = kruskal(&nodes, &edges)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        for &k in &keep_sorted {
            if !tree.contains(k) {
                return Err(SteinerError::Internal(format!("node {k} not covered")));
            }
        }
        Ok(tree.prune_leaves(|x| keep_sorted.binary_search(&x).is_ok()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphEdge;

    fn star3() -> Instance {
        let e = |u, v| GraphEdge { u, v, weight: 1 };
        Instance::new("star3", 4, vec![e(0, 1), e(0, 2), e(0, 3)], [1, 2, 3]).unwrap()
    }

    #[test]
    fn path_graph_distance() {
        let e = |u, v| GraphEdge { u, v, weight: 1 };
        let inst = Instance::new("p", 3, vec![e(0, 1), e(1, 2)], [0, 2]).unwrap();
        let c = MetricClosure::new(&inst).unwrap();
        assert_eq!(c.dist(0, 2), 2);
        assert_eq!(c.path(0, 2).unwrap().len(), 2);
    }

    #[test]
    fn single_edge_distance() {
        let inst = Instance::new(
            "e",
            2,
            vec![GraphEdge {
                u: 0,
                v: 1,
                weight: 5,
            }],
            [0, 1],
        )
        .unwrap();
        let c = MetricClosure::new(&inst).unwrap();
        assert_eq!(c.dist(0, 1), 5);
        assert_eq!(c.dist(0, 0), 0);
    }

    #[test]
    fn star3_leaf_distances() {
        let c = MetricClosure::new(&star3()).unwrap();
        assert_eq!(c.dist(1, 2), 2);
        assert_eq!(c.dist(2, 3), 2);
        assert_eq!(c.dist(1, 3), 2);
    }

    #[test]
    fn realize_merges_overlapping_paths() {
        let c = MetricClosure::new(&star3()).unwrap();
        let t = c.realize(&[(1, 2), (1, 3)], &[1, 2, 3]).unwrap();
        assert_eq!(t.total_cost(), 3);
        assert_eq!(t.nodes(), &[0, 1, 2, 3]);
    }

    #[test]
    fn unreachable_vertex_is_allowed_outside_terminals() {
        let inst = Instance::new(
            "iso",
            3,
            vec![GraphEdge {
                u: 0,
                v: 1,
                weight: 2,
            }],
            [0, 1],
        )
        .unwrap();
        let c = MetricClosure::new(&inst).unwrap();
        assert!(!c.is_reachable(0, 2));
        assert!(c.path(0, 2).is_err());
    }
}
