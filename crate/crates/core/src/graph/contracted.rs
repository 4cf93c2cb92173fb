use super::{kruskal, Cost, DisjointSet, Edge, NodeId, Tree};
use crate::error::{Result, SteinerError};

/// A terminal-spanning tree together with the zero-cost merges applied to it.
///
/// `mst_with_zero_set` answers `mst(T ∪ E₀(group))` in `O(|group| log |group|)`
/// from precomputed bottleneck weights and the leaf order of the Kruskal
/// reconstruction tree of `T`: the edges a zero clique on `group` displaces
/// are the branch points of `group` in that tree, which are the pairwise
/// bottlenecks of consecutive group members in leaf order.
#[derive(Debug, Clone)]
pub struct ContractedTree {
    base: Tree,
    current: Tree,
    groups: Vec<Vec<NodeId>>,
    // bottleneck[i * m + j]: heaviest weight on the current tree path between
    // the i-th and j-th node.
    bottleneck: Vec<Cost>,
    // leaf_rank[i]: position of the i-th node in reconstruction-tree leaf order.
    leaf_rank: Vec<usize>,
}

impl ContractedTree {
    pub fn new(base: Tree) -> Self {
        let bottleneck = bottleneck_matrix(&base);
        let leaf_rank = leaf_ranks(&base);
        ContractedTree {
            current: base.clone(),
            base,
            groups: Vec::new(),
            bottleneck,
            leaf_rank,
        }
    }

    pub fn base_tree(&self) -> &Tree {
        &self.base
    }

    pub fn tree(&self) -> &Tree {
        &self.current
    }

    pub fn nodes(&self) -> &[NodeId] {
        self.current.nodes()
    }

    /// Node sets merged at cost zero so far (only groups of two or more).
    pub fn zero_groups(&self) -> &[Vec<NodeId>] {
        &self.groups
    }

    pub fn cost(&self) -> Cost {
        self.current.total_cost()
    }

    fn position(&self, node: NodeId) -> Result<usize> {
        self.current
            .nodes()
            .binary_search(&node)
            .map_err(|_| SteinerError::UnknownNode(node))
    }

    /// Heaviest edge weight on the current tree path between `u` and `v`.
    pub fn bottleneck_weight(&self, u: NodeId, v: NodeId) -> Result<Cost> {
        let (i, j) = (self.position(u)?, self.position(v)?);
        Ok(self.bottleneck[i * self.current.nodes().len() + j])
    }

    /// Cost reduction obtained by adding a zero clique on `group`.
    pub fn saving(&self, group: &[NodeId]) -> Result<Cost> {
        let pos = group
            .iter()
            .map(|&g| self.position(g))
            .collect::<Result<Vec<_>>>()?;
        if pos.len() < 2 {
            return Ok(0);
        }
        let m = self.current.nodes().len();
        let mut pos = pos;
        pos.sort_unstable_by_key(|&p| self.leaf_rank[p]);
        pos.dedup();
        Ok(pos
            .windows(2)
            .map(|w| self.bottleneck[w[0] * m + w[1]])
            .sum())
    }

    /// `mst(T ∪ E₀(group))`.
    pub fn mst_with_zero_set(&self, group: &[NodeId]) -> Result<Cost> {
        Ok(self.cost() - self.saving(group)?)
    }

    /// `MST(T ∪ E₀(group))` as a new state; `self` is left untouched.
    pub fn contract_zero_set(&self, group: &[NodeId]) -> Result<ContractedTree> {
        self.contract_tracking(group).map(|(t, _)| t)
    }

    /// Like [`contract_zero_set`](Self::contract_zero_set), also returning the
    /// tree edges displaced by the zero edges.
    pub fn contract_tracking(&self, group: &[NodeId]) -> Result<(ContractedTree, Vec<Edge>)> {
        for &g in group {
            self.position(g)?;
        }
        let mut edges = self.current.edges().to_vec();
        let mut removed = Vec::new();
        let nodes = self.current.nodes().to_vec();
        if let Some((&anchor, rest)) = group.split_first() {
            for &g in rest {
                if g == anchor {
                    continue;
                }
                let tree = Tree::from_edges(nodes.iter().copied(), edges.clone())?;
                let heaviest = tree.bottleneck_edge(anchor, g)?;
                if heaviest.weight == 0 {
                    continue;
                }
                edges.retain(|e| *e != heaviest);
                edges.push(Edge::new(anchor, g, 0));
                removed.push(heaviest);
            }
        }
        let current = Tree::from_edges(nodes.iter().copied(), edges)?;
        let groups = merge_groups(&self.groups, group);
        let bottleneck = bottleneck_matrix(&current);
        let leaf_rank = leaf_ranks(&current);
        Ok((
            ContractedTree {
                base: self.base.clone(),
                current,
                groups,
                bottleneck,
                leaf_rank,
            },
            removed,
        ))
    }

    /// Cost recomputed from scratch: MST of the base tree plus zero cliques
    /// on every merged group.
    pub fn from_scratch_cost(&self) -> Result<Cost> {
        let mut edges = Vec::new();
        for g in &self.groups {
            for &x in &g[1..] {
                edges.push(Edge::new(g[0], x, 0));
            }
        }
        edges.extend_from_slice(self.base.edges());
        Ok(kruskal(self.base.nodes(), &edges)?.total_cost())
    }
}

fn merge_groups(groups: &[Vec<NodeId>], group: &[NodeId]) -> Vec<Vec<NodeId>> {
    let mut nodes: Vec<NodeId> = groups.iter().flatten().chain(group).copied().collect();
    nodes.sort_unstable();
    nodes.dedup();
    let idx = |x: NodeId| nodes.binary_search(&x).expect("collected");
    let mut dsu = DisjointSet::new(nodes.len());
    for g in groups
        .iter()
        .map(Vec::as_slice)
        .chain(std::iter::once(group))
    {
        for w in g.windows(2) {
            dsu.union(idx(w[0]), idx(w[1]));
        }
    }
    let mut out: Vec<Vec<NodeId>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; nodes.len()];
    for (i, &x) in nodes.iter().enumerate() {
        let r = dsu.find(i);
        match root_slot[r] {
            Some(s) => out[s].push(x),
            None => {
                root_slot[r] = Some(out.len());
                out.push(vec![x]);
            }
        }
    }
    out.retain(|g| g.len() > 1);
    out
}

/// Leaf order of the Kruskal reconstruction tree: edges are merged in
/// ascending key order, each merge concatenating the two components' leaf
/// sequences.
fn leaf_ranks(tree: &Tree) -> Vec<usize> {
    let nodes = tree.nodes();
    let mut edges = tree.edges().to_vec();
    edges.sort_by_key(Edge::key);
    let mut dsu = DisjointSet::new(nodes.len());
    let mut sequence: Vec<Vec<usize>> = (0..nodes.len()).map(|i| vec![i]).collect();
    for e in &edges {
        let a = dsu.find(nodes.binary_search(&e.u).expect("tree endpoint"));
        let b = dsu.find(nodes.binary_search(&e.v).expect("tree endpoint"));
        dsu.union(a, b);
        let root = dsu.find(a);
        let (first, second) = (
            std::mem::take(&mut sequence[a]),
            std::mem::take(&mut sequence[b]),
        );
        sequence[root] = first.into_iter().chain(second).collect();
    }
    let mut rank = vec![0; nodes.len()];
    if let Some(order) = sequence.iter().find(|s| s.len() == nodes.len()) {
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
    }
    rank
}

fn bottleneck_matrix(tree: &Tree) -> Vec<Cost> {
    let nodes = tree.nodes();
    let m = nodes.len();
    let mut adj: Vec<Vec<(usize, Cost)>> = vec![Vec::new(); m];
    for e in tree.edges() {
        let a = nodes.binary_search(&e.u).expect("tree endpoint");
        let b = nodes.binary_search(&e.v).expect("tree endpoint");
        adj[a].push((b, e.weight));
        adj[b].push((a, e.weight));
    }
    let mut out = vec![0; m * m];
    let mut stack = Vec::with_capacity(m);
    for s in 0..m {
        let row = s * m;
        let mut seen = vec![false; m];
        seen[s] = true;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for &(y, w) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    out[row + y] = out[row + x].max(w);
                    stack.push(y);
                }
            }
        }
    }
    out
}
