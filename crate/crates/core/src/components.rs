//! Candidate full components and the quantities the greedy phases rank them by.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Result, SteinerError};
use crate::exact::SubsetSteiner;
use crate::graph::{
    kruskal, ContractedTree, Cost, DisjointSet, Edge, Instance, MetricClosure, NodeId, Tree,
};

/// Hands out node ids that no other component uses.
#[derive(Debug, Clone)]
pub struct IdAllocator {
    next: NodeId,
}

impl IdAllocator {
    pub fn starting_at(next: NodeId) -> Self {
        IdAllocator { next }
    }

    pub fn fresh(&mut self) -> NodeId {
        let id = self.next;
        self.next += 1;
        id
    }

    pub fn peek(&self) -> NodeId {
        self.next
    }
}

/// A private copy of an original vertex used as a Steiner point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SteinerPoint {
    pub id: NodeId,
    pub vertex: NodeId,
}

/// An edge of `C[K]`: a non-Loss edge of `K` re-attached to the terminals
/// representing the Loss parts it joins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContractedEdge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: Cost,
    pub origin: Edge,
}

/// The loss-contracted component `C[K]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LossContraction {
    /// Each Loss part, keyed by the one terminal it contains.
    pub groups: Vec<(NodeId, Vec<NodeId>)>,
    pub edges: Vec<ContractedEdge>,
}

impl LossContraction {
    pub fn cost(&self) -> Cost {
        self.edges.iter().map(|e| e.weight).sum()
    }
}

/// A Steiner subtree in which every terminal is a leaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FullComponent {
    terminals: Vec<NodeId>,
    steiner_points: Vec<SteinerPoint>,
    edges: Vec<Edge>,
    cost: Cost,
    loss_forest: Vec<Edge>,
    loss: Cost,
    contracted: LossContraction,
}

impl FullComponent {
    /// Validates the tree shape and caches Loss and `C[K]`.
    pub fn new(
        terminals: Vec<NodeId>,
        steiner_points: Vec<SteinerPoint>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let mut terminals = terminals;
        terminals.sort_unstable();
        terminals.dedup();
        let mut steiner_points = steiner_points;
        steiner_points.sort_unstable();
        if terminals.len() < 2 {
            return Err(SteinerError::Internal(
                "full component needs at least two terminals".into(),
            ));
        }
        if steiner_points
            .iter()
            .any(|s| terminals.binary_search(&s.id).is_ok())
        {
            return Err(SteinerError::Internal(
                "steiner point id collides with a terminal".into(),
            ));
        }
        let nodes: Vec<NodeId> = terminals
            .iter()
            .copied()
            .chain(steiner_points.iter().map(|s| s.id))
            .collect();
        let tree = Tree::from_edges(nodes, edges)?;
        for &t in &terminals {
            if tree.degree(t) != 1 {
                return Err(SteinerError::Internal(format!(
                    "terminal {t} is not a leaf of its component"
                )));
            }
        }
        let edges = tree.edges().to_vec();
        let cost = tree.total_cost();
        let (loss_forest, loss) = compute_loss(&terminals, &edges);
        let contracted = loss_contract(&terminals, &edges, &loss_forest);
        Ok(FullComponent {
            terminals,
            steiner_points,
            edges,
            cost,
            loss_forest,
            loss,
            contracted,
        })
    }

    /// `Γ(K)`, sorted.
    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    pub fn steiner_points(&self) -> &[SteinerPoint] {
        &self.steiner_points
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    pub fn loss_forest(&self) -> &[Edge] {
        &self.loss_forest
    }

    pub fn loss(&self) -> Cost {
        self.loss
    }

    pub fn contracted(&self) -> &LossContraction {
        &self.contracted
    }

    pub fn is_steiner(&self, node: NodeId) -> bool {
        self.steiner_points.iter().any(|s| s.id == node)
    }

    /// Original vertex a node of this component stands for.
    pub fn vertex_of(&self, node: NodeId) -> NodeId {
        self.steiner_points
            .iter()
            .find(|s| s.id == node)
            .map_or(node, |s| s.vertex)
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = self
            .terminals
            .iter()
            .copied()
            .chain(self.steiner_points.iter().map(|s| s.id))
            .collect();
        nodes.sort_unstable();
        nodes
    }

    /// Same component with every Steiner point renamed to a fresh id.
    /// Renaming is monotone, so the Loss forest is the same up to renaming.
    pub fn with_fresh_ids(&self, ids: &mut IdAllocator) -> FullComponent {
        let map: BTreeMap<NodeId, NodeId> = self
            .steiner_points
            .iter()
            .map(|s| (s.id, ids.fresh()))
            .collect();
        let rename = |x: NodeId| *map.get(&x).unwrap_or(&x);
        let rename_edge = |e: &Edge| Edge::new(rename(e.u), rename(e.v), e.weight);
        let steiner_points = self
            .steiner_points
            .iter()
            .map(|s| SteinerPoint {
                id: map[&s.id],
                vertex: s.vertex,
            })
            .collect();
        let edges = self.edges.iter().map(rename_edge).collect();
        let loss_forest: Vec<Edge> = self.loss_forest.iter().map(rename_edge).collect();
        let contracted = LossContraction {
            groups: self
                .contracted
                .groups
                .iter()
                .map(|(t, members)| (*t, members.iter().map(|&m| rename(m)).collect()))
                .collect(),
            edges: self
                .contracted
                .edges
                .iter()
                .map(|c| ContractedEdge {
                    origin: rename_edge(&c.origin),
                    ..*c
                })
                .collect(),
        };
        FullComponent {
            terminals: self.terminals.clone(),
            steiner_points,
            edges,
            cost: self.cost,
            loss_forest,
            loss: self.loss,
            contracted,
        }
    }

    /// Closure-edge endpoints of this component in original vertex ids.
    pub fn vertex_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.edges
            .iter()
            .map(|e| (self.vertex_of(e.u), self.vertex_of(e.v)))
            .collect()
    }

    /// Splits the component by deleting `cut` edges; returns the parts that
    /// still hold at least two terminals, in order of their smallest terminal.
    pub fn split(&self, cut: &[Edge]) -> Result<Vec<FullComponent>> {
        for e in cut {
            if !self.edges.contains(e) {
                return Err(SteinerError::Internal(format!(
                    "edge {}-{} is not part of the component",
                    e.u, e.v
                )));
            }
        }
        let nodes = self.nodes();
        let idx = |x: NodeId| nodes.binary_search(&x).expect("component node");
        let mut dsu = DisjointSet::new(nodes.len());
        let kept: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| !cut.contains(e))
            .copied()
            .collect();
        for e in &kept {
            dsu.union(idx(e.u), idx(e.v));
        }
        let mut parts: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        for &n in &nodes {
            parts.entry(dsu.find(idx(n))).or_default().push(n);
        }
        let mut out = Vec::new();
        for members in parts.into_values() {
            let terminals: Vec<NodeId> = members
                .iter()
                .copied()
                .filter(|m| self.terminals.binary_search(m).is_ok())
                .collect();
            if terminals.len() < 2 {
                continue;
            }
            let steiner: Vec<SteinerPoint> = self
                .steiner_points
                .iter()
                .filter(|s| members.binary_search(&s.id).is_ok())
                .copied()
                .collect();
            let edges: Vec<Edge> = kept
                .iter()
                .filter(|e| members.binary_search(&e.u).is_ok())
                .copied()
                .collect();
            out.push(FullComponent::new(terminals, steiner, edges)?);
        }
        out.sort_by(|a, b| a.terminals.cmp(&b.terminals));
        Ok(out)
    }

    /// Removes Steiner leaves and short-cuts degree-two Steiner points with
    /// closure edges. Never increases cost in a metric.
    pub fn normalized(&self, closure: &MetricClosure) -> Result<FullComponent> {
        let terminals = self.terminals.clone();
        let is_terminal = |x: NodeId| terminals.binary_search(&x).is_ok();
        let dist = |a: NodeId, b: NodeId| closure.dist(self.vertex_of(a), self.vertex_of(b));
        let edges = normalize_tree(self.edges.clone(), is_terminal, dist);
        let present: BTreeSet<NodeId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
        let steiner = self
            .steiner_points
            .iter()
            .filter(|s| present.contains(&s.id))
            .copied()
            .collect();
        FullComponent::new(terminals, steiner, edges)
    }
}

/// Prunes non-terminal leaves, then replaces each non-terminal node of
/// degree two by a direct edge between its neighbours.
pub(crate) fn normalize_tree(
    mut edges: Vec<Edge>,
    is_terminal: impl Fn(NodeId) -> bool,
    dist: impl Fn(NodeId, NodeId) -> Cost,
) -> Vec<Edge> {
    loop {
        let mut degree: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            degree.entry(e.u).or_default().push(i);
            degree.entry(e.v).or_default().push(i);
        }
        let target = degree
            .iter()
            .find(|(&n, inc)| !is_terminal(n) && inc.len() <= 2 && edges.len() > 1);
        let Some((&node, incident)) = target else {
            return edges;
        };
        if incident.len() == 1 {
            edges.remove(incident[0]);
        } else {
            let (a, b) = (
                edges[incident[0]].other(node),
                edges[incident[1]].other(node),
            );
            let replacement = Edge::new(a, b, dist(a, b));
            edges.retain(|e| !e.touches(node));
            edges.push(replacement);
        }
    }
}

/// `Loss(K) = MST(K ∪ E₀(K)) − E₀(K)`: the cheapest forest joining every
/// Steiner point of `K` to some terminal.
///
/// The zero clique is taken before any component edge, even ones of weight
/// zero, so every part of the forest holds exactly one terminal.
pub fn compute_loss(terminals: &[NodeId], edges: &[Edge]) -> (Vec<Edge>, Cost) {
    let mut nodes: Vec<NodeId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
    nodes.extend_from_slice(terminals);
    nodes.sort_unstable();
    nodes.dedup();
    let idx = |x: NodeId| nodes.binary_search(&x).expect("component node");
    let mut dsu = DisjointSet::new(nodes.len());
    for w in terminals.windows(2) {
        dsu.union(idx(w[0]), idx(w[1]));
    }
    let mut sorted = edges.to_vec();
    sorted.sort_by_key(Edge::key);
    let forest: Vec<Edge> = sorted
        .into_iter()
        .filter(|e| dsu.union(idx(e.u), idx(e.v)))
        .collect();
    let loss = forest.iter().map(|e| e.weight).sum();
    (forest, loss)
}

/// Collapses each Loss part onto its terminal, producing `C[K]`.
pub fn loss_contract(
    terminals: &[NodeId],
    edges: &[Edge],
    loss_forest: &[Edge],
) -> LossContraction {
    let mut nodes: Vec<NodeId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
    nodes.extend_from_slice(terminals);
    nodes.sort_unstable();
    nodes.dedup();
    let idx = |x: NodeId| nodes.binary_search(&x).expect("component node");
    let mut dsu = DisjointSet::new(nodes.len());
    for e in loss_forest {
        dsu.union(idx(e.u), idx(e.v));
    }
    let mut rep: HashMap<usize, NodeId> = HashMap::new();
    for &t in terminals {
        rep.insert(dsu.find(idx(t)), t);
    }
    let mut groups: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &n in &nodes {
        let r = dsu.find(idx(n));
        groups.entry(rep[&r]).or_default().push(n);
    }
    let contracted_edges = edges
        .iter()
        .filter(|e| !loss_forest.contains(e))
        .map(|e| {
            let a = rep[&dsu.find(idx(e.u))];
            let b = rep[&dsu.find(idx(e.v))];
            ContractedEdge {
                u: a.min(b),
                v: a.max(b),
                weight: e.weight,
                origin: *e,
            }
        })
        .collect();
    LossContraction {
        groups: groups.into_iter().collect(),
        edges: contracted_edges,
    }
}

/// `gain_T(K) = cost(T) − mst(T ∪ E₀(K)) − cost(K)`.
pub fn gain(tree: &ContractedTree, component: &FullComponent) -> Result<Cost> {
    Ok(tree.saving(component.terminals())? - component.cost())
}

/// `load_T(K) = cost(K) + mst(T ∪ E₀(K)) − cost(T)`.
pub fn load(tree: &ContractedTree, component: &FullComponent) -> Result<Cost> {
    Ok(component.cost() + tree.mst_with_zero_set(component.terminals())? - tree.cost())
}

/// `Ψ_{T₁,T₂}(K) = cost(T₁) − cost(T₂) − mst(T₁ ∪ E₀(K)) + mst(T₂ ∪ E₀(K))`.
pub fn psi(
    t_origin: &ContractedTree,
    t_base: &ContractedTree,
    component: &FullComponent,
) -> Result<Cost> {
    let g = component.terminals();
    Ok(
        t_origin.cost() - t_base.cost() - t_origin.mst_with_zero_set(g)?
            + t_base.mst_with_zero_set(g)?,
    )
}

/// A Steiner point joined directly to two terminals, one edge in Loss and
/// one outside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BasicComponent {
    pub steiner_point: SteinerPoint,
    pub terminal_a: NodeId,
    pub terminal_b: NodeId,
    pub edge_loss: Edge,
    pub edge_keep: Edge,
}

impl BasicComponent {
    /// Smallest qualifying `(steiner point, loss terminal, kept terminal)`.
    pub fn find(component: &FullComponent) -> Option<BasicComponent> {
        let mut best: Option<(NodeId, NodeId, NodeId, BasicComponent)> = None;
        for s in component.steiner_points() {
            let incident: Vec<&Edge> = component
                .edges()
                .iter()
                .filter(|e| e.touches(s.id))
                .filter(|e| component.terminals().binary_search(&e.other(s.id)).is_ok())
                .collect();
            for a in &incident {
                if !component.loss_forest().contains(a) {
                    continue;
                }
                for b in &incident {
                    if component.loss_forest().contains(b) {
                        continue;
                    }
                    let key = (s.id, a.other(s.id), b.other(s.id));
                    if best.as_ref().is_none_or(|(x, y, z, _)| key < (*x, *y, *z)) {
                        best = Some((
                            key.0,
                            key.1,
                            key.2,
                            BasicComponent {
                                steiner_point: *s,
                                terminal_a: key.1,
                                terminal_b: key.2,
                                edge_loss: **a,
                                edge_keep: **b,
                            },
                        ));
                    }
                }
            }
        }
        best.map(|(_, _, _, b)| b)
    }

    pub fn to_component(&self) -> Result<FullComponent> {
        FullComponent::new(
            vec![self.terminal_a, self.terminal_b],
            vec![self.steiner_point],
            vec![self.edge_loss, self.edge_keep],
        )
    }
}

/// The k-restricted candidate list, in lexicographic order of terminal sets.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    components: Vec<FullComponent>,
    by_terminals: HashMap<Vec<NodeId>, usize>,
    k: usize,
    id_floor: NodeId,
}

impl CandidatePool {
    pub fn from_components(mut components: Vec<FullComponent>, k: usize) -> Self {
        components.sort_by(|a, b| a.terminals.cmp(&b.terminals).then(a.cost.cmp(&b.cost)));
        components.dedup_by(|later, earlier| later.terminals == earlier.terminals);
        let by_terminals = components
            .iter()
            .enumerate()
            .map(|(i, c)| (c.terminals.clone(), i))
            .collect();
        let id_floor = components
            .iter()
            .flat_map(|c| c.steiner_points.iter().map(|s| s.id + 1))
            .chain(
                components
                    .iter()
                    .flat_map(|c| c.terminals.iter().map(|t| t + 1)),
            )
            .max()
            .unwrap_or(0);
        CandidatePool {
            components,
            by_terminals,
            k,
            id_floor,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn as_slice(&self) -> &[FullComponent] {
        &self.components
    }

    pub fn get(&self, i: usize) -> &FullComponent {
        &self.components[i]
    }

    pub fn find(&self, terminals: &[NodeId]) -> Option<&FullComponent> {
        self.by_terminals
            .get(terminals)
            .map(|&i| &self.components[i])
    }

    /// An allocator whose ids collide with nothing in the pool.
    pub fn id_allocator(&self, vertex_count: usize) -> IdAllocator {
        IdAllocator::starting_at(self.id_floor.max(vertex_count))
    }
}

/// `MST(T ∪ K₁ ∪ … ∪ K_t)` with every Steiner point kept private to its
/// component and Steiner leaves pruned; returns its cost together with the
/// same tree expanded into the input graph.
pub fn merge_components(
    closure: &MetricClosure,
    tree: &Tree,
    components: &[FullComponent],
    terminals: &[NodeId],
) -> Result<(Cost, Tree)> {
    let mut vertex: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut edges = tree.edges().to_vec();
    for c in components {
        for s in c.steiner_points() {
            vertex.insert(s.id, s.vertex);
        }
        edges.extend_from_slice(c.edges());
    }
    let nodes: Vec<NodeId> = terminals
        .iter()
        .copied()
        .chain(vertex.keys().copied())
        .collect();
    let merged = kruskal(&nodes, &edges)?.prune_leaves(|x| terminals.binary_search(&x).is_ok());
    let to_vertex = |x: NodeId| *vertex.get(&x).unwrap_or(&x);
    let pairs: Vec<(NodeId, NodeId)> = merged
        .edges()
        .iter()
        .map(|e| (to_vertex(e.u), to_vertex(e.v)))
        .collect();
    let realized = closure.realize(&pairs, terminals)?;
    Ok((merged.total_cost(), realized))
}

/// Enumerates every k-restricted full component: one optimal Steiner tree
/// per terminal subset of size `2..=k`, kept only when all its terminals
/// are leaves.
pub fn enumerate_full_components(
    instance: &Instance,
    closure: &MetricClosure,
    k: usize,
) -> Result<CandidatePool> {
    if k < 2 {
        return Err(SteinerError::InvalidK(k));
    }
    let terminals = instance.terminals();
    let k_eff = k.min(terminals.len());
    let mut dp = SubsetSteiner::new(closure, instance, terminals.to_vec());
    dp.build(k_eff - 1);
    let mut ids = IdAllocator::starting_at(instance.vertex_count());
    let mut components = Vec::new();
    for size in 2..=k_eff {
        for subset in itertools::Itertools::combinations(0..terminals.len(), size) {
            let vertex_edges = dp.optimal_tree_edges(&subset);
            let members: Vec<NodeId> = subset.iter().map(|&i| terminals[i]).collect();
            if let Some(c) = full_component_from_tree(closure, &members, vertex_edges, &mut ids)? {
                components.push(c);
            }
        }
    }
    log::debug!(
        "enumerated {} candidates (k = {}, {} terminals)",
        components.len(),
        k_eff,
        terminals.len()
    );
    Ok(CandidatePool::from_components(components, k_eff))
}

/// Turns an optimal tree over original vertices into a full component, or
/// `None` if one of its terminals is internal.
fn full_component_from_tree(
    closure: &MetricClosure,
    members: &[NodeId],
    vertex_edges: Vec<Edge>,
    ids: &mut IdAllocator,
) -> Result<Option<FullComponent>> {
    if let [a, b] = members {
        return FullComponent::new(
            vec![*a, *b],
            Vec::new(),
            vec![Edge::new(*a, *b, closure.dist(*a, *b))],
        )
        .map(Some);
    }
    let nodes: Vec<NodeId> = vertex_edges.iter().flat_map(|e| [e.u, e.v]).collect();
    let tree = kruskal(&nodes, &vertex_edges)?;
    let is_member = |x: NodeId| members.binary_search(&x).is_ok();
    let edges = normalize_tree(tree.edges().to_vec(), is_member, |a, b| closure.dist(a, b));
    let mut degree: BTreeMap<NodeId, usize> = BTreeMap::new();
    for e in &edges {
        *degree.entry(e.u).or_default() += 1;
        *degree.entry(e.v).or_default() += 1;
    }
    if members.iter().any(|m| degree.get(m) != Some(&1)) {
        return Ok(None);
    }
    let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut steiner = Vec::new();
    for &n in degree.keys() {
        if !is_member(n) {
            let id = ids.fresh();
            map.insert(n, id);
            steiner.push(SteinerPoint { id, vertex: n });
        }
    }
    let rename = |x: NodeId| *map.get(&x).unwrap_or(&x);
    let edges = edges
        .iter()
        .map(|e| Edge::new(rename(e.u), rename(e.v), e.weight))
        .collect();
    FullComponent::new(members.to_vec(), steiner, edges).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{minimum_spanning_tree, GraphEdge};

    fn star3() -> Instance {
        let e = |u, v| GraphEdge { u, v, weight: 1 };
        Instance::new("star3", 4, vec![e(0, 1), e(0, 2), e(0, 3)], [1, 2, 3]).unwrap()
    }

    fn star_component() -> FullComponent {
        let s = SteinerPoint { id: 10, vertex: 0 };
        FullComponent::new(
            vec![1, 2, 3],
            vec![s],
            vec![
                Edge::new(10, 1, 1),
                Edge::new(10, 2, 1),
                Edge::new(10, 3, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn star_loss_is_one_edge_to_smallest_terminal() {
        let k = star_component();
        assert_eq!(k.loss_forest(), &[Edge::new(1, 10, 1)]);
        assert_eq!(k.loss(), 1);
        let c = k.contracted();
        assert_eq!(c.groups, vec![(1, vec![1, 10]), (2, vec![2]), (3, vec![3])]);
        assert_eq!(c.cost(), 2);
        assert_eq!(c.edges.len(), 2);
        assert!(c.edges.iter().all(|e| e.u == 1 && e.weight == 1));
    }

    #[test]
    fn pair_component_has_no_loss() {
        let k = FullComponent::new(vec![1, 2], vec![], vec![Edge::new(1, 2, 7)]).unwrap();
        assert_eq!(k.loss(), 0);
        assert!(k.loss_forest().is_empty());
        assert_eq!(k.contracted().cost(), 7);
        assert_eq!(k.contracted().edges[0].origin, Edge::new(1, 2, 7));
    }

    #[test]
    fn internal_terminal_is_rejected() {
        let r = FullComponent::new(
            vec![1, 2, 3],
            vec![],
            vec![Edge::new(1, 2, 1), Edge::new(2, 3, 1)],
        );
        assert!(r.is_err());
    }

    #[test]
    fn star3_gain_load_psi() {
        let inst = star3();
        let closure = MetricClosure::new(&inst).unwrap();
        let t0 = ContractedTree::new(
            minimum_spanning_tree(inst.terminals(), |a, b| Some(closure.dist(a, b))).unwrap(),
        );
        let k = star_component();
        assert_eq!(gain(&t0, &k).unwrap(), 1);
        assert_eq!(load(&t0, &k).unwrap(), -1);
        let base = ContractedTree::new(
            Tree::from_edge_list(vec![Edge::new(1, 2, 1), Edge::new(1, 3, 1)]).unwrap(),
        );
        assert_eq!(gain(&base, &k).unwrap(), -1);
        assert_eq!(load(&base, &k).unwrap(), 1);
        assert_eq!(psi(&t0, &base, &k).unwrap(), 2);
        assert_eq!(psi(&t0, &t0, &k).unwrap(), 0);
        // an edge of T itself has zero gain
        let edge = FullComponent::new(vec![1, 2], vec![], vec![Edge::new(1, 2, 2)]).unwrap();
        assert_eq!(gain(&t0, &edge).unwrap(), 0);
        assert_eq!(load(&t0, &edge).unwrap(), 0);
    }

    #[test]
    fn psi_vanishes_on_identically_merged_terminals() {
        let base = ContractedTree::new(
            Tree::from_edge_list(vec![Edge::new(1, 2, 3), Edge::new(2, 3, 4)]).unwrap(),
        );
        let merged = base.contract_zero_set(&[1, 2]).unwrap();
        let pair = FullComponent::new(vec![1, 2], vec![], vec![Edge::new(1, 2, 3)]).unwrap();
        assert_eq!(psi(&merged, &merged, &pair).unwrap(), 0);
    }

    #[test]
    fn figure_one_basic_component() {
        // Steiner point c joins a (loss edge) and b (kept edge); d hangs off a
        // second Steiner point e.
        let (a, b, d, f) = (1, 2, 3, 4);
        let c = SteinerPoint { id: 20, vertex: 9 };
        let e = SteinerPoint { id: 21, vertex: 8 };
        let k = FullComponent::new(
            vec![a, b, d, f],
            vec![c, e],
            vec![
                Edge::new(a, c.id, 1),
                Edge::new(b, c.id, 3),
                Edge::new(c.id, e.id, 2),
                Edge::new(d, e.id, 1),
                Edge::new(f, e.id, 4),
            ],
        )
        .unwrap();
        assert!(k.loss_forest().contains(&Edge::new(a, c.id, 1)));
        assert!(!k.loss_forest().contains(&Edge::new(b, c.id, 3)));
        let basic = BasicComponent::find(&k).unwrap();
        assert_eq!(basic.steiner_point, c);
        assert_eq!((basic.terminal_a, basic.terminal_b), (a, b));
        let comp = basic.to_component().unwrap();
        assert_eq!(comp.terminals(), &[a, b]);
        assert_eq!(comp.loss_forest(), &[basic.edge_loss]);
    }

    #[test]
    fn pair_has_no_basic_component() {
        let k = FullComponent::new(vec![1, 2], vec![], vec![Edge::new(1, 2, 7)]).unwrap();
        assert!(BasicComponent::find(&k).is_none());
    }

    #[test]
    fn split_preserves_loss() {
        let (s1, s2) = (
            SteinerPoint { id: 30, vertex: 5 },
            SteinerPoint { id: 31, vertex: 6 },
        );
        let k = FullComponent::new(
            vec![1, 2, 3, 4],
            vec![s1, s2],
            vec![
                Edge::new(1, 30, 1),
                Edge::new(2, 30, 2),
                Edge::new(3, 31, 1),
                Edge::new(4, 31, 2),
                Edge::new(30, 31, 5),
            ],
        )
        .unwrap();
        assert_eq!(k.loss(), 2);
        let parts = k.split(&[Edge::new(30, 31, 5)]).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].terminals(), &[1, 2]);
        assert_eq!(parts[1].terminals(), &[3, 4]);
        assert_eq!(
            parts.iter().map(FullComponent::loss).sum::<Cost>(),
            k.loss()
        );
        assert!(k.split(&[]).unwrap()[0] == k);
        let single = k
            .split(&[Edge::new(30, 31, 5), Edge::new(2, 30, 2)])
            .unwrap();
        assert_eq!(single.len(), 1, "part {{1}} is dropped");
    }

    #[test]
    fn fresh_ids_keep_structure() {
        let k = star_component();
        let mut ids = IdAllocator::starting_at(100);
        let copy = k.with_fresh_ids(&mut ids);
        assert_eq!(copy.steiner_points()[0].id, 100);
        assert_eq!(copy.cost(), k.cost());
        assert_eq!(copy.loss(), k.loss());
        let rebuilt = FullComponent::new(
            copy.terminals().to_vec(),
            copy.steiner_points().to_vec(),
            copy.edges().to_vec(),
        )
        .unwrap();
        assert_eq!(rebuilt, copy);
    }

    #[test]
    fn star3_candidates() {
        let inst = star3();
        let closure = MetricClosure::new(&inst).unwrap();
        let pool = enumerate_full_components(&inst, &closure, 3).unwrap();
        let sets: Vec<(Vec<NodeId>, Cost)> = pool
            .as_slice()
            .iter()
            .map(|c| (c.terminals().to_vec(), c.cost()))
            .collect();
        assert_eq!(
            sets,
            vec![
                (vec![1, 2], 2),
                (vec![1, 2, 3], 3),
                (vec![1, 3], 2),
                (vec![2, 3], 2)
            ]
        );
        assert_eq!(pool.find(&[1, 2, 3]).unwrap().steiner_points()[0].vertex, 0);
    }

    #[test]
    fn k_two_gives_terminal_pairs() {
        let inst = star3();
        let closure = MetricClosure::new(&inst).unwrap();
        let pool = enumerate_full_components(&inst, &closure, 2).unwrap();
        assert_eq!(pool.len(), 3);
        assert!(pool
            .as_slice()
            .iter()
            .all(|c| c.steiner_points().is_empty()));
        assert_eq!(
            enumerate_full_components(&inst, &closure, 1).unwrap_err(),
            SteinerError::InvalidK(1)
        );
    }

    #[test]
    fn path_terminals_leave_only_pairs() {
        let e = |u, v| GraphEdge { u, v, weight: 1 };
        let inst =
            Instance::new("path4", 4, vec![e(0, 1), e(1, 2), e(2, 3)], [0, 1, 2, 3]).unwrap();
        let closure = MetricClosure::new(&inst).unwrap();
        let pool = enumerate_full_components(&inst, &closure, 4).unwrap();
        assert_eq!(pool.len(), 6);
        assert!(pool.as_slice().iter().all(|c| c.terminals().len() == 2));
    }
}
