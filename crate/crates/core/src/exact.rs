//! Exact reference solvers: Dreyfus–Wagner over the metric closure, and an
//! exhaustive optimal k-restricted Steiner tree for tiny terminal sets.

use std::collections::HashMap;

use itertools::Itertools;
use serde::Serialize;

use crate::components::CandidatePool;
use crate::error::{Result, SteinerError};
use crate::graph::{Cost, Edge, Instance, MetricClosure, NodeId, Tree};

pub const DEFAULT_OPT_LIMIT: usize = 10;
pub const DEFAULT_OPT_K_LIMIT: usize = 8;

/// Optimal cost together with a tree realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactResult {
    pub tree: Tree,
    pub cost: Cost,
    pub restricted_k: Option<usize>,
}

struct Table {
    cost: Vec<Cost>,
    back_vertex: Vec<NodeId>,
    back_split: Vec<u32>,
}

/// Dreyfus–Wagner table over subsets of a terminal list.
///
/// `value(D, v)` is the cheapest tree spanning `D ∪ {v}` whose branch points
/// are drawn from the Steiner pool or from `D` itself. Subsets are keyed by
/// sorted index lists into `terminals`.
pub(crate) struct SubsetSteiner<'a> {
    closure: &'a MetricClosure,
    terminals: Vec<NodeId>,
    steiner: Vec<NodeId>,
    verts: Vec<NodeId>,
    pos: Vec<usize>,
    tables: HashMap<Vec<u32>, Table>,
}

impl<'a> SubsetSteiner<'a> {
    /// Steiner points are the reachable vertices that are not terminals of
    /// `instance`.
    pub(crate) fn new(
        closure: &'a MetricClosure,
        instance: &Instance,
        terminals: Vec<NodeId>,
    ) -> Self {
        Self::with_pool(closure, terminals, |v| !instance.is_terminal(v))
    }

    fn with_pool(
        closure: &'a MetricClosure,
        terminals: Vec<NodeId>,
        steiner_ok: impl Fn(NodeId) -> bool,
    ) -> Self {
        let n = closure.vertex_count();
        let verts: Vec<NodeId> = (0..n)
            .filter(|&v| closure.is_reachable(terminals[0], v))
            .collect();
        let steiner = verts.iter().copied().filter(|&v| steiner_ok(v)).collect();
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in verts.iter().enumerate() {
            pos[v] = i;
        }
        SubsetSteiner {
            closure,
            terminals,
            steiner,
            verts,
            pos,
            tables: HashMap::new(),
        }
    }

    /// Fills tables for every subset of size `2..=max_size`.
    pub(crate) fn build(&mut self, max_size: usize) {
        let m = self.terminals.len();
        for size in 2..=max_size.min(m) {
            for subset in (0..m as u32).combinations(size) {
                let table = self.compute(&subset);
                self.tables.insert(subset, table);
            }
        }
    }

    fn value(&self, subset: &[u32], v: NodeId) -> Cost {
        if let [t] = subset {
            self.closure.dist(self.terminals[*t as usize], v)
        } else {
            self.tables[subset].cost[self.pos[v]]
        }
    }

    fn split(subset: &[u32], mask: u32) -> (Vec<u32>, Vec<u32>) {
        let mut first = vec![subset[0]];
        let mut second = Vec::new();
        for (i, &x) in subset[1..].iter().enumerate() {
            if mask >> i & 1 == 1 {
                first.push(x);
            } else {
                second.push(x);
            }
        }
        (first, second)
    }

    fn compute(&self, subset: &[u32]) -> Table {
        let mut branch: Vec<NodeId> = self
            .steiner
            .iter()
            .copied()
            .chain(subset.iter().map(|&t| self.terminals[t as usize]))
            .collect();
        branch.sort_unstable();
        branch.dedup();
        let mut best_split = vec![(Cost::MAX, 0u32); branch.len()];
        let splits = (1u32 << (subset.len() - 1)) - 1;
        for mask in 0..splits {
            let (a, b) = Self::split(subset, mask);
            for (i, &u) in branch.iter().enumerate() {
                let c = self.value(&a, u) + self.value(&b, u);
                if c < best_split[i].0 {
                    best_split[i] = (c, mask);
                }
            }
        }
        let nv = self.verts.len();
        let mut table = Table {
            cost: vec![Cost::MAX; nv],
            back_vertex: vec![0; nv],
            back_split: vec![0; nv],
        };
        for (i, &u) in branch.iter().enumerate() {
            let (g, mask) = best_split[i];
            for (j, &v) in self.verts.iter().enumerate() {
                let c = g + self.closure.dist(u, v);
                if c < table.cost[j] {
                    table.cost[j] = c;
                    table.back_vertex[j] = u;
                    table.back_split[j] = mask;
                }
            }
        }
        table
    }

    /// Cost of the optimal tree spanning the terminals at `subset` indices.
    /// Needs tables up to `subset.len() - 1`.
    pub(crate) fn optimal_cost(&self, subset: &[usize]) -> Cost {
        match subset {
            [] | [_] => 0,
            _ => {
                let rest: Vec<u32> = subset[..subset.len() - 1]
                    .iter()
                    .map(|&i| i as u32)
                    .collect();
                self.value(&rest, self.terminals[*subset.last().expect("nonempty")])
            }
        }
    }

    /// Closure edges (original vertex ids) of the optimal tree for `subset`.
    /// Edges may repeat or close cycles in degenerate cases; callers take a
    /// spanning tree of their union.
    pub(crate) fn optimal_tree_edges(&self, subset: &[usize]) -> Vec<Edge> {
        let mut out = Vec::new();
        if subset.len() >= 2 {
            let rest: Vec<u32> = subset[..subset.len() - 1]
                .iter()
                .map(|&i| i as u32)
                .collect();
            self.reconstruct(
                &rest,
                self.terminals[*subset.last().expect("nonempty")],
                &mut out,
            );
        }
        out
    }

    fn reconstruct(&self, subset: &[u32], v: NodeId, out: &mut Vec<Edge>) {
        if let [t] = subset {
            let t = self.terminals[*t as usize];
            if t != v {
                out.push(Edge::new(t, v, self.closure.dist(t, v)));
            }
            return;
        }
        let table = &self.tables[subset];
        let j = self.pos[v];
        let u = table.back_vertex[j];
        if u != v {
            out.push(Edge::new(u, v, self.closure.dist(u, v)));
        }
        let (a, b) = Self::split(subset, table.back_split[j]);
        self.reconstruct(&a, u, out);
        self.reconstruct(&b, u, out);
    }
}

/// Minimum-cost Steiner tree spanning `terminals`, expanded into the
/// original graph.
pub fn optimal_steiner_tree(
    closure: &MetricClosure,
    terminals: &[NodeId],
    limit: usize,
) -> Result<ExactResult> {
    if terminals.len() > limit {
        return Err(SteinerError::LimitExceeded {
            what: "exact terminal",
            actual: terminals.len(),
            limit,
        });
    }
    let mut terms = terminals.to_vec();
    terms.sort_unstable();
    terms.dedup();
    match terms.as_slice() {
        [] => return Err(SteinerError::InvalidInstance("no terminals".into())),
        [t] => {
            return Ok(ExactResult {
                tree: Tree::singleton(*t),
                cost: 0,
                restricted_k: None,
            })
        }
        _ => {}
    }
    for &t in &terms {
        if t >= closure.vertex_count() {
            return Err(SteinerError::UnknownNode(t));
        }
        if !closure.is_reachable(terms[0], t) {
            return Err(SteinerError::DisconnectedTerminals(terms[0], t));
        }
    }
    let mut dp = SubsetSteiner::with_pool(closure, terms.clone(), |_| true);
    dp.build(terms.len() - 1);
    let all: Vec<usize> = (0..terms.len()).collect();
    let cost = dp.optimal_cost(&all);
    let pairs: Vec<(NodeId, NodeId)> = dp
        .optimal_tree_edges(&all)
        .iter()
        .map(|e| (e.u, e.v))
        .collect();
    let tree = closure.realize(&pairs, &terms)?;
    if tree.total_cost() != cost {
        return Err(SteinerError::Internal(format!(
            "realized optimal tree costs {} but the table says {}",
            tree.total_cost(),
            cost
        )));
    }
    Ok(ExactResult {
        tree,
        cost,
        restricted_k: None,
    })
}

enum Choice {
    Component(usize),
    Join(u32, u32),
}

/// Optimal k-restricted Steiner tree: the cheapest connected union of
/// candidate components spanning every terminal.
///
/// Any such union can be reduced to a hypertree over the terminals, so the
/// search runs over terminal subsets: a subset is either covered by one
/// component or is two smaller connected pieces sharing exactly one terminal.
pub fn optimal_k_restricted(
    instance: &Instance,
    candidates: &CandidatePool,
    k: usize,
    limit: usize,
) -> Result<ExactResult> {
    if k < 2 {
        return Err(SteinerError::InvalidK(k));
    }
    let terms = instance.terminals();
    if terms.len() > limit || terms.len() > 20 {
        return Err(SteinerError::LimitExceeded {
            what: "k-restricted oracle terminal",
            actual: terms.len(),
            limit: limit.min(20),
        });
    }
    let bit = |t: NodeId| 1u32 << terms.binary_search(&t).expect("candidate terminal");
    let full = (1u32 << terms.len()) - 1;
    let mut best: Vec<Option<(Cost, Choice)>> = (0..=full).map(|_| None).collect();
    for (i, c) in candidates.as_slice().iter().enumerate() {
        if c.terminals().len() > k {
            continue;
        }
        let mask = c.terminals().iter().fold(0, |m, &t| m | bit(t));
        if best[mask as usize]
            .as_ref()
            .is_none_or(|(b, _)| c.cost() < *b)
        {
            best[mask as usize] = Some((c.cost(), Choice::Component(i)));
        }
    }
    for mask in 1..=full {
        if mask.count_ones() < 3 {
            continue;
        }
        let mut current = best[mask as usize].as_ref().map(|(c, _)| *c);
        let mut choice = None;
        for h in 0..terms.len() {
            let hb = 1u32 << h;
            if mask & hb == 0 {
                continue;
            }
            let rest = mask & !hb;
            let low = rest & rest.wrapping_neg();
            let mut a = (rest - 1) & rest;
            // submasks of `rest` containing its lowest bit, excluding `rest`
            loop {
                if a & low != 0 && a != rest {
                    let b = rest & !a;
                    if let (Some((ca, _)), Some((cb, _))) =
                        (&best[(a | hb) as usize], &best[(b | hb) as usize])
                    {
                        let total = ca + cb;
                        if current.is_none_or(|c| total < c) {
                            current = Some(total);
                            choice = Some(Choice::Join(a | hb, b | hb));
                        }
                    }
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & rest;
            }
        }
        if let Some(ch) = choice {
            best[mask as usize] = Some((current.expect("set with choice"), ch));
        }
    }
    let Some((cost, _)) = &best[full as usize] else {
        return Err(SteinerError::Internal(
            "no k-restricted tree spans the terminals".into(),
        ));
    };
    let cost = *cost;
    let mut picked = Vec::new();
    let mut stack = vec![full];
    while let Some(m) = stack.pop() {
        match &best[m as usize].as_ref().expect("reachable").1 {
            Choice::Component(i) => picked.push(*i),
            Choice::Join(a, b) => {
                stack.push(*a);
                stack.push(*b);
            }
        }
    }
    picked.sort_unstable();
    let mut ids = candidates.id_allocator(instance.vertex_count());
    let mut nodes: Vec<NodeId> = terms.to_vec();
    let mut edges = Vec::new();
    for i in picked {
        let c = candidates.get(i).with_fresh_ids(&mut ids);
        nodes.extend(c.steiner_points().iter().map(|s| s.id));
        edges.extend_from_slice(c.edges());
    }
    let tree = Tree::from_edges(nodes, edges)?;
    debug_assert_eq!(tree.total_cost(), cost);
    Ok(ExactResult {
        tree,
        cost,
        restricted_k: Some(k),
    })
}
