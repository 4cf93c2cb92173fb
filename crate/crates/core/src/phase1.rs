//! Loss-contracting greedy: grows the terminal tree `T^t` by loss-contracted
//! components until no candidate has positive gain, yielding `T_base` and `S₁`.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::Check;
use crate::components::{
    gain, merge_components, BasicComponent, CandidatePool, FullComponent, IdAllocator,
};
use crate::error::{Result, SteinerError};
use crate::graph::{
    kruskal_indices, minimum_spanning_tree, ContractedTree, Cost, Edge, Instance, MetricClosure,
    NodeId, Tree,
};
use crate::ratio::ExactRatio;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phase1Step {
    pub iteration: usize,
    pub candidate: usize,
    pub terminals: Vec<NodeId>,
    pub component_cost: Cost,
    pub ratio: ExactRatio,
    pub gain: Cost,
    pub loss: Cost,
    pub tree_cost_before: Cost,
    pub tree_cost_after: Cost,
    pub splits: usize,
    pub basic_kept: usize,
    pub dropped: usize,
}

/// A chosen component. `part` is the piece whose contracted edges are
/// accounted for in `T^t`; `component` is what enters `S₁` (the cheapest
/// known full component on the same terminals, or its basic component once
/// `part` has been displaced entirely).
#[derive(Debug, Clone)]
struct Slot {
    uid: usize,
    part: FullComponent,
    component: FullComponent,
    born: usize,
    basic: bool,
}

/// A labelled edge of `T^t`; `owner` is the slot uid and the edge of its
/// part behind a contracted edge, `None` for edges of `T⁰`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TreeEdge {
    edge: Edge,
    owner: Option<(usize, Edge)>,
}

pub struct Phase1State<'a> {
    closure: &'a MetricClosure,
    candidates: &'a CandidatePool,
    terminals: Vec<NodeId>,
    t0: Tree,
    chosen: Vec<Slot>,
    t_current: Tree,
    labelled: Vec<TreeEdge>,
    ids: IdAllocator,
    next_uid: usize,
    trace: Vec<Phase1Step>,
}

impl<'a> Phase1State<'a> {
    pub fn new(
        instance: &Instance,
        closure: &'a MetricClosure,
        candidates: &'a CandidatePool,
    ) -> Result<Self> {
        let terminals = instance.terminals().to_vec();
        let t0 = minimum_spanning_tree(&terminals, |a, b| Some(closure.dist(a, b)))?;
        let labelled = t0
            .edges()
            .iter()
            .map(|&edge| TreeEdge { edge, owner: None })
            .collect();
        Ok(Phase1State {
            closure,
            candidates,
            t_current: t0.clone(),
            t0,
            terminals,
            chosen: Vec::new(),
            labelled,
            ids: candidates.id_allocator(instance.vertex_count()),
            next_uid: 0,
            trace: Vec::new(),
        })
    }

    pub fn t0(&self) -> &Tree {
        &self.t0
    }

    pub fn tree(&self) -> &Tree {
        &self.t_current
    }

    pub fn chosen(&self) -> Vec<&FullComponent> {
        self.chosen.iter().map(|s| &s.component).collect()
    }

    pub fn trace(&self) -> &[Phase1Step] {
        &self.trace
    }

    /// Adds a component (renamed to fresh ids) as a new slot and sets
    /// `T^t = MST(T^{t−1} ∪ C[K])`, contracted edges of `K` winning ties.
    pub fn push_component(&mut self, component: &FullComponent, iteration: usize) -> Result<usize> {
        let component = component.with_fresh_ids(&mut self.ids);
        let uid = self.next_uid;
        self.next_uid += 1;
        let mut pool: Vec<TreeEdge> = component
            .contracted()
            .edges
            .iter()
            .map(|c| TreeEdge {
                edge: Edge::new(c.u, c.v, c.weight),
                owner: Some((uid, c.origin)),
            })
            .collect();
        pool.extend_from_slice(&self.labelled);
        self.chosen.push(Slot {
            uid,
            part: component.clone(),
            component,
            born: iteration,
            basic: false,
        });
        let edges: Vec<Edge> = pool.iter().map(|p| p.edge).collect();
        let picked = kruskal_indices(&self.terminals, &edges)?;
        self.labelled = picked.iter().map(|&i| pool[i]).collect();
        self.t_current = Tree::from_edges(
            self.terminals.iter().copied(),
            picked.iter().map(|&i| edges[i]).collect(),
        )?;
        Ok(self.chosen.len() - 1)
    }

    /// Edges of the slot's part whose contracted edge is absent from `T^t`.
    fn missing_edges(&self, slot: usize) -> Vec<Edge> {
        let uid = self.chosen[slot].uid;
        let present: HashSet<Edge> = self
            .labelled
            .iter()
            .filter_map(|p| p.owner)
            .filter(|(u, _)| *u == uid)
            .map(|(_, e)| e)
            .collect();
        self.chosen[slot]
            .part
            .contracted()
            .edges
            .iter()
            .map(|c| c.origin)
            .filter(|e| !present.contains(e))
            .collect()
    }

    fn has_tree_edges(&self, slot: usize) -> bool {
        let uid = self.chosen[slot].uid;
        self.labelled
            .iter()
            .any(|p| p.owner.is_some_and(|(u, _)| u == uid))
    }

    /// Splits the part of `slot` by deleting `removed`. Each piece with at
    /// least two terminals becomes its own slot, represented in `S₁` by the
    /// cheapest candidate on its terminal set when that is no dearer than the
    /// piece. Tree edges are relabelled, so `T^t` itself is unchanged.
    /// Returns the number of pieces.
    pub fn apply_replacement(&mut self, slot: usize, removed: &[Edge]) -> Result<usize> {
        if removed.is_empty() {
            return Ok(1);
        }
        let owner = self.chosen[slot].clone();
        for e in removed {
            if !owner.part.contracted().edges.iter().any(|c| c.origin == *e) {
                return Err(SteinerError::Internal(format!(
                    "edge {}-{} does not map to a contracted edge of its owner",
                    e.u, e.v
                )));
            }
        }
        let mut replacement = Vec::new();
        for part in owner.part.split(removed)? {
            let uid = self.next_uid;
            self.next_uid += 1;
            for p in self.labelled.iter_mut() {
                if let Some((u, e)) = p.owner {
                    if u == owner.uid && part.edges().contains(&e) {
                        p.owner = Some((uid, e));
                    }
                }
            }
            let full = part.normalized(self.closure)?;
            let component = match self.candidates.find(part.terminals()) {
                Some(c) if c.cost() <= full.cost() => c.with_fresh_ids(&mut self.ids),
                _ => full.with_fresh_ids(&mut self.ids),
            };
            replacement.push(Slot {
                uid,
                part,
                component,
                born: owner.born,
                basic: false,
            });
        }
        if self
            .labelled
            .iter()
            .any(|p| p.owner.is_some_and(|(u, _)| u == owner.uid))
        {
            return Err(SteinerError::Internal(
                "a tree edge lost its owner in a split".into(),
            ));
        }
        let parts = replacement.len();
        self.chosen.splice(slot..=slot, replacement);
        Ok(parts)
    }

    /// Reduces a slot without edges in `T^t` to its basic component, or drops
    /// it when it has none. Returns whether a basic component was kept.
    pub fn keep_basic_component(&mut self, slot: usize) -> Result<bool> {
        if self.has_tree_edges(slot) {
            return Err(SteinerError::Internal(format!(
                "slot {slot} still has edges in the current tree"
            )));
        }
        match BasicComponent::find(&self.chosen[slot].component) {
            Some(basic) => {
                let s = &mut self.chosen[slot];
                s.component = basic.to_component()?;
                s.basic = true;
                Ok(true)
            }
            None => {
                self.chosen.remove(slot);
                Ok(false)
            }
        }
    }

    /// Splits every slot whose contracted edges are only partly in `T^t`.
    fn settle(&mut self) -> Result<usize> {
        let mut splits = 0;
        let mut slot = 0;
        while slot < self.chosen.len() {
            let missing = self.missing_edges(slot);
            let total = self.chosen[slot].part.contracted().edges.len();
            if self.chosen[slot].basic || missing.is_empty() || missing.len() == total {
                slot += 1;
                continue;
            }
            slot += self.apply_replacement(slot, &missing)?;
            splits += 1;
        }
        Ok(splits)
    }

    /// Candidate with the largest `gain/loss` among those with positive
    /// gain; `loss = 0` ranks above every finite ratio.
    pub fn select(&self) -> Result<Option<(usize, Cost, ExactRatio)>> {
        let tree = ContractedTree::new(self.t_current.clone());
        let scored = self
            .candidates
            .as_slice()
            .par_iter()
            .enumerate()
            .map(|(i, c)| gain(&tree, c).map(|g| (i, g)))
            .collect::<Result<Vec<_>>>()?;
        let mut best: Option<(usize, Cost, ExactRatio)> = None;
        for (i, g) in scored {
            if g <= 0 {
                continue;
            }
            let loss = self.candidates.get(i).loss();
            let r = if loss == 0 {
                ExactRatio::infinity()
            } else {
                ExactRatio::new(g, loss)
            };
            if best.as_ref().is_none_or(|(_, _, b)| r > *b) {
                best = Some((i, g, r));
            }
        }
        Ok(best)
    }

    /// One greedy iteration; `None` once no candidate has positive gain.
    pub fn step(&mut self) -> Result<Option<&Phase1Step>> {
        let Some((index, g, ratio)) = self.select()? else {
            return Ok(None);
        };
        let iteration = self.trace.len() + 1;
        let before = self.t_current.total_cost();
        let candidate = self.candidates.get(index);
        self.push_component(candidate, iteration)?;
        let splits = self.settle()?;
        let (mut kept, mut dropped) = (0, 0);
        for slot in (0..self.chosen.len()).rev() {
            let s = &self.chosen[slot];
            if s.born == iteration || s.basic || self.has_tree_edges(slot) {
                continue;
            }
            if self.keep_basic_component(slot)? {
                kept += 1;
            } else {
                dropped += 1;
            }
        }
        log::debug!(
            "phase 1 iteration {iteration}: candidate {index} r = {}/{} tree {} -> {}",
            ratio.num(),
            ratio.den(),
            before,
            self.t_current.total_cost()
        );
        self.trace.push(Phase1Step {
            iteration,
            candidate: index,
            terminals: candidate.terminals().to_vec(),
            component_cost: candidate.cost(),
            ratio,
            gain: g,
            loss: candidate.loss(),
            tree_cost_before: before,
            tree_cost_after: self.t_current.total_cost(),
            splits,
            basic_kept: kept,
            dropped,
        });
        Ok(self.trace.last())
    }

    /// `T_base` and `S₁ = MST(T⁰ ∪ K₁ ∪ … ∪ K_t)`. Steiner points are
    /// optional: the merge over the components still accounted for in
    /// `T_base` is used when it is cheaper than the merge over all of them.
    pub fn finish(self, capped: bool) -> Result<Phase1Output> {
        let present: Vec<bool> = (0..self.chosen.len())
            .map(|i| self.has_tree_edges(i))
            .collect();
        let in_tree_loss = self
            .chosen
            .iter()
            .zip(&present)
            .filter(|(_, &p)| p)
            .map(|(s, _)| s.part.loss())
            .sum();
        let chosen: Vec<FullComponent> = self.chosen.iter().map(|s| s.component.clone()).collect();
        let active: Vec<FullComponent> = self
            .chosen
            .iter()
            .zip(&present)
            .filter(|(_, &p)| p)
            .map(|(s, _)| s.component.clone())
            .collect();
        let all = merge_components(self.closure, &self.t0, &chosen, &self.terminals)?;
        let (s1_merge_cost, s1) = if active.len() < chosen.len() {
            let restricted = merge_components(self.closure, &self.t0, &active, &self.terminals)?;
            if restricted.0 < all.0 {
                restricted
            } else {
                all
            }
        } else {
            all
        };
        Ok(Phase1Output {
            t_base: ContractedTree::new(self.t_current),
            t0: self.t0,
            s1,
            s1_merge_cost,
            chosen,
            in_tree_loss,
            trace: self.trace,
            capped,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Phase1Output {
    pub t0: Tree,
    pub t_base: ContractedTree,
    /// `S₁` expanded into the input graph.
    pub s1: Tree,
    /// Cost of `S₁` before expansion, with private Steiner copies.
    pub s1_merge_cost: Cost,
    pub chosen: Vec<FullComponent>,
    /// Total loss of the component parts whose contracted edges form part
    /// of `T_base`.
    pub in_tree_loss: Cost,
    pub trace: Vec<Phase1Step>,
    /// Set when the iteration cap stopped the loop.
    pub capped: bool,
}

impl Phase1Output {
    pub fn base_cost(&self) -> Cost {
        self.t_base.cost()
    }
}

/// Runs the greedy until no candidate has positive gain against `T^t`.
pub fn run_phase1(
    instance: &Instance,
    closure: &MetricClosure,
    candidates: &CandidatePool,
) -> Result<Phase1Output> {
    if candidates.is_empty() {
        return Err(SteinerError::InvalidInstance(
            "no candidate components".into(),
        ));
    }
    let mut state = Phase1State::new(instance, closure, candidates)?;
    let cap = 4 * candidates.len() + 8;
    let mut capped = true;
    for _ in 0..cap {
        if state.step()?.is_none() {
            capped = false;
            break;
        }
    }
    if capped {
        log::warn!("phase 1 stopped after {cap} iterations");
    }
    state.finish(capped)
}

/// Post-hoc invariant checks on a finished phase 1.
pub fn phase1_checks(out: &Phase1Output, candidates: &CandidatePool) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mst = out.t0.total_cost();
    let mut previous = mst;
    let mut monotone = true;
    for s in &out.trace {
        monotone &= s.tree_cost_before == previous && s.tree_cost_after <= s.tree_cost_before;
        previous = s.tree_cost_after;
    }
    monotone &= previous == out.base_cost();
    checks.push(Check::new(
        "phase1_tree_cost_nonincreasing",
        monotone,
        format!("{mst} -> {}", out.base_cost()),
    ));
    let mut worst = Cost::MIN;
    for c in candidates.as_slice() {
        worst = worst.max(gain(&out.t_base, c)?);
    }
    checks.push(Check::new(
        "lemma6_no_positive_gain",
        worst <= 0,
        format!("max gain {worst}"),
    ));
    checks.push(Check::le("s1_merge_le_mst", out.s1_merge_cost, mst));
    checks.push(Check::le(
        "s1_le_merge",
        out.s1.total_cost(),
        out.s1_merge_cost,
    ));
    checks.push(Check::le(
        "s1_le_base_plus_loss",
        out.s1_merge_cost,
        out.base_cost() + out.in_tree_loss,
    ));
    let adjacency = out.s1.adjacency();
    let leaf_ok = adjacency
        .iter()
        .all(|(n, inc)| inc.len() > 1 || out.t0.contains(*n) || out.s1.nodes().len() == 1);
    checks.push(Check::new("s1_no_steiner_leaf", leaf_ok, ""));
    let mut seen = HashSet::new();
    let repeats = out
        .trace
        .iter()
        .filter(|s| !seen.insert((s.terminals.clone(), s.component_cost)))
        .count();
    checks.push(Check::new(
        "phase1_no_repeat",
        repeats == 0,
        format!("{repeats} repeated choices"),
    ));
    checks.push(Check::new(
        "phase1_iterations_le_candidates",
        !out.capped && out.trace.len() <= candidates.len(),
        format!(
            "{} iterations, {} candidates",
            out.trace.len(),
            candidates.len()
        ),
    ));
    Ok(checks)
}
