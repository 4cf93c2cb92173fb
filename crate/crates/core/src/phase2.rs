//! Relative greedy over the twin trees `T_origin` and `T_base`, driven by
//! `f(K) = load/Ψ`, producing `S₂`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::Check;
use crate::components::{load, merge_components, psi, CandidatePool, FullComponent};
use crate::error::Result;
use crate::graph::{ContractedTree, Cost, MetricClosure, NodeId, Tree};
use crate::ratio::ExactRatio;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phase2Step {
    pub iteration: usize,
    pub candidate: usize,
    pub terminals: Vec<NodeId>,
    pub load: Cost,
    pub psi: Cost,
    pub f: ExactRatio,
    pub origin_cost: Cost,
    pub base_cost: Cost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub index: usize,
    pub load: Cost,
    pub psi: Cost,
    pub f: ExactRatio,
}

/// Candidate minimizing `load/Ψ` among those with `Ψ > 0`, earliest on ties.
pub fn select_candidate(
    t_origin: &ContractedTree,
    t_base: &ContractedTree,
    candidates: &CandidatePool,
) -> Result<Option<Selection>> {
    let scored = candidates
        .as_slice()
        .par_iter()
        .enumerate()
        .map(|(i, c)| Ok((i, psi(t_origin, t_base, c)?, load(t_base, c)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<Selection> = None;
    for (index, p, l) in scored {
        if p <= 0 {
            continue;
        }
        let f = ExactRatio::new(l, p);
        if best.is_none_or(|b| f < b.f) {
            best = Some(Selection {
                index,
                load: l,
                psi: p,
                f,
            });
        }
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct Phase2Output {
    pub s2: Tree,
    pub s2_merge_cost: Cost,
    pub chosen: Vec<FullComponent>,
    pub trace: Vec<Phase2Step>,
    pub origin_cost: Cost,
    pub base_cost: Cost,
    /// Costs still differ but no candidate has `Ψ > 0`.
    pub stalled: bool,
    /// `cost(T_origin⁰) − cost(T_base⁰)`.
    pub initial_gap: Cost,
    pub initial_base_cost: Cost,
}

/// Contracts the best candidate into both trees until their costs agree.
pub fn run_phase2(
    closure: &MetricClosure,
    candidates: &CandidatePool,
    t0: &Tree,
    t_base: &ContractedTree,
) -> Result<Phase2Output> {
    let mut origin = ContractedTree::new(t0.clone());
    let mut base = t_base.clone();
    let initial_gap = origin.cost() - base.cost();
    let initial_base_cost = base.cost();
    let mut trace = Vec::new();
    let mut chosen = Vec::new();
    let mut stalled = false;
    while origin.cost() != base.cost() {
        let Some(sel) = select_candidate(&origin, &base, candidates)? else {
            stalled = true;
            log::warn!(
                "phase 2 stalled with costs {} and {}",
                origin.cost(),
                base.cost()
            );
            break;
        };
        let component = candidates.get(sel.index);
        origin = origin.contract_zero_set(component.terminals())?;
        base = base.contract_zero_set(component.terminals())?;
        chosen.push(component.clone());
        trace.push(Phase2Step {
            iteration: trace.len() + 1,
            candidate: sel.index,
            terminals: component.terminals().to_vec(),
            load: sel.load,
            psi: sel.psi,
            f: sel.f,
            origin_cost: origin.cost(),
            base_cost: base.cost(),
        });
        log::debug!(
            "phase 2 iteration {}: candidate {} f = {}/{}",
            trace.len(),
            sel.index,
            sel.f.num(),
            sel.f.den()
        );
    }
    let terminals = t0.nodes().to_vec();
    let (s2_merge_cost, s2) = merge_components(closure, t0, &chosen, &terminals)?;
    Ok(Phase2Output {
        s2,
        s2_merge_cost,
        chosen,
        trace,
        origin_cost: origin.cost(),
        base_cost: base.cost(),
        stalled,
        initial_gap,
        initial_base_cost,
    })
}

/// Post-hoc invariant checks on a finished phase 2.
pub fn phase2_checks(out: &Phase2Output) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut overlap = 0;
    for (i, a) in out.chosen.iter().enumerate() {
        for b in &out.chosen[i + 1..] {
            let shared = a
                .terminals()
                .iter()
                .filter(|t| b.terminals().binary_search(t).is_ok())
                .count();
            overlap = overlap.max(shared);
        }
    }
    checks.push(Check::new(
        "lemma4_well_solution",
        overlap <= 1,
        format!("max shared terminals {overlap}"),
    ));
    checks.push(Check::new(
        "phase2_exact_termination",
        !out.stalled && out.origin_cost == out.base_cost,
        format!("{} vs {}", out.origin_cost, out.base_cost),
    ));
    let psi_sum: Cost = out.trace.iter().map(|s| s.psi).sum();
    checks.push(Check::new(
        "phase2_psi_telescopes",
        out.stalled || psi_sum == out.initial_gap,
        format!("sum {psi_sum}, gap {}", out.initial_gap),
    ));
    let mut ordered = true;
    let mut prev = (
        out.initial_gap + out.initial_base_cost,
        out.initial_base_cost,
    );
    for s in &out.trace {
        ordered &= s.origin_cost >= s.base_cost && s.origin_cost <= prev.0 && s.base_cost <= prev.1;
        prev = (s.origin_cost, s.base_cost);
    }
    checks.push(Check::new(
        "phase2_costs_nonincreasing_and_ordered",
        ordered,
        "",
    ));
    let load_sum: Cost = out.trace.iter().map(|s| s.load).sum();
    checks.push(Check::le(
        "s2_le_base_plus_loads",
        out.s2_merge_cost,
        out.initial_base_cost + load_sum,
    ));
    checks.push(Check::le(
        "s2_le_merge",
        out.s2.total_cost(),
        out.s2_merge_cost,
    ));
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::enumerate_full_components;
    use crate::graph::{GraphEdge, Instance};
    use crate::phase1::run_phase1;

    fn star3() -> Instance {
        let e = |u, v| GraphEdge { u, v, weight: 1 };
        Instance::new("star3", 4, vec![e(0, 1), e(0, 2), e(0, 3)], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn star3_selects_the_star_once() {
        let inst = star3();
        let closure = MetricClosure::new(&inst).unwrap();
        let pool = enumerate_full_components(&inst, &closure, 3).unwrap();
        let p1 = run_phase1(&inst, &closure, &pool).unwrap();
        let origin = ContractedTree::new(p1.t0.clone());
        let star = pool.find(&[1, 2, 3]).unwrap();
        let pair = pool.find(&[1, 2]).unwrap();
        assert_eq!(load(&p1.t_base, star).unwrap(), 1);
        assert_eq!(psi(&origin, &p1.t_base, star).unwrap(), 2);
        assert_eq!(load(&p1.t_base, pair).unwrap(), 1);
        assert_eq!(psi(&origin, &p1.t_base, pair).unwrap(), 1);
        let out = run_phase2(&closure, &pool, &p1.t0, &p1.t_base).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert_eq!(out.trace[0].terminals, vec![1, 2, 3]);
        assert_eq!(out.trace[0].f, ExactRatio::new(1, 2));
        assert_eq!((out.origin_cost, out.base_cost), (0, 0));
        assert_eq!(out.s2.total_cost(), 3);
        assert!(phase2_checks(&out).iter().all(|c| c.satisfied));
    }

    #[test]
    fn equal_trees_need_no_iterations() {
        let e = |u, v, weight| GraphEdge { u, v, weight };
        let inst = Instance::new("t", 3, vec![e(0, 1, 1), e(1, 2, 2)], vec![0, 1, 2]).unwrap();
        let closure = MetricClosure::new(&inst).unwrap();
        let pool = enumerate_full_components(&inst, &closure, 3).unwrap();
        let p1 = run_phase1(&inst, &closure, &pool).unwrap();
        let out = run_phase2(&closure, &pool, &p1.t0, &p1.t_base).unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.s2.total_cost(), 3);
    }

    #[test]
    fn ties_and_signs_in_selection() {
        assert!(ExactRatio::new(2, 5) < ExactRatio::new(3, 6));
        assert!(ExactRatio::new(-1, 3) < ExactRatio::new(0, 1));
        assert_eq!(
            ExactRatio::new(1, 2).cmp(&ExactRatio::new(2, 4)),
            std::cmp::Ordering::Equal
        );
    }
}
