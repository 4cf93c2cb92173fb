//! End-to-end driver: closure, candidates, both phases, oracles and checks.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::bounds::{check_run, BoundReport, Check, RunFacts};
use crate::components::enumerate_full_components;
use crate::error::{Result, SteinerError};
use crate::exact::{
    optimal_k_restricted, optimal_steiner_tree, DEFAULT_OPT_K_LIMIT, DEFAULT_OPT_LIMIT,
};
use crate::graph::{minimum_spanning_tree, Cost, Instance, MetricClosure, Tree};
use crate::phase1::{phase1_checks, run_phase1, Phase1Step};
use crate::phase2::{phase2_checks, run_phase2, Phase2Step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Minimum spanning tree of the terminal distance graph.
    Mst,
    /// Stop after the loss-contracting phase.
    Phase1,
    /// Both phases; the cheaper of `S₁` and `S₂`.
    Full,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mst" => Ok(Mode::Mst),
            "phase1" => Ok(Mode::Phase1),
            "full" => Ok(Mode::Full),
            _ => Err(format!("unknown mode `{s}` (expected mst, phase1 or full)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Mst => "mst",
            Mode::Phase1 => "phase1",
            Mode::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (expected json or csv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub k: usize,
    pub mode: Mode,
    /// Largest terminal count for which the exact optimum is computed.
    pub exact_opt_limit: usize,
    /// Largest terminal count for which the optimal k-restricted tree is computed.
    pub exact_optk_limit: usize,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: 3,
            mode: Mode::Full,
            exact_opt_limit: DEFAULT_OPT_LIMIT,
            exact_optk_limit: DEFAULT_OPT_K_LIMIT,
            format: Format::Json,
        }
    }
}

/// Solution edge in one-based input vertex ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolutionEdge {
    pub u: usize,
    pub v: usize,
    pub weight: Cost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub instance: String,
    pub vertices: usize,
    pub edges: usize,
    pub terminals: usize,
    pub k: usize,
    pub mode: Mode,
    /// Every cost below is in input units times this denominator.
    pub weight_denominator: i64,
    pub solution: Vec<SolutionEdge>,
    pub cost: Cost,
    pub cost_s1: Option<Cost>,
    pub cost_s2: Option<Cost>,
    pub mst: Cost,
    pub c_base: Option<Cost>,
    pub s1_merge_cost: Option<Cost>,
    pub s2_merge_cost: Option<Cost>,
    pub opt: Option<Cost>,
    pub opt_k: Option<Cost>,
    pub candidates: usize,
    pub stalled: bool,
    pub phase1_capped: bool,
    pub bounds: BoundReport,
    pub invariants: Vec<Check>,
    pub phase1_trace: Vec<Phase1Step>,
    pub phase2_trace: Vec<Phase2Step>,
    pub wall_time_ms: f64,
}

pub const CSV_HEADER: [&str; 17] = [
    "name",
    "vertices",
    "edges",
    "terminals",
    "k",
    "mode",
    "mst",
    "cost",
    "cost_s1",
    "cost_s2",
    "c_base",
    "opt",
    "opt_k",
    "bounds_ok",
    "invariants_ok",
    "stalled",
    "runtime_ms",
];

fn opt_cell(v: Option<Cost>) -> String {
    v.map(|c| c.to_string()).unwrap_or_default()
}

impl RunResult {
    /// Bound checks and internal invariants all hold.
    pub fn all_checks_pass(&self) -> bool {
        self.bounds.satisfied && self.invariants.iter().all(|c| c.satisfied)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run result serializes")
    }

    /// JSON with the wall-time field zeroed, for byte comparisons.
    pub fn to_json_untimed(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_ms = 0.0;
        copy.to_json()
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.instance.clone(),
            self.vertices.to_string(),
            self.edges.to_string(),
            self.terminals.to_string(),
            self.k.to_string(),
            self.mode.to_string(),
            self.mst.to_string(),
            self.cost.to_string(),
            opt_cell(self.cost_s1),
            opt_cell(self.cost_s2),
            opt_cell(self.c_base),
            opt_cell(self.opt),
            opt_cell(self.opt_k),
            self.bounds.satisfied.to_string(),
            self.invariants.iter().all(|c| c.satisfied).to_string(),
            self.stalled.to_string(),
            format!("{:.3}", self.wall_time_ms),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        w.write_record(self.csv_record()).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Checks that `tree` is a subgraph of the input spanning every terminal.
pub fn validate_solution(instance: &Instance, tree: &Tree) -> Result<()> {
    for &t in instance.terminals() {
        if !tree.contains(t) {
            return Err(SteinerError::Internal(format!(
                "terminal {} is not spanned",
                t + 1
            )));
        }
    }
    for e in tree.edges() {
        if instance.edge_weight(e.u, e.v) != Some(e.weight) {
            return Err(SteinerError::Internal(format!(
                "solution edge {}-{} is not an input edge",
                e.u + 1,
                e.v + 1
            )));
        }
    }
    Tree::from_edges(tree.nodes().iter().copied(), tree.edges().to_vec())
        .map_err(|e| SteinerError::Internal(format!("solution is not a tree: {e}")))?;
    Ok(())
}

/// Runs the configured pipeline on one instance.
pub fn solve(instance: &Instance, config: &RunConfig) -> Result<RunResult> {
    if config.k < 2 {
        return Err(SteinerError::InvalidK(config.k));
    }
    let start = Instant::now();
    let terminals = instance.terminals();
    let k = config.k.min(terminals.len());
    let closure = MetricClosure::new(instance)?;
    let t0 = minimum_spanning_tree(terminals, |a, b| Some(closure.dist(a, b)))?;
    let mst = t0.total_cost();

    let mut facts = RunFacts {
        k,
        mst,
        ..Default::default()
    };
    let mut invariants = Vec::new();
    let mut phase1_trace = Vec::new();
    let mut phase2_trace = Vec::new();
    let (mut cost_s1, mut cost_s2) = (None, None);
    let mut candidate_count = 0;
    let mut stalled = false;
    let mut capped = false;
    let mut pool = None;

    let solution = if config.mode == Mode::Mst {
        let pairs: Vec<_> = t0.edges().iter().map(|e| (e.u, e.v)).collect();
        closure.realize(&pairs, terminals)?
    } else {
        let candidates = enumerate_full_components(instance, &closure, k)?;
        candidate_count = candidates.len();
        let p1 = run_phase1(instance, &closure, &candidates)?;
        invariants.extend(phase1_checks(&p1, &candidates)?);
        facts.c_base = Some(p1.base_cost());
        facts.s1_merge = Some(p1.s1_merge_cost);
        cost_s1 = Some(p1.s1.total_cost());
        capped = p1.capped;
        phase1_trace = p1.trace.clone();
        let best = if config.mode == Mode::Full {
            let p2 = run_phase2(&closure, &candidates, &p1.t0, &p1.t_base)?;
            invariants.extend(phase2_checks(&p2));
            facts.s2_merge = Some(p2.s2_merge_cost);
            cost_s2 = Some(p2.s2.total_cost());
            stalled = p2.stalled;
            phase2_trace = p2.trace;
            if p2.s2.total_cost() < p1.s1.total_cost() {
                p2.s2
            } else {
                p1.s1
            }
        } else {
            p1.s1
        };
        pool = Some(candidates);
        best
    };
    validate_solution(instance, &solution)?;
    facts.cost = solution.total_cost();

    if terminals.len() <= config.exact_opt_limit {
        facts.opt = Some(optimal_steiner_tree(&closure, terminals, config.exact_opt_limit)?.cost);
    }
    if let Some(candidates) = &pool {
        if terminals.len() <= config.exact_optk_limit {
            facts.opt_k =
                Some(optimal_k_restricted(instance, candidates, k, config.exact_optk_limit)?.cost);
        }
    }
    let bounds = check_run(&facts);
    for c in bounds
        .checks
        .iter()
        .chain(&invariants)
        .filter(|c| !c.satisfied)
    {
        log::warn!(
            "{}: check {} failed ({})",
            instance.name(),
            c.name,
            c.detail
        );
    }
    let mut solution_edges: Vec<SolutionEdge> = solution
        .edges()
        .iter()
        .map(|e| SolutionEdge {
            u: e.u + 1,
            v: e.v + 1,
            weight: e.weight,
        })
        .collect();
    solution_edges.sort_by_key(|e| (e.u, e.v));
    Ok(RunResult {
        instance: instance.name().to_string(),
        vertices: instance.vertex_count(),
        edges: instance.edges().len(),
        terminals: terminals.len(),
        k,
        mode: config.mode,
        weight_denominator: instance.weight_denominator(),
        solution: solution_edges,
        cost: facts.cost,
        cost_s1,
        cost_s2,
        mst,
        c_base: facts.c_base,
        s1_merge_cost: facts.s1_merge,
        s2_merge_cost: facts.s2_merge,
        opt: facts.opt,
        opt_k: facts.opt_k,
        candidates: candidate_count,
        stalled,
        phase1_capped: capped,
        bounds,
        invariants,
        phase1_trace,
        phase2_trace,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphEdge;

    fn star3() -> Instance {
        let e = |u, v| GraphEdge { u, v, weight: 1 };
        Instance::new("star3", 4, vec![e(0, 1), e(0, 2), e(0, 3)], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn star3_full_run() {
        let r = solve(&star3(), &RunConfig::default()).unwrap();
        assert_eq!(r.cost, 3);
        assert_eq!(r.cost_s1, Some(3));
        assert_eq!(r.cost_s2, Some(3));
        assert_eq!(r.c_base, Some(2));
        assert_eq!(r.mst, 4);
        assert_eq!(r.opt, Some(3));
        assert_eq!(r.opt_k, Some(3));
        assert!(
            r.all_checks_pass(),
            "{:?} {:?}",
            r.bounds.checks,
            r.invariants
        );
    }

    #[test]
    fn mst_mode_never_exceeds_mst() {
        let cfg = RunConfig {
            mode: Mode::Mst,
            ..RunConfig::default()
        };
        let r = solve(&star3(), &cfg).unwrap();
        assert_eq!(r.mst, 4);
        assert!(r.cost <= r.mst);
        assert!(r.cost_s1.is_none());
    }

    #[test]
    fn two_terminals_cost_the_distance() {
        let e = |u, v, weight| GraphEdge { u, v, weight };
        let inst =
            Instance::new("p", 3, vec![e(0, 1, 2), e(1, 2, 2), e(0, 2, 5)], vec![0, 2]).unwrap();
        let r = solve(&inst, &RunConfig::default()).unwrap();
        assert_eq!(r.cost, 4);
        assert_eq!(r.k, 2);
    }

    #[test]
    fn k_below_two_is_rejected() {
        let cfg = RunConfig {
            k: 1,
            ..RunConfig::default()
        };
        assert_eq!(
            solve(&star3(), &cfg).unwrap_err(),
            SteinerError::InvalidK(1)
        );
    }

    #[test]
    fn modes_and_formats_parse() {
        assert_eq!("FULL".parse::<Mode>().unwrap(), Mode::Full);
        assert!("fast".parse::<Mode>().is_err());
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        let r = solve(&star3(), &RunConfig::default()).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("name,vertices"));
        assert_eq!(csv.lines().count(), 2);
    }
}
