use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use steiner_core::bounds::{rho_k, theorem1_bound, GUARANTEE};
use steiner_core::components::{enumerate_full_components, FullComponent};
use steiner_core::generate::{random_instance, RandomSpec};
use steiner_core::graph::{DisjointSet, Instance, MetricClosure, NodeId};
use steiner_core::solve::{solve, RunConfig, RunResult};

const SEEDS: u64 = 200;

const STAR3: &str = "33D32945 STP File, STP Format Version 1.0
SECTION Comment
Name \"star3\"
END
SECTION Graph
Nodes 4
Edges 3
E 1 2 1
E 1 3 1
E 1 4 1
END
SECTION Terminals
Terminals 3
T 2
T 3
T 4
END
EOF
";

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

// Written past the test harness capture so the lines show up on success too.
fn report(id: &str, title: &str, outcome: &Outcome) {
    let verdict = if outcome.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "[{verdict}] criterion {id}: {title} | {}",
        outcome.detail
    );
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_steiner"))
}

fn corpus() -> Vec<Instance> {
    (0..SEEDS)
        .map(|seed| {
            let spec = RandomSpec {
                vertices: 6 + (seed % 7) as usize,
                terminals: 3 + (seed / 7 % 6) as usize,
                max_weight: 20,
                density: [0.1, 0.3, 0.6][(seed % 3) as usize],
            };
            random_instance(spec, seed).unwrap()
        })
        .collect()
}

fn brute_force_loss(c: &FullComponent) -> i64 {
    let nodes = c.nodes();
    let idx = |x: NodeId| nodes.binary_search(&x).unwrap();
    let mut best = i64::MAX;
    for mask in 0u32..1 << c.edges().len() {
        let mut dsu = DisjointSet::new(nodes.len());
        let mut cost = 0;
        for (i, e) in c.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                dsu.union(idx(e.u), idx(e.v));
                cost += e.weight;
            }
        }
        if c.steiner_points()
            .iter()
            .all(|s| c.terminals().iter().any(|&t| dsu.same(idx(s.id), idx(t))))
        {
            best = best.min(cost);
        }
    }
    best
}

fn field(out: &str, key: &str) -> Option<f64> {
    out.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix('=')?.parse().ok())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = binary()
        .args(["bounds", "--solve-alpha-star", "--tol", "1e-8"])
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let (Some(alpha), Some(ratio)) = (field(&text, "alpha_star"), field(&text, "ratio")) else {
        return Outcome::new(false, format!("unparseable output {text:?}"));
    };
    let pass = out.status.success()
        && (alpha - 0.7147).abs() <= 1e-3
        && (ratio - 1.4295).abs() <= 1e-3
        && elapsed < Duration::from_secs(1);
    Outcome::new(
        pass,
        format!(
            "alpha*={alpha:.6} ratio={ratio:.6} wall={:.1}ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn criterion_2(runs: &[(usize, RunResult)], elapsed: Duration) -> Outcome {
    let mut violations = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for (k, r) in runs {
        let Some(opt) = r.opt else {
            violations.push(format!("{} k={k}: no opt", r.instance));
            continue;
        };
        let rho = rho_k(*k).unwrap();
        let limit = *rho.numer() as f64 / *rho.denom() as f64 * GUARANTEE + 1e-9;
        let ratio = r.cost as f64 / opt as f64;
        max_ratio = max_ratio.max(ratio);
        if !(opt <= r.cost && r.cost <= r.mst && ratio <= limit) {
            violations.push(format!(
                "{} k={k}: opt {opt} cost {} mst {}",
                r.instance, r.cost, r.mst
            ));
        }
    }
    let pass = violations.is_empty() && runs.len() >= 400 && elapsed < Duration::from_secs(300);
    Outcome::new(
        pass,
        format!(
            "{} instances x k in {{3,4}}, max ratio {max_ratio:.4}, {:.1}s, violations {violations:?}",
            runs.len() / 2,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3(instances: &[Instance], runs: &[(usize, RunResult)]) -> Outcome {
    let mut fails: Vec<String> = Vec::new();
    let mut components = 0;
    for inst in instances {
        let closure = MetricClosure::new(inst).unwrap();
        for c in enumerate_full_components(inst, &closure, 4)
            .unwrap()
            .as_slice()
        {
            if c.nodes().len() <= 6 {
                components += 1;
                if c.loss() != brute_force_loss(c) {
                    fails.push(format!("(a) {} {:?}", inst.name(), c.terminals()));
                }
            }
        }
    }
    let mut optk_runs = 0;
    for (k, r) in runs {
        let c_base = r.c_base.unwrap();
        if r.terminals <= 6 {
            optk_runs += 1;
            if c_base > r.opt_k.unwrap() {
                fails.push(format!("(b) {} k={k}", r.instance));
            }
        }
        if r.cost_s1.unwrap() > 2 * c_base {
            fails.push(format!("(c) {} k={k}", r.instance));
        }
        if !r
            .invariants
            .iter()
            .any(|c| c.name == "lemma4_well_solution" && c.satisfied)
        {
            fails.push(format!("(d) {} k={k}", r.instance));
        }
        if let Some(opt_k) = r.opt_k {
            let bound = theorem1_bound(r.mst, c_base, opt_k).unwrap();
            let s2 = r.cost_s2.unwrap() as f64;
            if s2 > bound + 1e-9 * bound.abs().max(1.0) {
                fails.push(format!("(e) {} k={k}: S2 {s2} > {bound}", r.instance));
            }
        }
    }
    Outcome::new(
        fails.is_empty(),
        format!("{components} components brute-forced, {optk_runs} runs with |R|<=6, violations {fails:?}"),
    )
}

fn criterion_4(runs: &[(usize, RunResult)]) -> Outcome {
    let stalls = runs.iter().filter(|(_, r)| r.stalled).count();
    let exact = runs
        .iter()
        .filter(|(_, r)| {
            r.invariants
                .iter()
                .any(|c| c.name == "phase2_exact_termination" && c.satisfied)
        })
        .count();
    let share = exact as f64 / runs.len() as f64;
    Outcome::new(
        share >= 0.99,
        format!(
            "{exact}/{} runs ended with equal tree costs, stalls {stalls}",
            runs.len()
        ),
    )
}

fn criterion_5(instances: &[Instance]) -> Outcome {
    let render = || -> String {
        instances
            .iter()
            .flat_map(|inst| {
                [3, 4].map(|k| {
                    solve(
                        inst,
                        &RunConfig {
                            k,
                            ..RunConfig::default()
                        },
                    )
                    .unwrap()
                })
            })
            .map(|r| r.to_json_untimed())
            .collect::<Vec<_>>()
            .join("\n")
    };
    let first = render();
    let same = (0..2).all(|_| render() == first);
    Outcome::new(same, format!("3 runs, {} bytes each", first.len()))
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("star3.stp");
    std::fs::write(&path, STAR3).unwrap();
    let out = binary().arg("solve").arg(&path).output().unwrap();
    let json: serde_json::Value = match serde_json::from_slice(&out.stdout) {
        Ok(v) => v,
        Err(e) => return Outcome::new(false, format!("bad json: {e}")),
    };
    let got = ["c_base", "cost_s1", "cost_s2", "cost", "opt"].map(|k| json[k].as_i64());
    let pass = out.status.success() && got == [Some(2), Some(3), Some(3), Some(3), Some(3)];
    Outcome::new(pass, format!("T_base/S1/S2/S/opt = {got:?}"))
}

fn criterion_7() -> Outcome {
    let sizes = [10usize, 20, 40, 80];
    let config = RunConfig {
        exact_opt_limit: 0,
        exact_optk_limit: 0,
        ..RunConfig::default()
    };
    let mut medians = Vec::new();
    for &n in &sizes {
        let mut times: Vec<f64> = (0..3)
            .map(|seed| {
                let spec = RandomSpec {
                    vertices: 2 * n,
                    terminals: n,
                    max_weight: 20,
                    density: 0.1,
                };
                let inst = random_instance(spec, 1000 + seed).unwrap();
                let start = Instant::now();
                solve(&inst, &config).unwrap();
                start.elapsed().as_secs_f64().max(1e-6)
            })
            .collect();
        times.sort_by(f64::total_cmp);
        medians.push(times[1]);
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = medians.iter().map(|t| t.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let shown: Vec<String> = medians
        .iter()
        .map(|t| format!("{:.1}ms", t * 1e3))
        .collect();
    Outcome::new(
        slope < 8.0,
        format!("medians {shown:?} for n={sizes:?}, log-log slope {slope:.2}"),
    )
}

#[test]
fn acceptance() {
    let instances = corpus();
    let start = Instant::now();
    let runs: Vec<(usize, RunResult)> = instances
        .iter()
        .flat_map(|inst| {
            [3, 4].map(|k| {
                (
                    k,
                    solve(
                        inst,
                        &RunConfig {
                            k,
                            ..RunConfig::default()
                        },
                    )
                    .unwrap(),
                )
            })
        })
        .collect();
    let elapsed = start.elapsed();

    let results = [
        (
            "1",
            "ratio constants from the curve crossing",
            criterion_1(),
        ),
        (
            "2",
            "oracle sandwich and ratio guarantee",
            criterion_2(&runs, elapsed),
        ),
        ("3", "lemma suite (a)-(e)", criterion_3(&instances, &runs)),
        (
            "4",
            "exact termination of the relative greedy",
            criterion_4(&runs),
        ),
        (
            "5",
            "byte-identical untimed output",
            criterion_5(&instances),
        ),
        ("6", "STAR3 golden values", criterion_6()),
        ("7", "runtime growth in the terminal count", criterion_7()),
    ];
    for (id, title, outcome) in &results {
        report(id, title, outcome);
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
