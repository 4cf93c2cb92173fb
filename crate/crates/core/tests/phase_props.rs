use proptest::prelude::*;

use steiner_core::bounds::theorem1_bound;
use steiner_core::components::{enumerate_full_components, gain};
use steiner_core::generate::{random_instance, RandomSpec};
use steiner_core::graph::{Instance, MetricClosure};
use steiner_core::phase1::{phase1_checks, run_phase1};
use steiner_core::phase2::{phase2_checks, run_phase2};
use steiner_core::solve::{solve, validate_solution, RunConfig};

fn corpus_spec(seed: u64) -> RandomSpec {
    RandomSpec {
        vertices: 6 + (seed % 7) as usize,
        terminals: 3 + (seed / 7 % 6) as usize,
        max_weight: 20,
        density: [0.1, 0.3, 0.6][(seed % 3) as usize],
    }
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (
        5usize..=12,
        3usize..=8,
        prop::sample::select(vec![1i64, 3, 20, 100]),
        0.0f64..0.6,
        any::<u64>(),
    )
        .prop_map(|(vertices, terminals, max_weight, density, seed)| {
            let spec = RandomSpec {
                vertices,
                terminals: terminals.min(vertices),
                max_weight,
                density,
            };
            random_instance(spec, seed).unwrap()
        })
}

#[test]
fn every_check_holds_on_the_seeded_corpus() {
    for seed in 0..120 {
        let inst = random_instance(corpus_spec(seed), seed).unwrap();
        for k in [3, 4] {
            let r = solve(
                &inst,
                &RunConfig {
                    k,
                    ..RunConfig::default()
                },
            )
            .unwrap();
            let failed: Vec<_> = r
                .bounds
                .checks
                .iter()
                .chain(&r.invariants)
                .filter(|c| !c.satisfied)
                .map(|c| format!("{} ({})", c.name, c.detail))
                .collect();
            assert!(failed.is_empty(), "{} k={k}: {failed:?}", inst.name());
            assert!(!r.stalled && !r.phase1_capped);
        }
    }
}

#[test]
fn limit_bound_fails_when_base_equals_opt_k() {
    let inst = random_instance(corpus_spec(2155), 2155).unwrap();
    let r = solve(
        &inst,
        &RunConfig {
            k: 4,
            ..RunConfig::default()
        },
    )
    .unwrap();
    assert_eq!(inst.name(), "rand-v12-t4-s2155");
    assert_eq!((r.c_base, r.opt_k), (Some(24), Some(24)));
    assert_eq!(r.s2_merge_cost, Some(25));
    assert_eq!(r.bounds.theorem1_bound, Some(24.0));
    let failed: Vec<_> = r
        .bounds
        .checks
        .iter()
        .filter(|c| !c.satisfied)
        .map(|c| c.name.as_str())
        .collect();
    assert_eq!(failed, ["theorem1"]);
    assert!(r.invariants.iter().all(|c| c.satisfied));
    assert_eq!(r.cost, 24);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phase_invariants_hold(inst in instance_strategy(), k in 2usize..=4) {
        let closure = MetricClosure::new(&inst).unwrap();
        let pool = enumerate_full_components(&inst, &closure, k).unwrap();
        let p1 = run_phase1(&inst, &closure, &pool).unwrap();
        prop_assert!(!p1.capped);
        for c in phase1_checks(&p1, &pool).unwrap() {
            prop_assert!(c.satisfied, "{}: {}", c.name, c.detail);
        }
        for c in pool.as_slice() {
            prop_assert!(gain(&p1.t_base, c).unwrap() <= 0);
        }
        prop_assert!(p1.s1.total_cost() <= 2 * p1.base_cost());
        let p2 = run_phase2(&closure, &pool, &p1.t0, &p1.t_base).unwrap();
        for c in phase2_checks(&p2) {
            prop_assert!(c.satisfied, "{}: {}", c.name, c.detail);
        }
        validate_solution(&inst, &p1.s1).unwrap();
        validate_solution(&inst, &p2.s2).unwrap();
    }

    #[test]
    fn base_cost_is_at_most_opt_k(inst in instance_strategy(), k in 2usize..=4) {
        let config = RunConfig { k, exact_opt_limit: 0, ..RunConfig::default() };
        let r = solve(&inst, &config).unwrap();
        if let Some(opt_k) = r.opt_k {
            prop_assert!(r.c_base.unwrap() <= opt_k);
            prop_assert!(opt_k <= 2 * r.c_base.unwrap());
        }
    }

    #[test]
    fn theorem1_bound_grows_with_mst(c in 0i64..1000, extra in 0i64..1000, slack in 0i64..1000, step in 0i64..1000) {
        let opt_k = c + extra;
        let mst = opt_k + slack;
        let lo = theorem1_bound(mst, c, opt_k).unwrap();
        let hi = theorem1_bound(mst + step, c, opt_k).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!(lo >= opt_k as f64 - 1e-9 * opt_k.max(1) as f64);
    }
}
