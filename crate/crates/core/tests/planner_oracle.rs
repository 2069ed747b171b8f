mod common;

use common::oracles::{brute_force_plan, random_domain, TableQuality};
use proptest::prelude::*;
use rand::SeedableRng;
use tmprl_core::action_lang::{parse_domain, GroundedDomain};
use tmprl_core::task_planner::{check_plan, plan, plan_quality, NoPlan, PlanningProblem};

fn instance(seed: u64) -> (GroundedDomain, PlanningProblem, TableQuality) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (d, p) = random_domain(&mut rng);
    let g = GroundedDomain::ground(&parse_domain(&d).unwrap()).unwrap();
    let problem = PlanningProblem::parse(&p, &g).unwrap();
    let by_action = (0..g.actions().len())
        .map(|i| -(((seed >> (i * 2)) & 3) as f64) - 1.0)
        .collect();
    let q = TableQuality {
        by_action,
        state_penalty: (seed % 3) as f64 * 0.5,
    };
    (g, problem, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn agrees_with_enumeration(seed in any::<u64>(), horizon in 0usize..=6, bound_idx in 0usize..4) {
        let (g, mut problem, q) = instance(seed);
        problem.max_horizon = horizon;
        problem.quality_bound = [f64::NEG_INFINITY, -3.0, -6.0, -1.0][bound_idx];
        let want = brute_force_plan(&g, &problem, &q, horizon);
        match plan(&problem, &g, &q) {
            Ok(p) => {
                prop_assert!(check_plan(&p, &g, &problem));
                prop_assert!(plan_quality(&p, &q) > problem.quality_bound);
                prop_assert_eq!(Some(p.actions().collect::<Vec<_>>()), want);
            }
            Err(e) => {
                prop_assert_eq!(e, NoPlan::Exhausted);
                prop_assert_eq!(want, None);
            }
        }
    }
}

#[test]
fn shallowest_plan_is_not_always_lexicographically_first() {
    // The one-step plan wins over a lexicographically smaller two-step plan.
    let g = GroundedDomain::ground(
        &parse_domain(
            "fluent x. fluent y. action a. action b.\n\
             a causes y. b causes x. nonexecutable a if y.\n\
             inertial x. inertial y.",
        )
        .unwrap(),
    )
    .unwrap();
    let p = PlanningProblem::parse("init. goal x.", &g).unwrap();
    let q = TableQuality {
        by_action: vec![-1.0, -1.0],
        state_penalty: 0.0,
    };
    let found = plan(&p, &g, &q).unwrap();
    assert_eq!(found.labels(), ["b"]);
}
