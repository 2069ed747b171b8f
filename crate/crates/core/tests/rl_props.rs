mod common;

use common::oracles::RefTables;
use proptest::prelude::*;
use tmprl_core::action_lang::{parse_domain, GroundedDomain};
use tmprl_core::harness::Setup;
use tmprl_core::motion_planner::{euclidean, NAVIGATION_ACTION};
use tmprl_core::rl_core::{
    reward_from_motion, Abstraction, DefaultPolicy, RlStateKey, ValueTables,
};

const STATES: usize = 5;
const ACTIONS: usize = 4;

/// A domain whose abstract states are `near(l0)` .. `near(l4)`.
fn keys() -> (GroundedDomain, Vec<RlStateKey>) {
    let mut text = String::from("type loc. fluent near(loc). inertial near.\n");
    for i in 0..STATES {
        text += &format!("object l{i} : loc.\n");
    }
    for a in 0..ACTIONS {
        text += &format!("action a{a}. a{a} causes near(l0).\n");
    }
    let g = GroundedDomain::ground(&parse_domain(&text).unwrap()).unwrap();
    let abs = Abstraction::new(&g);
    let keys = (0..STATES)
        .map(|i| {
            let atom = tmprl_core::action_lang::GroundAtom::new("near", &[&format!("l{i}")]);
            abs.key(&g.state_from_atoms([&atom]).unwrap())
        })
        .collect();
    (g, keys)
}

fn zero_defaults() -> DefaultPolicy {
    DefaultPolicy {
        fallback: 0.0,
        open_door: 0.0,
        ..DefaultPolicy::default()
    }
}

type Step = (usize, usize, f64, usize, f64);

fn steps(max: usize) -> impl Strategy<Value = Vec<Step>> {
    prop::collection::vec(
        (
            0..STATES,
            0..ACTIONS,
            -100.0..0.0f64,
            0..STATES,
            -10.0..0.0f64,
        ),
        1..max,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn updates_match_reference(seq in steps(200), alpha in 0.01..1.0f64, beta in 0.01..1.0f64) {
        let (_, keys) = keys();
        let mut t = ValueTables::new(ACTIONS, alpha, beta, zero_defaults());
        let mut oracle = RefTables::new(ACTIONS, alpha, beta);
        for (s, a, r, s2, d) in seq {
            t.update(&keys[s], a, r, &keys[s2], d);
            oracle.update(s, a, r, s2, d);
            let got_r = t.r_stored(&keys[s], a).unwrap();
            let got_rho = t.rho_stored(&keys[s], a).unwrap();
            prop_assert!((got_r - oracle.r[&(s, a)]).abs() <= 1e-12);
            prop_assert!((got_rho - oracle.rho[&(s, a)]).abs() <= 1e-12);
        }
    }

    #[test]
    fn update_is_local(seq in steps(50), probe in (0..STATES, 0..ACTIONS, -50.0..0.0f64, 0..STATES)) {
        let (_, keys) = keys();
        let mut t = ValueTables::new(ACTIONS, 0.1, 0.5, DefaultPolicy::default());
        for (s, a, r, s2, d) in seq {
            t.update(&keys[s], a, r, &keys[s2], d);
        }
        let before = t.entries();
        let (s, a, r, s2) = probe;
        t.update(&keys[s], a, r, &keys[s2], -1.0);
        let after = t.entries();
        let touched = |e: &(RlStateKey, usize, Option<f64>, Option<f64>)| e.0 == keys[s] && e.1 == a;
        let rest_before: Vec<_> = before.iter().filter(|e| !touched(e)).collect();
        let rest_after: Vec<_> = after.iter().filter(|e| !touched(e)).collect();
        prop_assert_eq!(
            format!("{:?}", rest_before.iter().map(|e| (e.2.map(f64::to_bits), e.3.map(f64::to_bits))).collect::<Vec<_>>()),
            format!("{:?}", rest_after.iter().map(|e| (e.2.map(f64::to_bits), e.3.map(f64::to_bits))).collect::<Vec<_>>())
        );
    }

    #[test]
    fn snapshot_round_trip_is_exact(seq in steps(80)) {
        let (g, keys) = keys();
        let mut t = ValueTables::new(ACTIONS, 0.1, 0.5, DefaultPolicy::default());
        for (s, a, r, s2, d) in seq {
            t.update(&keys[s], a, r, &keys[s2], d);
        }
        let mut buf = Vec::new();
        t.write_snapshot(&g, &mut buf).unwrap();
        let back = ValueTables::read_snapshot(&g, buf.as_slice(), 0.1, 0.5, DefaultPolicy::default()).unwrap();
        prop_assert_eq!(t, back);
    }
}

// The gains stay within a few reward ranges. The relative values share a
// common offset that nothing pins down, so under arbitrary transitions it
// may creep upward; only its growth rate is bounded.
#[test]
fn values_stay_finite_and_gains_bounded() {
    use rand::{Rng, SeedableRng};
    let (_, keys) = keys();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut t = ValueTables::new(ACTIONS, 0.1, 0.5, zero_defaults());
    let (b, d) = (100.0, 10.0);
    let n = 100_000;
    for _ in 0..n {
        let (s, a, s2) = (
            rng.random_range(0..STATES),
            rng.random_range(0..ACTIONS),
            rng.random_range(0..STATES),
        );
        t.update(
            &keys[s],
            a,
            -rng.random_range(0.0..b),
            &keys[s2],
            -rng.random_range(0.0..d),
        );
    }
    for (_, _, r, rho) in t.entries() {
        let (r, rho) = (r.unwrap(), rho.unwrap());
        assert!(r.is_finite() && rho.is_finite());
        assert!(rho >= -2.0 * (b + d) && rho <= b, "{rho}");
        assert!(r.abs() <= 0.1 * n as f64 * 2.0 * (b + d), "{r}");
    }
}

#[test]
fn constant_reward_contracts_to_fixed_point() {
    let (_, keys) = keys();
    let mut t = ValueTables::new(ACTIONS, 0.1, 0.5, zero_defaults());
    // Fixed successor values: state 1 is never updated after this.
    t.update(&keys[1], 2, -4.0, &keys[3], 0.0);
    let r_star = -7.5;
    for _ in 0..2_000 {
        t.update(&keys[0], 1, r_star, &keys[1], 0.0);
    }
    let r = t.r_stored(&keys[0], 1).unwrap();
    let rho = t.rho_stored(&keys[0], 1).unwrap();
    let fixed = r_star - rho + t.max_r(&keys[1]);
    assert!((r - fixed).abs() < 1e-6, "{r} vs {fixed}");
}

#[test]
fn euclidean_defaults_are_optimistic_on_the_bundled_map() {
    let setup = Setup::bundled();
    let g = &setup.dom.domain;
    let motion = &setup.dom.motion;
    let defaults = DefaultPolicy::default();
    let mut legs = 0;
    // Every approach transition from every mapped situation.
    let starts: Vec<_> = setup
        .dom
        .motion
        .symbols
        .entries()
        .into_iter()
        .map(|((region, near), _)| {
            let mut atoms = vec![tmprl_core::action_lang::GroundAtom::new("in", &[&region])];
            if let Some(n) = &near {
                atoms.push(tmprl_core::action_lang::GroundAtom::new("near", &[n]));
            }
            g.state_from_atoms(&atoms).unwrap()
        })
        .collect();
    for s in &starts {
        for (a, act) in g.actions().iter().enumerate() {
            if act.name != NAVIGATION_ACTION {
                continue;
            }
            let Some(s2) = g.apply(s, a) else { continue };
            let len = motion.leg_length(g, s, a, &s2).unwrap();
            let d = euclidean(
                motion.map_state(s, g).unwrap(),
                motion.map_state(&s2, g).unwrap(),
            );
            let default = defaults.rho_default(NAVIGATION_ACTION, Some(d));
            assert!(
                default
                    >= reward_from_motion(
                        len.map_err(|_| tmprl_core::motion_planner::Infeasible::NoPath)
                    ) - 1e-9
            );
            legs += 1;
        }
    }
    assert!(legs > 50, "{legs}");
}

#[test]
fn reward_mappings() {
    use tmprl_core::motion_planner::Infeasible;
    use tmprl_core::rl_core::{reward_from_execution, INFEASIBLE_SENTINEL};
    assert_eq!(reward_from_motion(Ok(45.5)), -45.5);
    assert_eq!(reward_from_motion(Ok(0.0)), 0.0);
    assert_eq!(
        reward_from_motion(Err(Infeasible::NoPath)),
        INFEASIBLE_SENTINEL
    );
    assert_eq!(reward_from_execution(80.6), -80.6);
    assert_eq!(reward_from_execution(126.9), -126.9);
}
