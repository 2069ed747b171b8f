mod common;

use common::oracles::{random_grid, relaxation_length};
use proptest::prelude::*;
use rand::SeedableRng;
use tmprl_core::harness::{motion_length, plan_from_labels, Setup, COMPETITIVE_PLANS};
use tmprl_core::motion_planner::{euclidean, shortest_path, OccupancyGrid, Pose};

fn center(x: usize, y: usize) -> Pose {
    Pose::new(x as f64 + 0.5, y as f64 + 0.5)
}

fn grid_strategy() -> impl Strategy<Value = OccupancyGrid> {
    (2usize..=20, 2usize..=20, 0.0..0.45f64, any::<u64>()).prop_map(|(w, h, density, seed)| {
        random_grid(
            &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed),
            w,
            h,
            density,
        )
    })
}

fn cell(g: &OccupancyGrid) -> impl Strategy<Value = (usize, usize)> {
    (0..g.width, 0..g.height)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_relaxation_oracle((g, a, b) in grid_strategy().prop_flat_map(|g| {
        let (ca, cb) = (cell(&g), cell(&g));
        (Just(g), ca, cb)
    })) {
        let got = shortest_path(&g, center(a.0, a.1), center(b.0, b.1)).ok().map(|t| t.length);
        let want = relaxation_length(&g, a, b);
        prop_assert_eq!(got, want);
        if let Some(len) = got {
            prop_assert!(len + 1e-9 >= euclidean(center(a.0, a.1), center(b.0, b.1)));
        }
    }

    #[test]
    fn symmetric_and_triangular((g, a, b, c) in grid_strategy().prop_flat_map(|g| {
        let (ca, cb, cc) = (cell(&g), cell(&g), cell(&g));
        (Just(g), ca, cb, cc)
    })) {
        let len = |p: (usize, usize), q: (usize, usize)| {
            shortest_path(&g, center(p.0, p.1), center(q.0, q.1)).ok().map(|t| t.length)
        };
        prop_assert_eq!(len(a, b), len(b, a));
        if let (Some(ab), Some(bc)) = (len(a, b), len(b, c)) {
            let ac = len(a, c).expect("connected through b");
            prop_assert!(ac <= ab + bc + 1e-9);
        }
    }

    #[test]
    fn waypoints_are_free_and_adjacent((g, a, b) in grid_strategy().prop_flat_map(|g| {
        let (ca, cb) = (cell(&g), cell(&g));
        (Just(g), ca, cb)
    })) {
        if let Ok(t) = shortest_path(&g, center(a.0, a.1), center(b.0, b.1)) {
            let mut total = 0.0;
            for w in t.waypoints.windows(2) {
                let step = euclidean(w[0], w[1]);
                prop_assert!((step - 1.0).abs() < 1e-12 || (step - std::f64::consts::SQRT_2).abs() < 1e-12);
                total += step;
            }
            for p in &t.waypoints {
                let (x, y) = g.cell_of(*p).unwrap();
                prop_assert!(g.cell(x, y).is_free());
            }
            prop_assert!((total - t.length).abs() < 1e-9);
        }
    }
}

#[test]
fn bundled_motion_lengths() {
    let setup = Setup::bundled();
    let p = setup.scenario("start_1").unwrap();
    let lengths: Vec<f64> = COMPETITIVE_PLANS
        .iter()
        .map(|(_, labels)| {
            motion_length(
                &setup.dom,
                &plan_from_labels(&setup.dom.domain, &p, labels).unwrap(),
            )
            .unwrap()
        })
        .collect();
    let (l1, l2, l3) = (lengths[0], lengths[1], lengths[2]);
    assert!(l2 < l3 && l3 < l1, "{lengths:?}");
    // Golden values: straight and diagonal step counts on the bundled grid.
    let r2 = std::f64::consts::SQRT_2;
    assert!((l1 - (43.0 + 12.0 * r2)).abs() < 1e-9, "{l1}");
    assert!((l2 - (14.0 + 19.0 * r2)).abs() < 1e-9, "{l2}");
    assert!((l3 - (38.0 + 9.0 * r2)).abs() < 1e-9, "{l3}");
}
