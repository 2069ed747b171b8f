use std::fs;
use std::io::Cursor;

use tmprl_core::harness::{
    default_schedule, run_comparison, run_transfer, validate_setup, ExperimentSpec, Setup,
    SetupPaths, Span,
};
use tmprl_core::planning_loops::{new_tables, LoopConfig, Mode};
use tmprl_core::rl_core::ValueTables;

fn small_spec(modes: Vec<Mode>) -> ExperimentSpec {
    ExperimentSpec {
        modes,
        runs: 2,
        episodes: 3,
        seed: 5,
        ..ExperimentSpec::default()
    }
}

fn header(path: &std::path::Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn output_schemas() {
    let setup = Setup::bundled();
    let p = setup.scenario("start_1").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let rows = run_comparison(
        &setup,
        &p,
        "start_1",
        &small_spec(Mode::ALL.to_vec()),
        dir.path(),
    )
    .unwrap();
    assert_eq!(rows.len(), 3 * 2 * 3);
    assert_eq!(
        header(&dir.path().join("episodes.csv")),
        "run,episode,mode,plan_id,reward,solver_seconds,inner_iterations,incumbent_reused"
    );
    assert_eq!(
        header(&dir.path().join("summary.csv")),
        "mode,episode,runs,mean_reward,std_reward,plan_1,plan_2,plan_3,other"
    );
    assert_eq!(
        header(&dir.path().join("plans.csv")),
        "plan_id,category,actions"
    );
    let episodes = fs::read_to_string(dir.path().join("episodes.csv")).unwrap();
    assert_eq!(episodes.lines().count(), 1 + rows.len());
    // Wall time is left out unless asked for.
    assert!(episodes
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(5) == Some("")));
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 3 * 3);
}

#[test]
fn identical_specs_write_identical_bytes() {
    let setup = Setup::bundled();
    let p = setup.scenario("start_1").unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let spec = small_spec(Mode::ALL.to_vec());
    run_comparison(&setup, &p, "start_1", &spec, a.path()).unwrap();
    run_comparison(&setup, &p, "start_1", &spec, b.path()).unwrap();
    for f in ["episodes.csv", "summary.csv", "plans.csv"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn a_mode_gives_the_same_rows_alone_or_with_others() {
    let setup = Setup::bundled();
    let p = setup.scenario("start_1").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let all = run_comparison(
        &setup,
        &p,
        "start_1",
        &small_spec(Mode::ALL.to_vec()),
        dir.path(),
    )
    .unwrap();
    let alone = run_comparison(
        &setup,
        &p,
        "start_1",
        &small_spec(vec![Mode::TpRl]),
        dir.path(),
    )
    .unwrap();
    let pick = |rows: &[tmprl_core::harness::EpisodeRow]| {
        rows.iter()
            .filter(|r| r.mode == Mode::TpRl)
            .map(|r| {
                (
                    r.run,
                    r.record.episode,
                    r.record.plan.canonical_id(),
                    r.record.reward,
                )
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(pick(&all), pick(&alone));
}

#[test]
fn transfer_writes_loadable_snapshots_at_each_switch() {
    let setup = Setup::bundled();
    let dir = tempfile::tempdir().unwrap();
    let schedule: Vec<Span> = default_schedule()
        .into_iter()
        .map(|s| Span { episodes: 2, ..s })
        .collect();
    let cfg = LoopConfig::default();
    let rows = run_transfer(&setup, &schedule, 1, 3, &cfg, dir.path(), false).unwrap();
    assert_eq!(rows.len(), 2 * 6);
    let mut snaps: Vec<String> = fs::read_dir(dir.path().join("snapshots"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    snaps.sort();
    assert_eq!(snaps, ["run0_ep1.csv", "run0_ep3.csv"]);
    let g = &setup.dom.domain;
    let defaults = new_tables(Mode::TmpRl, &setup.dom, &cfg).defaults;
    for s in snaps {
        let data = fs::read(dir.path().join("snapshots").join(&s)).unwrap();
        let t = ValueTables::read_snapshot(
            g,
            Cursor::new(data.clone()),
            cfg.alpha,
            cfg.beta,
            defaults.clone(),
        )
        .unwrap();
        assert!(!t.is_empty());
        let mut again = Vec::new();
        t.write_snapshot(g, &mut again).unwrap();
        assert_eq!(again, data);
    }
    assert!(header(&dir.path().join("episodes.csv")).starts_with("condition,scenario,run,episode"));
    assert!(header(&dir.path().join("summary.csv")).starts_with("condition,episode"));
    // Episode indices run on across scenarios.
    let continued: Vec<_> = rows
        .iter()
        .filter(|r| r.condition == Some("continued"))
        .collect();
    let idx: Vec<u64> = continued.iter().map(|r| r.record.episode).collect();
    assert_eq!(idx, [0, 1, 2, 3, 4, 5]);
    assert_eq!(continued[2].scenario, "start_2");
}

#[test]
fn rejected_experiments_leave_no_files() {
    let setup = Setup::bundled();
    let p = setup.scenario("start_1").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec {
        runs: 0,
        ..small_spec(vec![Mode::Tmp])
    };
    assert!(run_comparison(&setup, &p, "start_1", &spec, dir.path()).is_err());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn validate_reports_plans_and_modes() {
    let r = validate_setup(&SetupPaths::default(), None, "start_1");
    assert!(r.ok(), "{:?}", r.errors);
    let text = r.lines.join("\n");
    assert!(text.contains("52 atoms, 36 ground actions"), "{text}");
    assert!(
        text.contains("plan_1 dc4f295b0d54f0cb: motion length 59.97 m, expected time 86.65 s"),
        "{text}"
    );
    assert!(
        text.contains("plan_2 b9eca2e6d6784414: motion length 40.87 m, expected time 120.91 s"),
        "{text}"
    );
    assert!(
        text.contains("plan_3 25f18bcdf8e4663d: motion length 50.73 m, expected time 117.32 s"),
        "{text}"
    );
    assert!(
        text.contains("tmp: plan b9eca2e6d6784414 (plan_2)"),
        "{text}"
    );
}

#[test]
fn validate_collects_every_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad_domain = dir.path().join("bad.domain");
    let bad_map = dir.path().join("bad.map");
    fs::write(&bad_domain, "fluent p(.\n").unwrap();
    fs::write(&bad_map, "resolution 1\nlandmark a 0.5 0.5\n#\n").unwrap();
    let paths = SetupPaths {
        domain: Some(bad_domain),
        map: Some(bad_map),
        env: Some(dir.path().join("missing.env")),
    };
    let r = validate_setup(&paths, None, "start_1");
    assert_eq!(r.errors.len(), 3, "{:?}", r.errors);
}
