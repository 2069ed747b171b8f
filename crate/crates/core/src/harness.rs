//! Experiment drivers: the three-way comparison, the multi-task transfer
//! protocol, setup validation, and their CSV outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Cursor};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::action_lang::{parse_domain, GroundedDomain};
use crate::motion_planner::OccupancyGrid;
use crate::planning_loops::{
    new_tables, run_episode, LoopConfig, LoopError, LoopState, Mode, SimEnv, TaskMotionDomain,
};
use crate::rl_core::{SnapshotError, ValueTables};
use crate::sim_env::{expected_plan_duration, EnvConfig};
use crate::task_planner::{Plan, PlanningProblem};

/// The office floor shipped with the crate.
pub mod bundled {
    pub const DOMAIN: &str = include_str!("../data/office.domain");
    pub const MAP: &str = include_str!("../data/office.map");
    pub const ENV: &str = include_str!("../data/office.env");
    pub const SCENARIOS: [(&str, &str); 3] = [
        ("start_1", include_str!("../data/scenarios/start_1.problem")),
        ("start_2", include_str!("../data/scenarios/start_2.problem")),
        ("start_3", include_str!("../data/scenarios/start_3.problem")),
    ];

    pub fn scenario(name: &str) -> Option<&'static str> {
        SCENARIOS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| *text)
    }
}

/// The three competitive plans from the default start of the bundled office.
pub const COMPETITIVE_PLANS: [(&str, &str); 3] = [
    ("plan_1", "approach(d_top) open_door(d_top) go_through(d_top)"),
    (
        "plan_2",
        "approach(d_a) open_door(d_a) go_through(d_a) approach(d_b) open_door(d_b) go_through(d_b) \
         approach(d_side) open_door(d_side) go_through(d_side)",
    ),
    ("plan_3", "approach(d_bottom) open_door(d_bottom) go_through(d_bottom)"),
];

pub const OTHER_PLANS: &str = "other";

/// `plan_1`, `plan_2`, `plan_3` or `other`.
pub fn plan_category(p: &Plan) -> &'static str {
    let s = p.action_string();
    COMPETITIVE_PLANS
        .iter()
        .find(|(_, actions)| *actions == s)
        .map(|(name, _)| *name)
        .unwrap_or(OTHER_PLANS)
}

pub const DEFAULT_SCENARIO: &str = "start_1";
pub const DEFAULT_RUNS: usize = 50;
pub const DEFAULT_EPISODES: u64 = 40;
pub const DEFAULT_TRANSFER_RUNS: usize = 40;
pub const DEFAULT_TRANSFER_SPAN: u64 = 15;

#[derive(Debug, Error)]
pub enum SetupError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{origin}: {msg}")]
    Invalid { origin: String, msg: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

/// Input files; `None` selects the bundled copy.
#[derive(Debug, Clone, Default)]
pub struct SetupPaths {
    pub domain: Option<PathBuf>,
    pub map: Option<PathBuf>,
    pub env: Option<PathBuf>,
}

fn read_or(path: &Option<PathBuf>, bundled: &str) -> Result<(String, String), SetupError> {
    match path {
        None => Ok((bundled.to_string(), "bundled".to_string())),
        Some(p) => fs::read_to_string(p)
            .map(|t| (t, p.display().to_string()))
            .map_err(|source| SetupError::Io {
                path: p.clone(),
                source,
            }),
    }
}

/// A parsed and grounded domain, map and simulator configuration.
#[derive(Debug)]
pub struct Setup {
    pub dom: TaskMotionDomain,
    pub env: EnvConfig,
}

impl Setup {
    pub fn bundled() -> Self {
        Setup::load(&SetupPaths::default()).expect("bundled files are valid")
    }

    pub fn load(paths: &SetupPaths) -> Result<Self, SetupError> {
        let (errors, setup) = Setup::load_all(paths);
        match setup {
            Some(s) => Ok(s),
            None => Err(errors
                .into_iter()
                .next()
                .expect("a failed load reports an error")),
        }
    }

    /// Loads everything it can, collecting every error instead of stopping at the first.
    fn load_all(paths: &SetupPaths) -> (Vec<SetupError>, Option<Setup>) {
        let mut errors = Vec::new();
        let invalid = |origin: &str, file: &str, msg: String| SetupError::Invalid {
            origin: format!("{file} ({origin})"),
            msg,
        };
        let domain = match read_or(&paths.domain, bundled::DOMAIN) {
            Ok((text, origin)) => match parse_domain(&text) {
                Ok(d) => match GroundedDomain::ground(&d) {
                    Ok(g) => Some(g),
                    Err(e) => {
                        errors.push(invalid(&origin, "domain", e.to_string()));
                        None
                    }
                },
                Err(e) => {
                    errors.push(invalid(&origin, "domain", e.to_string()));
                    None
                }
            },
            Err(e) => {
                errors.push(e);
                None
            }
        };
        let grid = match read_or(&paths.map, bundled::MAP) {
            Ok((text, origin)) => OccupancyGrid::parse(&text)
                .map_err(|e| errors.push(invalid(&origin, "map", e.to_string())))
                .ok(),
            Err(e) => {
                errors.push(e);
                None
            }
        };
        let env = match read_or(&paths.env, bundled::ENV) {
            Ok((text, origin)) => EnvConfig::parse(&text)
                .map_err(|e| errors.push(invalid(&origin, "env config", e.to_string())))
                .ok(),
            Err(e) => {
                errors.push(e);
                None
            }
        };
        match (domain, grid, env) {
            (Some(g), Some(grid), Some(env)) if errors.is_empty() => (
                errors,
                Some(Setup {
                    dom: TaskMotionDomain::new(g, grid),
                    env,
                }),
            ),
            _ => (errors, None),
        }
    }

    pub fn problem(&self, text: &str, origin: &str) -> Result<PlanningProblem, SetupError> {
        PlanningProblem::parse(text, &self.dom.domain).map_err(|e| SetupError::Invalid {
            origin: origin.to_string(),
            msg: e.to_string(),
        })
    }

    pub fn scenario(&self, name: &str) -> Result<PlanningProblem, SetupError> {
        let text =
            bundled::scenario(name).ok_or_else(|| SetupError::UnknownScenario(name.to_string()))?;
        self.problem(text, &format!("scenario {name}"))
    }

    pub fn problem_file(&self, path: &Path) -> Result<PlanningProblem, SetupError> {
        let text = fs::read_to_string(path).map_err(|source| SetupError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.problem(&text, &path.display().to_string())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub modes: Vec<Mode>,
    pub runs: usize,
    pub episodes: u64,
    /// Run `r` uses simulator seed `seed ^ r`.
    pub seed: u64,
    pub loop_cfg: LoopConfig,
    /// Write measured solver wall time; off keeps outputs byte-reproducible.
    pub wall_clock: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            modes: Mode::ALL.to_vec(),
            runs: DEFAULT_RUNS,
            episodes: DEFAULT_EPISODES,
            seed: 0,
            loop_cfg: LoopConfig::default(),
            wall_clock: false,
        }
    }
}

pub fn run_seed(base: u64, run: usize) -> u64 {
    base ^ run as u64
}

/// An episode with the coordinates that place it in an experiment.
#[derive(Debug, Clone)]
pub struct EpisodeRow {
    pub run: usize,
    pub mode: Mode,
    pub condition: Option<&'static str>,
    pub scenario: String,
    pub record: crate::planning_loops::EpisodeRecord,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error("run {run}, mode {mode}: {source}")]
    Loop {
        run: usize,
        mode: Mode,
        #[source]
        source: LoopError,
    },
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn check_spec(spec: &ExperimentSpec) -> Result<(), HarnessError> {
    if spec.runs == 0 || spec.episodes == 0 {
        return Err(HarnessError::Spec(
            "runs and episodes must be at least 1".into(),
        ));
    }
    if spec.modes.is_empty() {
        return Err(HarnessError::Spec("no modes selected".into()));
    }
    Ok(())
}

/// One run of one mode from fresh tables.
#[allow(clippy::too_many_arguments)]
pub fn run_single(
    setup: &Setup,
    problem: &PlanningProblem,
    scenario: &str,
    mode: Mode,
    run: usize,
    episodes: u64,
    base_seed: u64,
    loop_cfg: &LoopConfig,
) -> Result<Vec<EpisodeRow>, HarnessError> {
    let seed = run_seed(base_seed, run);
    let mut cfg = setup.env.clone();
    cfg.rng_seed = seed;
    let mut env = SimEnv::new(&setup.dom, cfg, &problem.initial);
    let mut tables = new_tables(mode, &setup.dom, loop_cfg);
    let mut state = LoopState::default();
    (0..episodes)
        .map(|e| {
            run_episode(
                mode,
                e,
                problem,
                &setup.dom,
                &mut tables,
                &mut env,
                loop_cfg,
                &mut state,
                seed,
            )
            .map(|record| EpisodeRow {
                run,
                mode,
                condition: None,
                scenario: scenario.to_string(),
                record,
            })
            .map_err(|source| HarnessError::Loop { run, mode, source })
        })
        .collect()
}

/// Every (mode, run) pair, in parallel, merged by mode order then run.
pub fn compare(
    setup: &Setup,
    problem: &PlanningProblem,
    scenario: &str,
    spec: &ExperimentSpec,
) -> Result<Vec<EpisodeRow>, HarnessError> {
    check_spec(spec)?;
    let jobs: Vec<(Mode, usize)> = spec
        .modes
        .iter()
        .flat_map(|&m| (0..spec.runs).map(move |r| (m, r)))
        .collect();
    let results: Vec<Result<Vec<EpisodeRow>, HarnessError>> = jobs
        .par_iter()
        .map(|&(mode, run)| {
            run_single(
                setup,
                problem,
                scenario,
                mode,
                run,
                spec.episodes,
                spec.seed,
                &spec.loop_cfg,
            )
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub const CONTINUED: &str = "continued";
pub const SCRATCH: &str = "scratch";

/// A scenario and the number of consecutive episodes spent on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Span {
    pub scenario: String,
    pub episodes: u64,
}

pub fn default_schedule() -> Vec<Span> {
    bundled::SCENARIOS
        .iter()
        .map(|(name, _)| Span {
            scenario: name.to_string(),
            episodes: DEFAULT_TRANSFER_SPAN,
        })
        .collect()
}

/// Tables carried across a scenario switch through the snapshot format.
fn persist(
    setup: &Setup,
    tables: &ValueTables,
    file: Option<PathBuf>,
) -> Result<ValueTables, HarnessError> {
    let g = &setup.dom.domain;
    let mut buf = Vec::new();
    tables.write_snapshot(g, &mut buf)?;
    if let Some(path) = file {
        fs::write(&path, &buf).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?;
        let data = fs::read(&path).map_err(|source| HarnessError::Io { path, source })?;
        return Ok(ValueTables::read_snapshot(
            g,
            Cursor::new(data),
            tables.alpha,
            tables.beta,
            tables.defaults.clone(),
        )?);
    }
    Ok(ValueTables::read_snapshot(
        g,
        Cursor::new(buf),
        tables.alpha,
        tables.beta,
        tables.defaults.clone(),
    )?)
}

/// One transfer run in one condition. Episode indices run on across spans;
/// the bound and incumbent restart with each scenario.
pub fn transfer_single(
    setup: &Setup,
    schedule: &[(Span, PlanningProblem)],
    condition: &'static str,
    run: usize,
    base_seed: u64,
    loop_cfg: &LoopConfig,
    snapshot_dir: Option<&Path>,
) -> Result<Vec<EpisodeRow>, HarnessError> {
    let mode = Mode::TmpRl;
    let seed = run_seed(base_seed, run);
    let mut cfg = setup.env.clone();
    cfg.rng_seed = seed;
    let first = &schedule
        .first()
        .ok_or_else(|| HarnessError::Spec("empty schedule".into()))?
        .1;
    let mut env = SimEnv::new(&setup.dom, cfg, &first.initial);
    let mut tables = new_tables(mode, &setup.dom, loop_cfg);
    let mut rows = Vec::new();
    let mut episode = 0;
    for (i, (span, problem)) in schedule.iter().enumerate() {
        if i > 0 {
            tables = if condition == CONTINUED {
                let file = snapshot_dir.map(|d| d.join(format!("run{run}_ep{}.csv", episode - 1)));
                persist(setup, &tables, file)?
            } else {
                new_tables(mode, &setup.dom, loop_cfg)
            };
        }
        let mut state = LoopState::default();
        for _ in 0..span.episodes {
            let record = run_episode(
                mode,
                episode,
                problem,
                &setup.dom,
                &mut tables,
                &mut env,
                loop_cfg,
                &mut state,
                seed,
            )
            .map_err(|source| HarnessError::Loop { run, mode, source })?;
            rows.push(EpisodeRow {
                run,
                mode,
                condition: Some(condition),
                scenario: span.scenario.clone(),
                record,
            });
            episode += 1;
        }
    }
    Ok(rows)
}

/// Both conditions over `runs` runs, merged by condition then run.
pub fn transfer(
    setup: &Setup,
    schedule: &[Span],
    runs: usize,
    base_seed: u64,
    loop_cfg: &LoopConfig,
    snapshot_dir: Option<&Path>,
) -> Result<Vec<EpisodeRow>, HarnessError> {
    if runs == 0 || schedule.is_empty() || schedule.iter().any(|s| s.episodes == 0) {
        return Err(HarnessError::Spec(
            "runs and every span must be at least 1".into(),
        ));
    }
    let problems = schedule
        .iter()
        .map(|s| Ok((s.clone(), setup.scenario(&s.scenario)?)))
        .collect::<Result<Vec<_>, SetupError>>()?;
    let jobs: Vec<(&'static str, usize)> = [CONTINUED, SCRATCH]
        .iter()
        .flat_map(|&c| (0..runs).map(move |r| (c, r)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(c, r)| transfer_single(setup, &problems, c, r, base_seed, loop_cfg, snapshot_dir))
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, HarnessError> {
    let f = fs::File::create(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::Writer::from_writer(f))
}

fn fmt_f64(v: f64) -> String {
    v.to_string()
}

pub const EPISODE_COLUMNS: [&str; 7] = [
    "run",
    "episode",
    "mode",
    "plan_id",
    "reward",
    "solver_seconds",
    "inner_iterations",
];

pub fn write_episodes(
    path: &Path,
    rows: &[EpisodeRow],
    wall_clock: bool,
) -> Result<(), HarnessError> {
    let transfer = rows.iter().any(|r| r.condition.is_some());
    let mut w = csv_writer(path)?;
    let mut header: Vec<&str> = Vec::new();
    if transfer {
        header.extend(["condition", "scenario"]);
    }
    header.extend(EPISODE_COLUMNS);
    header.push("incumbent_reused");
    w.write_record(&header)?;
    for row in rows {
        let rec = &row.record;
        let mut fields: Vec<String> = Vec::new();
        if transfer {
            fields.push(row.condition.unwrap_or("").to_string());
            fields.push(row.scenario.clone());
        }
        fields.extend([
            row.run.to_string(),
            rec.episode.to_string(),
            row.mode.to_string(),
            rec.plan.canonical_id(),
            fmt_f64(rec.reward),
            if wall_clock {
                fmt_f64(rec.solver_seconds)
            } else {
                String::new()
            },
            rec.inner_iterations.to_string(),
            rec.incumbent_reused.to_string(),
        ]);
        w.write_record(&fields)?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// Per-episode aggregate over runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub group: String,
    pub episode: u64,
    pub runs: usize,
    pub mean_reward: f64,
    pub std_reward: f64,
    /// Executions per category: plan_1, plan_2, plan_3, other.
    pub counts: [usize; 4],
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn category_index(p: &Plan) -> usize {
    match plan_category(p) {
        "plan_1" => 0,
        "plan_2" => 1,
        "plan_3" => 2,
        _ => 3,
    }
}

/// Groups by mode (or condition) and episode, in sorted order.
pub fn summarize(rows: &[EpisodeRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, u64), Vec<&EpisodeRow>> = BTreeMap::new();
    for r in rows {
        let g = r
            .condition
            .map(str::to_string)
            .unwrap_or_else(|| r.mode.to_string());
        groups.entry((g, r.record.episode)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((group, episode), rs)| {
            let rewards: Vec<f64> = rs.iter().map(|r| r.record.reward).collect();
            let (mean_reward, std_reward) = mean_std(&rewards);
            let mut counts = [0; 4];
            for r in &rs {
                counts[category_index(&r.record.plan)] += 1;
            }
            SummaryRow {
                group,
                episode,
                runs: rs.len(),
                mean_reward,
                std_reward,
                counts,
            }
        })
        .collect()
}

pub fn write_summary(path: &Path, rows: &[EpisodeRow]) -> Result<(), HarnessError> {
    let transfer = rows.iter().any(|r| r.condition.is_some());
    let mut w = csv_writer(path)?;
    w.write_record([
        if transfer { "condition" } else { "mode" },
        "episode",
        "runs",
        "mean_reward",
        "std_reward",
        "plan_1",
        "plan_2",
        "plan_3",
        "other",
    ])?;
    for s in summarize(rows) {
        let mut fields = vec![
            s.group,
            s.episode.to_string(),
            s.runs.to_string(),
            fmt_f64(s.mean_reward),
            fmt_f64(s.std_reward),
        ];
        fields.extend(s.counts.iter().map(|c| c.to_string()));
        w.write_record(&fields)?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

pub fn write_plans(path: &Path, rows: &[EpisodeRow]) -> Result<(), HarnessError> {
    let mut plans: BTreeMap<String, &Plan> = BTreeMap::new();
    for r in rows {
        plans
            .entry(r.record.plan.canonical_id())
            .or_insert(&r.record.plan);
    }
    let mut w = csv_writer(path)?;
    w.write_record(["plan_id", "category", "actions"])?;
    for (id, p) in plans {
        w.write_record([id.as_str(), plan_category(p), &p.action_string()])?;
    }
    w.flush().map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(())
}

/// Writes the three CSVs into `out`; on failure removes whatever it created.
pub fn write_outputs(
    out: &Path,
    rows: &[EpisodeRow],
    wall_clock: bool,
) -> Result<Vec<PathBuf>, HarnessError> {
    let files = [
        out.join("episodes.csv"),
        out.join("summary.csv"),
        out.join("plans.csv"),
    ];
    let result = fs::create_dir_all(out)
        .map_err(|source| HarnessError::Io {
            path: out.to_path_buf(),
            source,
        })
        .and_then(|_| write_episodes(&files[0], rows, wall_clock))
        .and_then(|_| write_summary(&files[1], rows))
        .and_then(|_| write_plans(&files[2], rows));
    if let Err(e) = result {
        for f in &files {
            let _ = fs::remove_file(f);
        }
        return Err(e);
    }
    Ok(files.to_vec())
}

/// The comparison experiment end to end.
pub fn run_comparison(
    setup: &Setup,
    problem: &PlanningProblem,
    scenario: &str,
    spec: &ExperimentSpec,
    out: &Path,
) -> Result<Vec<EpisodeRow>, HarnessError> {
    let rows = compare(setup, problem, scenario, spec)?;
    write_outputs(out, &rows, spec.wall_clock)?;
    Ok(rows)
}

/// The transfer experiment end to end; snapshots go to `out/snapshots`.
pub fn run_transfer(
    setup: &Setup,
    schedule: &[Span],
    runs: usize,
    base_seed: u64,
    loop_cfg: &LoopConfig,
    out: &Path,
    wall_clock: bool,
) -> Result<Vec<EpisodeRow>, HarnessError> {
    let snaps = out.join("snapshots");
    let created = !snaps.exists();
    fs::create_dir_all(&snaps).map_err(|source| HarnessError::Io {
        path: snaps.clone(),
        source,
    })?;
    let result = transfer(setup, schedule, runs, base_seed, loop_cfg, Some(&snaps))
        .and_then(|rows| write_outputs(out, &rows, wall_clock).map(|_| rows));
    if result.is_err() && created {
        let _ = fs::remove_dir_all(&snaps);
    }
    result
}

/// Findings of [`validate_setup`]; `errors` empty means the setup is usable.
#[derive(Debug, Default)]
pub struct ValidationReport {
    pub lines: Vec<String>,
    pub errors: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Parses and grounds everything, lists the competitive plans with their
/// motion lengths and expected times, and runs one noise-free episode per
/// mode. Writes nothing.
pub fn validate_setup(
    paths: &SetupPaths,
    problem_file: Option<&Path>,
    scenario: &str,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (errors, setup) = Setup::load_all(paths);
    report.errors.extend(errors.iter().map(|e| e.to_string()));
    let Some(setup) = setup else {
        return report;
    };
    let g = &setup.dom.domain;
    report.lines.push(format!(
        "domain: {} atoms, {} ground actions; map: {}x{} cells, {} doors",
        g.num_atoms(),
        g.actions().len(),
        setup.dom.motion.grid.width,
        setup.dom.motion.grid.height,
        setup.dom.motion.grid.doors.len()
    ));
    let problem = match problem_file {
        Some(p) => setup.problem_file(p),
        None => setup.scenario(scenario),
    };
    let problem = match problem {
        Ok(p) => p,
        Err(e) => {
            report.errors.push(e.to_string());
            return report;
        }
    };

    for (name, actions) in COMPETITIVE_PLANS {
        match plan_from_labels(g, &problem, actions) {
            Some(p) => {
                let length = motion_length(&setup.dom, &p);
                let expected = expected_plan_duration(&setup.env, g, &setup.dom.motion, &p);
                match (length, expected) {
                    (Ok(l), Ok(e)) => report.lines.push(format!(
                        "{name} {}: motion length {l:.2} m, expected time {e:.2} s",
                        p.canonical_id()
                    )),
                    (Err(e), _) | (_, Err(e)) => {
                        report.lines.push(format!("{name}: not refinable ({e})"))
                    }
                }
            }
            None => report
                .lines
                .push(format!("{name}: not applicable to this problem")),
        }
    }

    let loop_cfg = LoopConfig::default();
    let quiet = EnvConfig {
        rng_seed: setup.env.rng_seed,
        ..setup.env.without_noise()
    };
    let quiet_setup = Setup {
        dom: TaskMotionDomain::new(g.clone(), setup.dom.motion.grid.clone()),
        env: quiet,
    };
    for mode in Mode::ALL {
        match run_single(
            &quiet_setup,
            &problem,
            scenario,
            mode,
            0,
            1,
            setup.env.rng_seed,
            &loop_cfg,
        ) {
            Ok(rows) => {
                let rec = &rows[0].record;
                report.lines.push(format!(
                    "{mode}: plan {} ({}) reward {:.2} after {} planner call(s)",
                    rec.plan.canonical_id(),
                    plan_category(&rec.plan),
                    rec.reward,
                    rec.inner_iterations
                ));
            }
            Err(e) => report.errors.push(e.to_string()),
        }
    }
    report
}

/// The plan executing `labels` (space separated) from the problem's initial state.
pub fn plan_from_labels(
    g: &GroundedDomain,
    problem: &PlanningProblem,
    labels: &str,
) -> Option<Plan> {
    let mut s = problem.initial.clone();
    let mut transitions = Vec::new();
    for label in labels.split_whitespace() {
        let a = g.action_by_label(label)?;
        let next = g.apply(&s, a)?;
        transitions.push(crate::task_planner::Transition {
            from: s,
            action: a,
            to: next.clone(),
        });
        s = next;
    }
    Some(Plan::new(g, transitions))
}

/// Total shortest-path length of the plan's navigation legs.
pub fn motion_length(
    dom: &TaskMotionDomain,
    p: &Plan,
) -> Result<f64, crate::motion_planner::RefineError> {
    let mut total = 0.0;
    for t in &p.transitions {
        if let Some(l) = dom.motion.leg_length(&dom.domain, &t.from, t.action, &t.to) {
            total += l?;
        }
    }
    Ok(total)
}

/// Distinct plan ids among the rows, sorted.
pub fn plan_ids(rows: &[EpisodeRow]) -> BTreeSet<String> {
    rows.iter().map(|r| r.record.plan.canonical_id()).collect()
}
