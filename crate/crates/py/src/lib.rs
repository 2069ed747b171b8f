//! Python bindings for loading an office setup, inspecting its plans and
//! running the comparison experiment.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tmprl_core::harness::{
    bundled, compare, motion_length, plan_category, plan_from_labels, ExperimentSpec, Setup,
    SetupPaths, COMPETITIVE_PLANS,
};
use tmprl_core::motion_planner::{shortest_path, Pose};
use tmprl_core::planning_loops::{inner_tmp, new_tables, LoopConfig, Mode};
use tmprl_core::sim_env::expected_plan_duration;
use tmprl_core::task_planner::PlanningProblem;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_modes(s: &str) -> PyResult<Vec<Mode>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Mode::ALL.to_vec());
    }
    s.split(',')
        .map(|m| m.trim().parse::<Mode>().map_err(value_err))
        .collect()
}

/// A domain, map and simulator configuration; arguments left out use the
/// bundled office.
#[pyclass(name = "Setup", frozen)]
struct PySetup {
    inner: Setup,
}

impl PySetup {
    fn problem(&self, scenario: &str) -> PyResult<PlanningProblem> {
        self.inner.scenario(scenario).map_err(value_err)
    }
}

#[pymethods]
impl PySetup {
    #[new]
    #[pyo3(signature = (domain=None, map=None, env=None))]
    fn new(domain: Option<PathBuf>, map: Option<PathBuf>, env: Option<PathBuf>) -> PyResult<Self> {
        let inner = Setup::load(&SetupPaths { domain, map, env }).map_err(value_err)?;
        Ok(PySetup { inner })
    }

    #[staticmethod]
    fn scenarios() -> Vec<&'static str> {
        bundled::SCENARIOS.iter().map(|(n, _)| *n).collect()
    }

    #[getter]
    fn num_atoms(&self) -> usize {
        self.inner.dom.domain.num_atoms()
    }

    #[getter]
    fn num_actions(&self) -> usize {
        self.inner.dom.domain.actions().len()
    }

    fn action_labels(&self) -> Vec<String> {
        self.inner
            .dom
            .domain
            .actions()
            .iter()
            .map(|a| a.label())
            .collect()
    }

    /// Length of the shortest grid path between two points, `None` if blocked.
    fn path_length(&self, start: (f64, f64), goal: (f64, f64)) -> Option<f64> {
        shortest_path(
            &self.inner.dom.motion.grid,
            Pose::new(start.0, start.1),
            Pose::new(goal.0, goal.1),
        )
        .ok()
        .map(|t| t.length)
    }

    /// `(name, plan_id, motion_length, expected_time)` for each competitive plan.
    #[pyo3(signature = (scenario="start_1"))]
    fn competitive_plans(&self, scenario: &str) -> PyResult<Vec<(String, String, f64, f64)>> {
        let p = self.problem(scenario)?;
        let (dom, env) = (&self.inner.dom, &self.inner.env);
        COMPETITIVE_PLANS
            .iter()
            .filter_map(|(name, labels)| {
                plan_from_labels(&dom.domain, &p, labels).map(|plan| (name, plan))
            })
            .map(|(name, plan)| {
                let len = motion_length(dom, &plan).map_err(value_err)?;
                let time = expected_plan_duration(env, &dom.domain, &dom.motion, &plan)
                    .map_err(value_err)?;
                Ok((name.to_string(), plan.canonical_id(), len, time))
            })
            .collect()
    }

    /// The plan the inner task-motion loop settles on from fresh tables,
    /// with the number of planner calls it took.
    #[pyo3(signature = (scenario="start_1"))]
    fn inner_plan(&self, scenario: &str) -> PyResult<(Vec<String>, usize)> {
        let p = self.problem(scenario)?;
        let dom = &self.inner.dom;
        let cfg = LoopConfig::default();
        let mut tables = new_tables(Mode::TmpRl, dom, &cfg);
        let order: Vec<usize> = (0..dom.domain.actions().len()).collect();
        let t = inner_tmp(&p, dom, &mut tables, &cfg, &order);
        let plan = t
            .plan
            .ok_or_else(|| value_err("no plan reaches the goal"))?;
        Ok((plan.labels().to_vec(), t.iterations))
    }

    /// Runs the comparison and returns one dict per episode.
    #[pyo3(signature = (scenario="start_1", modes="all", runs=5, episodes=40, seed=0))]
    fn run<'py>(
        &self,
        py: Python<'py>,
        scenario: &str,
        modes: &str,
        runs: usize,
        episodes: u64,
        seed: u64,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let p = self.problem(scenario)?;
        let spec = ExperimentSpec {
            modes: parse_modes(modes)?,
            runs,
            episodes,
            seed,
            ..ExperimentSpec::default()
        };
        let rows = compare(&self.inner, &p, scenario, &spec).map_err(value_err)?;
        rows.iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("run", r.run)?;
                d.set_item("mode", r.mode.as_str())?;
                d.set_item("episode", r.record.episode)?;
                d.set_item("plan_id", r.record.plan.canonical_id())?;
                d.set_item("category", plan_category(&r.record.plan))?;
                d.set_item("reward", r.record.reward)?;
                d.set_item("action_rewards", r.record.action_rewards.clone())?;
                d.set_item("inner_iterations", r.record.inner_iterations)?;
                Ok(d)
            })
            .collect()
    }
}

#[pymodule]
fn tmprl(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySetup>()?;
    m.add(
        "MODES",
        Mode::ALL.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
    )?;
    Ok(())
}
