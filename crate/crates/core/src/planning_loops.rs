//! The inner task-motion loop, the outer learning loop, and the two
//! baselines that drop one of them.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::action_lang::{GroundedDomain, State};
use crate::motion_planner::{
    euclidean, MotionPlanner, OccupancyGrid, Pose, RefineError, NAVIGATION_ACTION,
};
use crate::rl_core::{
    reward_from_execution, Abstraction, DefaultPolicy, ValueTables, DEFAULT_ALPHA, DEFAULT_BETA,
};
use crate::sim_env::{
    env_execute, env_reset, step_rng, EnvConfig, EnvError, StepOutcome, WorldState,
};
use crate::task_planner::{
    check_plan, plan_quality, plan_with_order, NoPlan, Plan, PlanningProblem, QualityEstimator,
    DEFAULT_MAX_HORIZON, DEFAULT_TIME_BUDGET,
};

/// Environment variable overriding the per-call solver budget, in seconds.
pub const SOLVER_TIMEOUT_VAR: &str = "TMPRL_SOLVER_TIMEOUT_SECS";
pub const DEFAULT_MAX_INNER_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Inner loop only, fresh tables every episode.
    Tmp,
    /// Outer loop only, planning without motion costs.
    TpRl,
    /// Both loops.
    TmpRl,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::TmpRl, Mode::TpRl, Mode::Tmp];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Tmp => "tmp",
            Mode::TpRl => "tp-rl",
            Mode::TmpRl => "tmp-rl",
        }
    }

    pub fn learns(self) -> bool {
        self != Mode::Tmp
    }

    pub fn default_policy(self) -> DefaultPolicy {
        match self {
            Mode::TpRl => DefaultPolicy::without_motion(),
            _ => DefaultPolicy::default(),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "tmp" => Ok(Mode::Tmp),
            "tp-rl" => Ok(Mode::TpRl),
            "tmp-rl" => Ok(Mode::TmpRl),
            _ => Err(format!("unknown mode `{s}`; expected tmp, tp-rl or tmp-rl")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig {
    pub max_inner_iterations: usize,
    pub max_horizon: usize,
    /// Budget for each task-planner call.
    pub time_budget: Duration,
    /// Probability of an exploratory episode: random action order, no bound.
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig {
            max_inner_iterations: DEFAULT_MAX_INNER_ITERATIONS,
            max_horizon: DEFAULT_MAX_HORIZON,
            time_budget: solver_time_budget(),
            epsilon: 0.0,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }
}

/// The solver budget from [`SOLVER_TIMEOUT_VAR`], else the default.
pub fn solver_time_budget() -> Duration {
    std::env::var(SOLVER_TIMEOUT_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
        .map(Duration::from_secs_f64)
        .unwrap_or(DEFAULT_TIME_BUDGET)
}

/// A grounded domain together with its map.
#[derive(Debug)]
pub struct TaskMotionDomain {
    pub domain: GroundedDomain,
    pub motion: MotionPlanner,
    pub abstraction: Abstraction,
    /// Smallest straight-line distance between two distinct named poses.
    min_leg: f64,
}

impl TaskMotionDomain {
    pub fn new(domain: GroundedDomain, grid: OccupancyGrid) -> Self {
        let mut poses: Vec<Pose> = grid.landmarks.values().copied().collect();
        poses.extend(grid.doors.values().flat_map(|d| d.poses));
        let mut min_leg = f64::INFINITY;
        for (i, a) in poses.iter().enumerate() {
            for b in &poses[i + 1..] {
                min_leg = min_leg.min(euclidean(*a, *b));
            }
        }
        let abstraction = Abstraction::new(&domain);
        let motion = MotionPlanner::new(grid, &domain);
        TaskMotionDomain {
            domain,
            motion,
            abstraction,
            min_leg: if min_leg.is_finite() { min_leg } else { 0.0 },
        }
    }

    fn straight_line(&self, s: &State, s2: &State) -> Option<f64> {
        let a = self.motion.map_state(s, &self.domain).ok()?;
        let b = self.motion.map_state(s2, &self.domain).ok()?;
        Some(euclidean(a, b))
    }

    /// The gain used for `<s, a, s2>` when the tables hold nothing for it.
    pub fn rho_default(&self, defaults: &DefaultPolicy, s: &State, a: usize, s2: &State) -> f64 {
        let name = self.domain.action(a).name.as_str();
        let dist = if defaults.euclidean_approach && name == NAVIGATION_ACTION {
            self.straight_line(s, s2)
        } else {
            None
        };
        defaults.rho_default(name, dist)
    }

    /// Motion reward for a navigation transition, `None` for other actions.
    /// States without a pose count as infeasible motions.
    pub fn motion_reward(&self, s: &State, a: usize, s2: &State, sentinel: f64) -> Option<f64> {
        self.motion
            .leg_length(&self.domain, s, a, s2)
            .map(|r| match r {
                Ok(len) => 0.0 - len,
                Err(RefineError::Infeasible(_) | RefineError::Unmapped(_)) => sentinel,
            })
    }

    /// One R-learning step on the transition, keyed by abstract states.
    pub fn learn(&self, tables: &mut ValueTables, s: &State, a: usize, r: f64, s2: &State) {
        let default = self.rho_default(&tables.defaults, s, a, s2);
        let (k, k2) = (self.abstraction.key(s), self.abstraction.key(s2));
        tables.update(&k, a, r, &k2, default);
    }
}

/// The planner's view of the learned gains: stored values, else defaults.
pub struct QualityModel<'a> {
    dom: &'a TaskMotionDomain,
    tables: &'a ValueTables,
}

impl<'a> QualityModel<'a> {
    pub fn new(dom: &'a TaskMotionDomain, tables: &'a ValueTables) -> Self {
        QualityModel { dom, tables }
    }
}

impl QualityEstimator for QualityModel<'_> {
    fn lookup(&self, from: &State, action: usize, to: &State) -> f64 {
        let key = self.dom.abstraction.key(from);
        match self.tables.rho_stored(&key, action) {
            Some(v) => v,
            None => self
                .dom
                .rho_default(&self.tables.defaults, from, action, to),
        }
    }

    fn step_upper_bound(&self) -> f64 {
        let d = &self.tables.defaults;
        let mut ub = d.fallback.max(d.open_door);
        if d.euclidean_approach {
            ub = ub.max(-self.dom.min_leg);
        }
        if let Some(m) = self.tables.max_stored_rho() {
            ub = ub.max(m);
        }
        ub
    }
}

/// One plan accepted by the inner loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Acceptance {
    pub plan_id: String,
    /// The bound the plan had to beat.
    pub bound: f64,
    /// Estimated quality when the planner returned it.
    pub quality: f64,
    /// Estimated quality after the motion updates; the next bound.
    pub updated_quality: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerStop {
    /// The planner found nothing above the bound.
    NoBetterPlan,
    /// The planner ran out of time.
    Timeout,
    /// The iteration cap was reached.
    Capped,
}

#[derive(Debug, Clone)]
pub struct InnerTrace {
    /// The last accepted plan; `None` if the first planner call failed.
    pub plan: Option<Plan>,
    /// Number of task-planner calls.
    pub iterations: usize,
    pub accepted: Vec<Acceptance>,
    pub stop: InnerStop,
    pub solver_time: Duration,
}

/// Alternates task planning and motion evaluation: each accepted plan's
/// navigation legs are costed by the motion planner and learned, and the
/// next plan must beat the updated quality of the previous one.
pub fn inner_tmp(
    problem: &PlanningProblem,
    dom: &TaskMotionDomain,
    tables: &mut ValueTables,
    cfg: &LoopConfig,
    order: &[usize],
) -> InnerTrace {
    let start = Instant::now();
    let mut p = problem.clone();
    p.max_horizon = cfg.max_horizon;
    p.time_budget = cfg.time_budget;
    let mut current: Option<Plan> = None;
    let mut accepted = Vec::new();
    let mut iterations = 0;
    let sentinel = tables.defaults.infeasible_sentinel;
    let stop = loop {
        if iterations == cfg.max_inner_iterations {
            break InnerStop::Capped;
        }
        iterations += 1;
        let found = plan_with_order(&p, &dom.domain, &QualityModel::new(dom, tables), order);
        let candidate = match found {
            Ok(c) => c,
            Err(NoPlan::Exhausted) => break InnerStop::NoBetterPlan,
            Err(NoPlan::Timeout) => break InnerStop::Timeout,
        };
        let quality = plan_quality(&candidate, &QualityModel::new(dom, tables));
        for t in &candidate.transitions {
            if let Some(r) = dom.motion_reward(&t.from, t.action, &t.to, sentinel) {
                dom.learn(tables, &t.from, t.action, r, &t.to);
            }
        }
        let updated = plan_quality(&candidate, &QualityModel::new(dom, tables));
        accepted.push(Acceptance {
            plan_id: candidate.canonical_id(),
            bound: p.quality_bound,
            quality,
            updated_quality: updated,
        });
        p.quality_bound = updated;
        current = Some(candidate);
    };
    InnerTrace {
        plan: current,
        iterations,
        accepted,
        stop,
        solver_time: start.elapsed(),
    }
}

/// Something that executes ground actions and reports their rewards.
pub trait Environment {
    fn reset(&mut self, initial: &State, episode: u64);
    fn execute(&mut self, a: usize) -> Result<StepOutcome, EnvError>;
    fn state(&self) -> &State;
}

/// The simulated office.
pub struct SimEnv<'a> {
    dom: &'a TaskMotionDomain,
    pub cfg: EnvConfig,
    world: WorldState,
}

impl<'a> SimEnv<'a> {
    pub fn new(dom: &'a TaskMotionDomain, cfg: EnvConfig, initial: &State) -> Self {
        let world = env_reset(initial, 0, &dom.domain, &dom.motion);
        SimEnv { dom, cfg, world }
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }
}

impl Environment for SimEnv<'_> {
    fn reset(&mut self, initial: &State, episode: u64) {
        self.world = env_reset(initial, episode, &self.dom.domain, &self.dom.motion);
    }

    fn execute(&mut self, a: usize) -> Result<StepOutcome, EnvError> {
        env_execute(
            &mut self.world,
            a,
            &self.cfg,
            &self.dom.domain,
            &self.dom.motion,
        )
    }

    fn state(&self) -> &State {
        &self.world.state
    }
}

#[derive(Debug, Clone)]
pub struct EpisodeRecord {
    pub episode: u64,
    pub plan: Plan,
    /// Sum of `action_rewards`.
    pub reward: f64,
    pub action_rewards: Vec<f64>,
    pub solver_seconds: f64,
    /// Task-planner calls made while choosing the plan.
    pub inner_iterations: usize,
    /// The previous episode's plan was executed because nothing better was found.
    pub incumbent_reused: bool,
    /// The episode ignored the bound and used a random action order.
    pub exploratory: bool,
    pub accepted: Vec<Acceptance>,
    /// Estimated plan quality after the episode's updates.
    pub quality_after: f64,
}

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("episode {episode}: no plan reaches the goal ({reason})")]
    NoPlanEver { episode: u64, reason: String },
    #[error("episode {episode}: planner returned a plan that fails validation")]
    InvalidPlan { episode: u64 },
    #[error("episode {episode}: {source}")]
    Execution {
        episode: u64,
        #[source]
        source: EnvError,
    },
}

/// Bound and incumbent carried from one episode to the next.
#[derive(Debug, Clone)]
pub struct LoopState {
    pub bound: f64,
    pub incumbent: Option<Plan>,
}

impl Default for LoopState {
    fn default() -> Self {
        LoopState {
            bound: f64::NEG_INFINITY,
            incumbent: None,
        }
    }
}

/// Fresh tables for `mode` over `dom`.
pub fn new_tables(mode: Mode, dom: &TaskMotionDomain, cfg: &LoopConfig) -> ValueTables {
    ValueTables::new(
        dom.domain.actions().len(),
        cfg.alpha,
        cfg.beta,
        mode.default_policy(),
    )
}

/// Runs one episode of `mode`: choose a plan, execute it, learn from the
/// rewards. `seed` drives the exploration draw only.
#[allow(clippy::too_many_arguments)]
pub fn run_episode(
    mode: Mode,
    episode: u64,
    problem: &PlanningProblem,
    dom: &TaskMotionDomain,
    tables: &mut ValueTables,
    env: &mut dyn Environment,
    cfg: &LoopConfig,
    state: &mut LoopState,
    seed: u64,
) -> Result<EpisodeRecord, LoopError> {
    let g = &dom.domain;
    let mut order: Vec<usize> = (0..g.actions().len()).collect();
    let mut rng = step_rng(seed, episode, u64::MAX);
    let exploratory = mode.learns() && cfg.epsilon > 0.0 && rng.random::<f64>() < cfg.epsilon;
    let mut p = problem.clone();
    p.quality_bound = if exploratory || !mode.learns() {
        f64::NEG_INFINITY
    } else {
        state.bound
    };
    if exploratory {
        order.shuffle(&mut rng);
    }

    let (chosen, iterations, accepted, solver_time, reason) = match mode {
        Mode::Tmp => {
            let mut fresh = new_tables(mode, dom, cfg);
            let t = inner_tmp(&p, dom, &mut fresh, cfg, &order);
            (t.plan, t.iterations, t.accepted, t.solver_time, t.stop)
        }
        Mode::TmpRl => {
            let t = inner_tmp(&p, dom, tables, cfg, &order);
            (t.plan, t.iterations, t.accepted, t.solver_time, t.stop)
        }
        Mode::TpRl => {
            p.max_horizon = cfg.max_horizon;
            p.time_budget = cfg.time_budget;
            let start = Instant::now();
            let model = QualityModel::new(dom, tables);
            match plan_with_order(&p, g, &model, &order) {
                Ok(plan) => {
                    let quality = plan_quality(&plan, &model);
                    let acc = Acceptance {
                        plan_id: plan.canonical_id(),
                        bound: p.quality_bound,
                        quality,
                        updated_quality: quality,
                    };
                    (
                        Some(plan),
                        1,
                        vec![acc],
                        start.elapsed(),
                        InnerStop::NoBetterPlan,
                    )
                }
                Err(e) => (
                    None,
                    1,
                    Vec::new(),
                    start.elapsed(),
                    if e == NoPlan::Timeout {
                        InnerStop::Timeout
                    } else {
                        InnerStop::NoBetterPlan
                    },
                ),
            }
        }
    };

    let (plan, incumbent_reused) = match (chosen, &state.incumbent) {
        (Some(p), _) => (p, false),
        (None, Some(inc)) => (inc.clone(), true),
        (None, None) => {
            return Err(LoopError::NoPlanEver {
                episode,
                reason: match reason {
                    InnerStop::Timeout => "solver timeout".into(),
                    _ => "search exhausted".into(),
                },
            })
        }
    };
    if !check_plan(&plan, g, problem) {
        return Err(LoopError::InvalidPlan { episode });
    }

    env.reset(&problem.initial, episode);
    let mut action_rewards = Vec::with_capacity(plan.len());
    for t in &plan.transitions {
        let before = env.state().clone();
        let out = env
            .execute(t.action)
            .map_err(|source| LoopError::Execution { episode, source })?;
        action_rewards.push(out.reward);
        if mode.learns() {
            let after = env.state().clone();
            dom.learn(
                tables,
                &before,
                t.action,
                reward_from_execution(out.duration),
                &after,
            );
        }
    }

    let quality_after = plan_quality(&plan, &QualityModel::new(dom, tables));
    if mode.learns() {
        state.bound = quality_after;
        state.incumbent = Some(plan.clone());
    }
    Ok(EpisodeRecord {
        episode,
        plan,
        reward: action_rewards.iter().sum(),
        action_rewards,
        solver_seconds: solver_time.as_secs_f64(),
        inner_iterations: iterations,
        incumbent_reused,
        exploratory,
        accepted,
        quality_after,
    })
}

/// `episodes` consecutive episodes from a fresh loop state.
#[allow(clippy::too_many_arguments)]
pub fn run_episodes(
    mode: Mode,
    first_episode: u64,
    episodes: u64,
    problem: &PlanningProblem,
    dom: &TaskMotionDomain,
    tables: &mut ValueTables,
    env: &mut dyn Environment,
    cfg: &LoopConfig,
    seed: u64,
) -> Result<Vec<EpisodeRecord>, LoopError> {
    let mut state = LoopState::default();
    (first_episode..first_episode + episodes)
        .map(|e| run_episode(mode, e, problem, dom, tables, env, cfg, &mut state, seed))
        .collect()
}
