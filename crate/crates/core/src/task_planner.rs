//! Bounded-horizon forward search for plans that reach a goal with
//! estimated quality strictly above a bound.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::action_lang::{
    check_transition, parse_ground_atoms, AtomId, GroundedDomain, GroundingError, ParseError, State,
};

pub const DEFAULT_MAX_HORIZON: usize = 12;
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(5);

/// Gain estimates as seen by the planner.
pub trait QualityEstimator {
    /// Estimated quality contribution of transition `<from, action, to>`.
    fn lookup(&self, from: &State, action: usize, to: &State) -> f64;

    /// An upper bound on every value `lookup` can return during one search.
    fn step_upper_bound(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: State,
    pub action: usize,
    pub to: State,
}

/// A sequence of chained transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub transitions: Vec<Transition>,
    labels: Vec<String>,
}

impl Plan {
    pub fn new(g: &GroundedDomain, transitions: Vec<Transition>) -> Self {
        let labels = transitions
            .iter()
            .map(|t| g.action(t.action).label())
            .collect();
        Plan {
            transitions,
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn actions(&self) -> impl Iterator<Item = usize> + '_ {
        self.transitions.iter().map(|t| t.action)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Action labels joined with single spaces.
    pub fn action_string(&self) -> String {
        self.labels.join(" ")
    }

    /// 64-bit FNV-1a of the action string, as 16 hex digits. Stable across
    /// platforms and runs.
    pub fn canonical_id(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.action_string().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        f.write_str(&self.labels.join(", "))?;
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanningProblem {
    pub initial: State,
    /// Signed ground atoms that must hold at the end.
    pub goal: Vec<(AtomId, bool)>,
    /// Plans must have estimated quality strictly greater than this; may be `-inf`.
    pub quality_bound: f64,
    pub max_horizon: usize,
    pub time_budget: Duration,
}

impl PlanningProblem {
    pub fn new(initial: State, goal: Vec<(AtomId, bool)>) -> Self {
        PlanningProblem {
            initial,
            goal,
            quality_bound: f64::NEG_INFINITY,
            max_horizon: DEFAULT_MAX_HORIZON,
            time_budget: DEFAULT_TIME_BUDGET,
        }
    }

    /// Parses `init a, b.` and `goal c, -d.` statements. `init` lists the
    /// true atoms; the state is closed under static laws.
    pub fn parse(text: &str, g: &GroundedDomain) -> Result<Self, ProblemError> {
        let stmts = parse_ground_atoms(text, &["init", "goal"])?;
        let mut init = None;
        let mut goal = None;
        for (pos, kw, lits) in stmts {
            let slot = if kw == "init" { &mut init } else { &mut goal };
            if slot.is_some() {
                return Err(ProblemError::Duplicate {
                    line: pos.line,
                    what: kw,
                });
            }
            *slot = Some(lits);
        }
        let init = init.ok_or(ProblemError::Missing("init"))?;
        let goal = goal.ok_or(ProblemError::Missing("goal"))?;
        if let Some(neg) = init.iter().find(|l| !l.positive) {
            return Err(ProblemError::NegativeInit(neg.to_string()));
        }
        let atoms: Vec<_> = init
            .iter()
            .map(|l| crate::action_lang::GroundAtom {
                predicate: l.atom.predicate.clone(),
                args: l.atom.args.iter().map(|t| t.name().to_string()).collect(),
            })
            .collect();
        let initial = g.state_from_atoms(&atoms)?;
        let goal = g.resolve_literals(&goal)?;
        Ok(PlanningProblem::new(initial, goal))
    }

    pub fn goal_holds(&self, s: &State) -> bool {
        self.goal.iter().all(|(id, pos)| s.contains(*id) == *pos)
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Grounding(#[from] GroundingError),
    #[error("missing `{0}` statement")]
    Missing(&'static str),
    #[error("line {line}: second `{what}` statement")]
    Duplicate { line: usize, what: String },
    #[error("initial state lists a negative literal `{0}`; absent atoms are false")]
    NegativeInit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NoPlan {
    #[error("no plan satisfies the goal and quality bound within the horizon")]
    Exhausted,
    #[error("solver time budget expired")]
    Timeout,
}

/// Sum of estimated qualities over the plan's transitions, left to right.
pub fn plan_quality(p: &Plan, q: &dyn QualityEstimator) -> f64 {
    p.transitions
        .iter()
        .fold(0.0, |acc, t| acc + q.lookup(&t.from, t.action, &t.to))
}

/// Validates a plan against the domain without using the search code.
pub fn check_plan(p: &Plan, g: &GroundedDomain, problem: &PlanningProblem) -> bool {
    let mut current = &problem.initial;
    for t in &p.transitions {
        if &t.from != current || !check_transition(&t.from, t.action, &t.to, g) {
            return false;
        }
        current = &t.to;
    }
    problem.goal_holds(current)
}

/// Finds the lexicographically least plan at the shallowest horizon whose
/// estimated quality is strictly above `problem.quality_bound`.
pub fn plan(
    problem: &PlanningProblem,
    g: &GroundedDomain,
    q: &dyn QualityEstimator,
) -> Result<Plan, NoPlan> {
    let order: Vec<usize> = (0..g.actions().len()).collect();
    plan_with_order(problem, g, q, &order)
}

/// As [`plan`], trying actions in the given order instead of the ground-action order.
pub fn plan_with_order(
    problem: &PlanningProblem,
    g: &GroundedDomain,
    q: &dyn QualityEstimator,
    order: &[usize],
) -> Result<Plan, NoPlan> {
    let mut search = Search {
        g,
        q,
        problem,
        order,
        step_ub: q.step_upper_bound(),
        deadline: Instant::now() + problem.time_budget,
        expansions: HashMap::new(),
        failed: HashMap::new(),
        path: Vec::new(),
        ticks: 0,
    };
    for horizon in 0..=problem.max_horizon {
        if search.dfs(&problem.initial, horizon, 0.0)? {
            let mut transitions = Vec::with_capacity(horizon);
            let mut from = problem.initial.clone();
            for &(a, ref to) in &search.path {
                transitions.push(Transition {
                    from,
                    action: a,
                    to: to.clone(),
                });
                from = to.clone();
            }
            return Ok(Plan::new(g, transitions));
        }
    }
    Err(NoPlan::Exhausted)
}

type Expansion = Rc<Vec<(usize, State, f64)>>;

struct Search<'a> {
    g: &'a GroundedDomain,
    q: &'a dyn QualityEstimator,
    problem: &'a PlanningProblem,
    order: &'a [usize],
    step_ub: f64,
    deadline: Instant,
    expansions: HashMap<State, Expansion>,
    /// Best prefix quality with which `(state, steps left)` was fully
    /// explored without finding a plan.
    failed: HashMap<(State, usize), f64>,
    path: Vec<(usize, State)>,
    ticks: u32,
}

impl Search<'_> {
    fn expand(&mut self, s: &State) -> Expansion {
        if let Some(e) = self.expansions.get(s) {
            return e.clone();
        }
        let e: Expansion = Rc::new(
            self.order
                .iter()
                .filter_map(|&a| {
                    let next = self.g.apply(s, a)?;
                    let v = self.q.lookup(s, a, &next);
                    Some((a, next, v))
                })
                .collect(),
        );
        self.expansions.insert(s.clone(), e.clone());
        e
    }

    fn dfs(&mut self, s: &State, left: usize, prefix: f64) -> Result<bool, NoPlan> {
        let bound = self.problem.quality_bound;
        if left == 0 {
            return Ok(self.problem.goal_holds(s) && prefix > bound);
        }
        if prefix + left as f64 * self.step_ub <= bound {
            return Ok(false);
        }
        let memo_key = (s.clone(), left);
        if self
            .failed
            .get(&memo_key)
            .is_some_and(|&best| best >= prefix)
        {
            return Ok(false);
        }
        self.ticks += 1;
        if self.ticks.is_multiple_of(256) && Instant::now() > self.deadline {
            return Err(NoPlan::Timeout);
        }
        let succ = self.expand(s);
        for (a, next, v) in succ.iter() {
            self.path.push((*a, next.clone()));
            if self.dfs(next, left - 1, prefix + v)? {
                return Ok(true);
            }
            self.path.pop();
        }
        let best = self.failed.entry(memo_key).or_insert(prefix);
        *best = best.max(prefix);
        Ok(false)
    }
}
