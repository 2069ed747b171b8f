//! Reference implementations written independently of the library code,
//! plus generators for random instances.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use tmprl_core::action_lang::{GroundedDomain, State};
use tmprl_core::motion_planner::{Cell, OccupancyGrid};
use tmprl_core::task_planner::{PlanningProblem, QualityEstimator};

// ---------------------------------------------------------------- R-learning

/// `(R_new, rho_new)` evaluated term by term in the documented order.
pub fn eq1(
    r_old: f64,
    rho_old: f64,
    m_s: f64,
    m_s2: f64,
    r: f64,
    alpha: f64,
    beta: f64,
) -> (f64, f64) {
    let r_new = (1.0 - alpha) * r_old + alpha * (r - rho_old + m_s2);
    let rho_new = (1.0 - beta) * rho_old + beta * (r + m_s2 - m_s);
    (r_new, rho_new)
}

/// Tables as flat maps keyed by `(state id, action)`.
pub struct RefTables {
    pub num_actions: usize,
    pub alpha: f64,
    pub beta: f64,
    pub r: HashMap<(usize, usize), f64>,
    pub rho: HashMap<(usize, usize), f64>,
}

impl RefTables {
    pub fn new(num_actions: usize, alpha: f64, beta: f64) -> Self {
        RefTables {
            num_actions,
            alpha,
            beta,
            r: HashMap::new(),
            rho: HashMap::new(),
        }
    }

    /// Max over every action, absent entries counting as zero.
    pub fn m(&self, s: usize) -> f64 {
        (0..self.num_actions)
            .map(|a| self.r.get(&(s, a)).copied().unwrap_or(0.0))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn update(&mut self, s: usize, a: usize, r: f64, s2: usize, rho_default: f64) {
        let r_old = self.r.get(&(s, a)).copied().unwrap_or(0.0);
        let rho_old = self.rho.get(&(s, a)).copied().unwrap_or(rho_default);
        let (rn, pn) = eq1(
            r_old,
            rho_old,
            self.m(s),
            self.m(s2),
            r,
            self.alpha,
            self.beta,
        );
        self.r.insert((s, a), rn);
        self.rho.insert((s, a), pn);
    }
}

// -------------------------------------------------------------------- motion

/// Random grid with the given obstacle density.
pub fn random_grid(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> OccupancyGrid {
    let mut g = OccupancyGrid::open(w, h, 1.0);
    for y in 0..h {
        for x in 0..w {
            if rng.random::<f64>() < density {
                g.set(x, y, Cell::Obstacle);
            }
        }
    }
    g
}

/// Shortest 8-connected path length by repeated relaxation over all cells
/// until nothing changes. Costs are kept as (straight, diagonal) counts.
pub fn relaxation_length(
    g: &OccupancyGrid,
    from: (usize, usize),
    to: (usize, usize),
) -> Option<f64> {
    let free = |x: i64, y: i64| {
        x >= 0
            && y >= 0
            && (x as usize) < g.width
            && (y as usize) < g.height
            && g.cell(x as usize, y as usize) == Cell::Free
    };
    if !free(from.0 as i64, from.1 as i64) || !free(to.0 as i64, to.1 as i64) {
        return None;
    }
    let val = |c: (u32, u32)| c.0 as f64 + c.1 as f64 * std::f64::consts::SQRT_2;
    let mut best: HashMap<(i64, i64), (u32, u32)> = HashMap::new();
    best.insert((from.0 as i64, from.1 as i64), (0, 0));
    loop {
        let mut changed = false;
        let snapshot: Vec<_> = best.iter().map(|(k, v)| (*k, *v)).collect();
        for ((x, y), c) in snapshot {
            for dx in -1i64..=1 {
                for dy in -1i64..=1 {
                    if (dx, dy) == (0, 0) || !free(x + dx, y + dy) {
                        continue;
                    }
                    let diag = dx != 0 && dy != 0;
                    if diag && !free(x + dx, y) && !free(x, y + dy) {
                        continue;
                    }
                    let nc = if diag { (c.0, c.1 + 1) } else { (c.0 + 1, c.1) };
                    let k = (x + dx, y + dy);
                    if best.get(&k).is_none_or(|&old| val(nc) < val(old)) {
                        best.insert(k, nc);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    best.get(&(to.0 as i64, to.1 as i64))
        .map(|&c| val(c) * g.resolution)
}

// ------------------------------------------------------------------- planner

/// A domain over 0-ary inertial fluents `p0..` and actions `a0..` with random
/// conditional effects and nonexecutable laws, plus a random problem.
pub fn random_domain(rng: &mut impl Rng) -> (String, String) {
    let nf = rng.random_range(2..=6);
    let na = rng.random_range(2..=5);
    let lit = |rng: &mut dyn rand::RngCore| {
        let i = rng.random_range(0..nf);
        if rng.random_bool(0.7) {
            format!("p{i}")
        } else {
            format!("-p{i}")
        }
    };
    let mut d = String::new();
    for i in 0..nf {
        d += &format!("fluent p{i}.\ninertial p{i}.\n");
    }
    for a in 0..na {
        d += &format!("action a{a}.\n");
    }
    for a in 0..na {
        for _ in 0..rng.random_range(1..=2) {
            let e = lit(rng);
            if rng.random_bool(0.4) {
                let c = lit(rng);
                d += &format!("a{a} causes {e} if {c}.\n");
            } else {
                d += &format!("a{a} causes {e}.\n");
            }
        }
        if rng.random_bool(0.6) {
            let body: Vec<String> = (0..rng.random_range(1..=2)).map(|_| lit(rng)).collect();
            d += &format!("nonexecutable a{a} if {}.\n", body.join(", "));
        }
    }
    let init: Vec<String> = (0..nf)
        .filter(|_| rng.random_bool(0.4))
        .map(|i| format!("p{i}"))
        .collect();
    let goal: Vec<String> = (0..rng.random_range(1..=2)).map(|_| lit(rng)).collect();
    let p = format!("init {}.\ngoal {}.\n", init.join(", "), goal.join(", "));
    (d, p)
}

/// Every action sequence in order of length, then lexicographically by
/// action index; the first whose end state meets the goal with quality
/// above the bound.
pub fn brute_force_plan(
    g: &GroundedDomain,
    problem: &PlanningProblem,
    q: &dyn QualityEstimator,
    horizon: usize,
) -> Option<Vec<usize>> {
    let n = g.actions().len();
    for len in 0..=horizon {
        let total = n.checked_pow(len as u32)?;
        'seq: for code in 0..total {
            let mut seq = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                seq.push(c % n);
                c /= n;
            }
            seq.reverse();
            let mut s = problem.initial.clone();
            let mut quality = 0.0;
            for &a in &seq {
                let Some(next) = g.apply(&s, a) else {
                    continue 'seq;
                };
                quality += q.lookup(&s, a, &next);
                s = next;
            }
            if problem.goal_holds(&s) && quality > problem.quality_bound {
                return Some(seq);
            }
        }
    }
    None
}

/// The highest quality of any plan of at most `horizon` steps, by dynamic
/// programming over (state, steps left).
pub fn best_plan_quality(
    g: &GroundedDomain,
    problem: &PlanningProblem,
    q: &dyn QualityEstimator,
    horizon: usize,
) -> Option<f64> {
    fn go(
        g: &GroundedDomain,
        problem: &PlanningProblem,
        q: &dyn QualityEstimator,
        s: &State,
        left: usize,
        memo: &mut HashMap<(State, usize), Option<f64>>,
    ) -> Option<f64> {
        if let Some(v) = memo.get(&(s.clone(), left)) {
            return *v;
        }
        let mut best = if problem.goal_holds(s) {
            Some(0.0)
        } else {
            None
        };
        if left > 0 {
            for a in 0..g.actions().len() {
                if let Some(next) = g.apply(s, a) {
                    if let Some(rest) = go(g, problem, q, &next, left - 1, memo) {
                        let v = q.lookup(s, a, &next) + rest;
                        best = Some(best.map_or(v, |b: f64| b.max(v)));
                    }
                }
            }
        }
        memo.insert((s.clone(), left), best);
        best
    }
    go(
        g,
        problem,
        q,
        &problem.initial,
        horizon,
        &mut HashMap::new(),
    )
}

/// A quality that depends on the state and action through a fixed table.
pub struct TableQuality {
    pub by_action: Vec<f64>,
    pub state_penalty: f64,
}

impl QualityEstimator for TableQuality {
    fn lookup(&self, from: &State, action: usize, _to: &State) -> f64 {
        self.by_action[action] - self.state_penalty * (from.len() % 2) as f64
    }

    fn step_upper_bound(&self) -> f64 {
        self.by_action
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

// --------------------------------------------------------------- semantics

/// Successor by the textbook definition: inertial atoms persist unless an
/// effect whose condition holds in `s` removes them; firing effects add;
/// a conflict or an unmet precondition or blocker means not executable.
pub fn successor_by_definition(g: &GroundedDomain, s: &State, a: usize) -> Option<BTreeSet<u32>> {
    let act = g.action(a);
    let now: BTreeSet<u32> = s.iter().collect();
    let holds = |lits: &[(u32, bool)]| lits.iter().all(|(id, pos)| now.contains(id) == *pos);
    if !holds(&act.precondition()) {
        return None;
    }
    if act.nonexecutable_conditions().iter().any(|c| holds(c)) {
        return None;
    }
    let mut adds = BTreeSet::new();
    let mut dels = BTreeSet::new();
    for (cond, atom, positive) in act.conditional_effects() {
        if holds(&cond) {
            if positive {
                adds.insert(atom);
            } else {
                dels.insert(atom);
            }
        }
    }
    if !adds.is_disjoint(&dels) {
        return None;
    }
    let mut next: BTreeSet<u32> = now
        .iter()
        .copied()
        .filter(|id| g.is_inertial(*id) && !dels.contains(id))
        .collect();
    next.extend(adds);
    Some(next)
}
