//! Tabular R-learning over abstracted symbolic states, with the default
//! gain values used for optimistic initialization.

use std::collections::{BTreeMap, HashMap};
use std::io;

use thiserror::Error;

use crate::action_lang::{AtomId, GroundAtom, GroundedDomain, State};
use crate::motion_planner::Infeasible;

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_BETA: f64 = 0.5;
/// Finite stand-in for the reward of an infeasible motion.
pub const INFEASIBLE_SENTINEL: f64 = -1e6;

/// Predicates kept by the state abstraction.
pub const ABSTRACT_PREDICATES: [&str; 2] = ["in", "near"];

/// The abstraction of a state: its true `near` and `in` atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RlStateKey(State);

impl RlStateKey {
    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.0.iter()
    }

    /// `in(r_open);near(lm_start1)`, atoms in canonical order.
    pub fn serialize(&self, g: &GroundedDomain) -> String {
        let parts: Vec<String> = self.0.iter().map(|id| g.atom(id).to_string()).collect();
        parts.join(";")
    }

    pub fn deserialize(text: &str, g: &GroundedDomain) -> Result<Self, SnapshotError> {
        let mut s = g.empty_state();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let atom =
                parse_ground_atom(part).ok_or_else(|| SnapshotError::BadKey(text.to_string()))?;
            let id = g
                .atom_id(&atom)
                .ok_or_else(|| SnapshotError::BadKey(text.to_string()))?;
            s.insert(id);
        }
        Ok(RlStateKey(s))
    }
}

fn parse_ground_atom(text: &str) -> Option<GroundAtom> {
    let (pred, rest) = match text.find('(') {
        Some(i) => (&text[..i], text[i + 1..].strip_suffix(')')?),
        None => (text, ""),
    };
    let args: Vec<&str> = rest
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .collect();
    Some(GroundAtom::new(pred.trim(), &args))
}

/// Projects states onto the atoms of [`ABSTRACT_PREDICATES`].
#[derive(Debug, Clone)]
pub struct Abstraction {
    mask: State,
}

impl Abstraction {
    pub fn new(g: &GroundedDomain) -> Self {
        let mut mask = g.empty_state();
        for (i, a) in g.atoms().iter().enumerate() {
            if ABSTRACT_PREDICATES.contains(&a.predicate.as_str()) {
                mask.insert(i as AtomId);
            }
        }
        Abstraction { mask }
    }

    pub fn key(&self, s: &State) -> RlStateKey {
        let mut k = s.clone();
        for id in s.iter() {
            if !self.mask.contains(id) {
                k.remove(id);
            }
        }
        RlStateKey(k)
    }
}

/// Default gain values for state-action pairs never updated.
#[derive(Debug, Clone, PartialEq)]
pub struct DefaultPolicy {
    /// Approach actions default to minus the straight-line distance of the
    /// leg; when false they fall back like any other action.
    pub euclidean_approach: bool,
    pub open_door: f64,
    pub fallback: f64,
    pub infeasible_sentinel: f64,
    /// Default relative value `R(s, a)` for absent entries.
    pub r_default: f64,
}

impl Default for DefaultPolicy {
    fn default() -> Self {
        DefaultPolicy {
            euclidean_approach: true,
            open_door: -3.0,
            fallback: -1.0,
            infeasible_sentinel: INFEASIBLE_SENTINEL,
            r_default: 0.0,
        }
    }
}

impl DefaultPolicy {
    /// Defaults for the task-planning-only learner: no metric information.
    pub fn without_motion() -> Self {
        DefaultPolicy {
            euclidean_approach: false,
            ..Self::default()
        }
    }

    /// `approach_distance` is the straight-line length of the leg, when known.
    pub fn rho_default(&self, action_name: &str, approach_distance: Option<f64>) -> f64 {
        match action_name {
            "approach" if self.euclidean_approach => match approach_distance {
                Some(d) => -d,
                None => self.fallback,
            },
            "open_door" => self.open_door,
            _ => self.fallback,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Row {
    r: BTreeMap<usize, f64>,
    rho: BTreeMap<usize, f64>,
}

/// `R(s, a)` and `rho(s, a)` tables keyed by abstract state and ground-action index.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTables {
    pub alpha: f64,
    pub beta: f64,
    pub defaults: DefaultPolicy,
    num_actions: usize,
    rows: HashMap<RlStateKey, Row>,
}

impl ValueTables {
    pub fn new(num_actions: usize, alpha: f64, beta: f64, defaults: DefaultPolicy) -> Self {
        ValueTables {
            alpha,
            beta,
            defaults,
            num_actions,
            rows: HashMap::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn r_stored(&self, s: &RlStateKey, a: usize) -> Option<f64> {
        self.rows.get(s).and_then(|row| row.r.get(&a)).copied()
    }

    pub fn rho_stored(&self, s: &RlStateKey, a: usize) -> Option<f64> {
        self.rows.get(s).and_then(|row| row.rho.get(&a)).copied()
    }

    pub fn r_lookup(&self, s: &RlStateKey, a: usize) -> f64 {
        self.r_stored(s, a).unwrap_or(self.defaults.r_default)
    }

    /// Stored gain, else the default for this action.
    pub fn rho_lookup(
        &self,
        s: &RlStateKey,
        a: usize,
        action_name: &str,
        approach_distance: Option<f64>,
    ) -> f64 {
        self.rho_stored(s, a)
            .unwrap_or_else(|| self.defaults.rho_default(action_name, approach_distance))
    }

    /// `max_a R(s, a)` over every ground action, absent entries at their default.
    pub fn max_r(&self, s: &RlStateKey) -> f64 {
        let Some(row) = self.rows.get(s) else {
            return self.defaults.r_default;
        };
        let stored = row.r.values().copied().fold(f64::NEG_INFINITY, f64::max);
        if row.r.len() < self.num_actions {
            stored.max(self.defaults.r_default)
        } else {
            stored
        }
    }

    /// Largest stored gain value, if any.
    pub fn max_stored_rho(&self) -> Option<f64> {
        self.rows
            .values()
            .flat_map(|row| row.rho.values().copied())
            .reduce(f64::max)
    }

    /// One R-learning step for `<s, a, r, s2>`. `rho_default` is the gain
    /// used when `(s, a)` has no stored value. Both new values are computed
    /// from the old ones before either is written.
    pub fn update(&mut self, s: &RlStateKey, a: usize, r: f64, s2: &RlStateKey, rho_default: f64) {
        let r_old = self.r_lookup(s, a);
        let rho_old = self.rho_stored(s, a).unwrap_or(rho_default);
        let m_next = self.max_r(s2);
        let m_here = self.max_r(s);
        let r_new = (1.0 - self.alpha) * r_old + self.alpha * (r - rho_old + m_next);
        let rho_new = (1.0 - self.beta) * rho_old + self.beta * (r + m_next - m_here);
        let row = self.rows.entry(s.clone()).or_default();
        row.r.insert(a, r_new);
        row.rho.insert(a, rho_new);
    }

    /// Every stored entry as `(state, action, R, rho)`.
    pub fn entries(&self) -> Vec<(RlStateKey, usize, Option<f64>, Option<f64>)> {
        let mut out = Vec::new();
        for (k, row) in &self.rows {
            let mut actions: Vec<usize> = row.r.keys().chain(row.rho.keys()).copied().collect();
            actions.sort_unstable();
            actions.dedup();
            for a in actions {
                out.push((
                    k.clone(),
                    a,
                    row.r.get(&a).copied(),
                    row.rho.get(&a).copied(),
                ));
            }
        }
        out.sort_by(|x, y| (&x.0, x.1).cmp(&(&y.0, y.1)));
        out
    }

    /// Writes `state_key,action,R,rho` rows sorted by key then action label.
    pub fn write_snapshot<W: io::Write>(
        &self,
        g: &GroundedDomain,
        w: W,
    ) -> Result<(), SnapshotError> {
        let mut rows: Vec<(String, String, String, String)> = self
            .entries()
            .into_iter()
            .map(|(k, a, r, rho)| {
                let fmt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
                (k.serialize(g), g.action(a).label(), fmt(r), fmt(rho))
            })
            .collect();
        rows.sort();
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["state_key", "action", "R", "rho"])?;
        for (k, a, r, rho) in rows {
            out.write_record([k, a, r, rho])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Loads a snapshot verbatim into empty tables with the given parameters.
    pub fn read_snapshot<R: io::Read>(
        g: &GroundedDomain,
        reader: R,
        alpha: f64,
        beta: f64,
        defaults: DefaultPolicy,
    ) -> Result<Self, SnapshotError> {
        let mut t = ValueTables::new(g.actions().len(), alpha, beta, defaults);
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["state_key", "action", "R", "rho"] {
            return Err(SnapshotError::BadHeader);
        }
        for rec in rdr.records() {
            let rec = rec?;
            let key = RlStateKey::deserialize(&rec[0], g)?;
            let a = g
                .action_by_label(&rec[1])
                .ok_or_else(|| SnapshotError::UnknownAction(rec[1].to_string()))?;
            let num = |f: &str| -> Result<Option<f64>, SnapshotError> {
                if f.is_empty() {
                    return Ok(None);
                }
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(Some)
                    .ok_or_else(|| SnapshotError::BadValue(f.to_string()))
            };
            let row = t.rows.entry(key).or_default();
            if let Some(v) = num(&rec[2])? {
                row.r.insert(a, v);
            }
            if let Some(v) = num(&rec[3])? {
                row.rho.insert(a, v);
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot header must be `state_key,action,R,rho`")]
    BadHeader,
    #[error("unknown state key `{0}`")]
    BadKey(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("invalid value `{0}`")]
    BadValue(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// `-Len`, with infeasible motions mapped to the sentinel.
pub fn reward_from_motion(len: Result<f64, Infeasible>) -> f64 {
    match len {
        Ok(l) => 0.0 - l,
        Err(_) => INFEASIBLE_SENTINEL,
    }
}

pub fn reward_from_execution(duration: f64) -> f64 {
    0.0 - duration
}
