use std::collections::BTreeSet;
use std::fmt;

use super::ground::{AtomId, GroundedDomain};

/// Closed-world truth assignment over a domain's dynamic atoms.
///
/// Stored as a bitset indexed by atom id; since atom ids follow the
/// lexicographic atom order, iteration yields atoms in canonical order and
/// equal states compare and hash identically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    words: Box<[u64]>,
}

impl State {
    pub fn empty(num_atoms: usize) -> Self {
        State {
            words: vec![0u64; num_atoms.div_ceil(64)].into_boxed_slice(),
        }
    }

    #[inline]
    pub fn contains(&self, id: AtomId) -> bool {
        let i = id as usize;
        self.words
            .get(i / 64)
            .is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    #[inline]
    pub fn insert(&mut self, id: AtomId) {
        let i = id as usize;
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, id: AtomId) {
        let i = id as usize;
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// True atom ids in increasing (canonical) order.
    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((wi * 64) as AtomId + b)
            })
        })
    }

    #[inline]
    fn superset_of(&self, other: &State) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == *b)
    }

    #[inline]
    fn disjoint(&self, other: &State) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A conjunction of signed atoms as a pair of masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Cond {
    pos: State,
    neg: State,
}

impl Cond {
    pub(crate) fn empty(num_atoms: usize) -> Self {
        Cond {
            pos: State::empty(num_atoms),
            neg: State::empty(num_atoms),
        }
    }

    /// Adds a literal; false if it contradicts one already present.
    pub(crate) fn add(&mut self, id: AtomId, positive: bool) -> bool {
        let (same, other) = if positive {
            (&mut self.pos, &self.neg)
        } else {
            (&mut self.neg, &self.pos)
        };
        if other.contains(id) {
            return false;
        }
        same.insert(id);
        true
    }

    #[inline]
    pub(crate) fn holds(&self, s: &State) -> bool {
        s.superset_of(&self.pos) && s.disjoint(&self.neg)
    }

    pub(crate) fn single_literal(&self) -> Option<(AtomId, bool)> {
        match self.literals().as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub(crate) fn literals(&self) -> Vec<(AtomId, bool)> {
        let mut v: Vec<(AtomId, bool)> = self
            .pos
            .iter()
            .map(|id| (id, true))
            .chain(self.neg.iter().map(|id| (id, false)))
            .collect();
        v.sort();
        v
    }
}

impl GroundedDomain {
    /// Successor of `s` under action `idx`, or `None` if the action is not
    /// executable or its effects contradict each other.
    pub fn apply(&self, s: &State, idx: usize) -> Option<State> {
        let a = self.action(idx);
        if !a.pre.holds(s) || a.blockers.iter().any(|b| b.holds(s)) {
            return None;
        }
        let mut adds = self.empty_state();
        let mut dels = self.empty_state();
        for e in &a.effects {
            if e.cond.holds(s) {
                if e.positive {
                    adds.insert(e.atom);
                } else {
                    dels.insert(e.atom);
                }
            }
        }
        if !adds.disjoint(&dels) {
            return None;
        }
        let mut next = s.clone();
        for ((w, inertial), (add, del)) in next
            .words
            .iter_mut()
            .zip(self.inertial.words.iter())
            .zip(adds.words.iter().zip(dels.words.iter()))
        {
            *w = (*w & inertial & !del) | add;
        }
        self.close(&mut next);
        Some(next)
    }
}

/// Every executable ground action in `s` with its successor, in ground-action order.
pub fn successors(s: &State, g: &GroundedDomain) -> Vec<(usize, State)> {
    (0..g.actions().len())
        .filter_map(|i| g.apply(s, i).map(|n| (i, n)))
        .collect()
}

/// Decides whether `<s, a, s2>` is a transition, recomputing the action's
/// semantics from the law listings rather than the compiled masks.
pub fn check_transition(s: &State, a: usize, s2: &State, g: &GroundedDomain) -> bool {
    let Some(action) = g.actions().get(a) else {
        return false;
    };
    let before: BTreeSet<AtomId> = s.iter().collect();
    let after: BTreeSet<AtomId> = s2.iter().collect();
    let sat = |lits: &[(AtomId, bool)]| lits.iter().all(|(id, pos)| before.contains(id) == *pos);
    if !sat(&action.precondition()) {
        return false;
    }
    if action.nonexecutable_conditions().iter().any(|c| sat(c)) {
        return false;
    }
    let mut caused: BTreeSet<(AtomId, bool)> = BTreeSet::new();
    for (cond, atom, positive) in action.conditional_effects() {
        if sat(&cond) {
            caused.insert((atom, positive));
        }
    }
    if caused
        .iter()
        .any(|(id, pos)| *pos && caused.contains(&(*id, false)))
    {
        return false;
    }
    // Frame: caused atoms, then inertial carry-over, then derived atoms.
    let mut expected: BTreeSet<AtomId> = BTreeSet::new();
    for id in 0..g.num_atoms() as AtomId {
        let value = if caused.contains(&(id, true)) {
            true
        } else if caused.contains(&(id, false)) {
            false
        } else {
            g.is_inertial(id) && before.contains(&id)
        };
        if value {
            expected.insert(id);
        }
    }
    let mut st = g.empty_state();
    for id in &expected {
        st.insert(*id);
    }
    g.close(&mut st);
    let expected: BTreeSet<AtomId> = st.iter().collect();
    expected == after
}
