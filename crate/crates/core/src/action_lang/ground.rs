use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::state::{Cond, State};
use super::{ActionDescription, Atom, BodyItem, CausalLaw, Literal, Term};

pub type AtomId = u32;
/// An atom with the truth value a condition requires of it.
pub type SignedAtom = (AtomId, bool);

/// Ground actions beyond this count abort grounding.
pub const DEFAULT_GROUNDING_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundingError {
    #[error("grounding would produce {count} ground actions (limit {limit})")]
    TooManyActions { count: usize, limit: usize },
    #[error("unknown {kind} `{name}`")]
    UnknownSymbol { kind: &'static str, name: String },
    #[error("atom `{0}` is not a fluent of this domain")]
    UnknownAtom(String),
    #[error("static atom `{0}` does not hold in the domain facts")]
    FalseStaticAtom(String),
}

/// A variable-free fluent atom. Ordering is lexicographic on predicate,
/// then arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        GroundAtom {
            predicate: predicate.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Effect {
    pub(crate) cond: Cond,
    pub(crate) atom: AtomId,
    pub(crate) positive: bool,
}

/// One instance of an action schema with its ground laws.
#[derive(Debug, Clone)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    /// Conjunction that must hold; compiled from single-literal
    /// nonexecutable laws.
    pub(crate) pre: Cond,
    /// Multi-literal nonexecutable conditions; any one holding blocks the action.
    pub(crate) blockers: Vec<Cond>,
    pub(crate) effects: Vec<Effect>,
}

impl GroundAction {
    /// `name(arg, ...)`, the action's stable identity.
    pub fn label(&self) -> String {
        self.to_string()
    }

    pub fn precondition(&self) -> Vec<SignedAtom> {
        self.pre.literals()
    }

    pub fn nonexecutable_conditions(&self) -> Vec<Vec<SignedAtom>> {
        self.blockers.iter().map(Cond::literals).collect()
    }

    /// `(condition, atom, positive)` for each effect.
    pub fn conditional_effects(&self) -> Vec<(Vec<SignedAtom>, AtomId, bool)> {
        self.effects
            .iter()
            .map(|e| (e.cond.literals(), e.atom, e.positive))
            .collect()
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

/// The explicit transition system of an action description.
///
/// Predicates that no dynamic law can change are *static*: their true atoms
/// are computed once (facts closed under static laws) and compiled away.
/// States only carry atoms of the remaining dynamic predicates.
#[derive(Debug, Clone)]
pub struct GroundedDomain {
    atoms: Vec<GroundAtom>,
    atom_index: HashMap<GroundAtom, AtomId>,
    static_atoms: BTreeSet<GroundAtom>,
    dynamic_predicates: BTreeSet<String>,
    actions: Vec<GroundAction>,
    action_index: HashMap<String, usize>,
    pub(crate) inertial: State,
    pub(crate) rules: Vec<(Cond, AtomId)>,
}

impl GroundedDomain {
    pub fn ground(desc: &ActionDescription) -> Result<Self, GroundingError> {
        Self::ground_with_limit(desc, DEFAULT_GROUNDING_LIMIT)
    }

    pub fn ground_with_limit(
        desc: &ActionDescription,
        limit: usize,
    ) -> Result<Self, GroundingError> {
        Grounder::new(desc)?.run(limit)
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id as usize]
    }

    pub fn atom_id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.atom_index.get(atom).copied()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// True atoms of static predicates (facts closed under static laws).
    pub fn static_atoms(&self) -> &BTreeSet<GroundAtom> {
        &self.static_atoms
    }

    pub fn holds_statically(&self, atom: &GroundAtom) -> bool {
        self.static_atoms.contains(atom)
    }

    pub fn is_dynamic(&self, predicate: &str) -> bool {
        self.dynamic_predicates.contains(predicate)
    }

    /// Ground actions in their deterministic order (lexicographic on name, then args).
    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, idx: usize) -> &GroundAction {
        &self.actions[idx]
    }

    pub fn action_by_label(&self, label: &str) -> Option<usize> {
        self.action_index.get(label).copied()
    }

    pub fn is_inertial(&self, id: AtomId) -> bool {
        self.inertial.contains(id)
    }

    /// An empty state sized for this domain.
    pub fn empty_state(&self) -> State {
        State::empty(self.atoms.len())
    }

    /// Builds a state from true atoms, closed under the static laws.
    /// Static atoms are accepted when they hold and are otherwise rejected.
    pub fn state_from_atoms<'a>(
        &self,
        atoms: impl IntoIterator<Item = &'a GroundAtom>,
    ) -> Result<State, GroundingError> {
        let mut s = self.empty_state();
        for a in atoms {
            match self.atom_id(a) {
                Some(id) => s.insert(id),
                None if self.static_atoms.contains(a) => {}
                None if self.is_dynamic(&a.predicate) => {
                    return Err(GroundingError::UnknownAtom(a.to_string()))
                }
                None => return Err(GroundingError::FalseStaticAtom(a.to_string())),
            }
        }
        self.close(&mut s);
        Ok(s)
    }

    /// Applies static laws with dynamic heads until nothing changes.
    pub fn close(&self, s: &mut State) {
        loop {
            let mut changed = false;
            for (cond, head) in &self.rules {
                if !s.contains(*head) && cond.holds(s) {
                    s.insert(*head);
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// True atoms of `s` in canonical order.
    pub fn state_atoms<'a>(&'a self, s: &'a State) -> impl Iterator<Item = &'a GroundAtom> + 'a {
        s.iter().map(move |id| self.atom(id))
    }

    /// `{a, b, ...}` in canonical order.
    pub fn format_state(&self, s: &State) -> String {
        let parts: Vec<String> = self.state_atoms(s).map(|a| a.to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Resolves a list of ground literals against the atom table. Static
    /// literals are checked immediately and dropped when satisfied.
    pub fn resolve_literals(
        &self,
        lits: &[Literal],
    ) -> Result<Vec<(AtomId, bool)>, GroundingError> {
        let mut out = Vec::new();
        for l in lits {
            let g = ground_atom(&l.atom, &BTreeMap::new());
            match self.atom_id(&g) {
                Some(id) => out.push((id, l.positive)),
                None if !self.is_dynamic(&g.predicate) => {
                    if self.static_atoms.contains(&g) != l.positive {
                        return Err(GroundingError::FalseStaticAtom(l.to_string()));
                    }
                }
                None => return Err(GroundingError::UnknownAtom(g.to_string())),
            }
        }
        Ok(out)
    }
}

type Binding<'a> = BTreeMap<&'a str, &'a str>;

fn ground_atom(atom: &Atom, b: &Binding) -> GroundAtom {
    GroundAtom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => b.get(v.as_str()).expect("variable bound").to_string(),
            })
            .collect(),
    }
}

struct Grounder<'a> {
    desc: &'a ActionDescription,
    objects_by_type: BTreeMap<&'a str, BTreeSet<&'a str>>,
    dynamic: BTreeSet<String>,
    static_atoms: BTreeSet<GroundAtom>,
}

impl<'a> Grounder<'a> {
    fn new(desc: &'a ActionDescription) -> Result<Self, GroundingError> {
        let mut objects_by_type: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for t in &desc.types {
            objects_by_type.entry(t.as_str()).or_default();
        }
        for o in &desc.objects {
            objects_by_type
                .entry(o.ty.as_str())
                .or_default()
                .insert(o.name.as_str());
        }

        let mut dynamic: BTreeSet<String> = BTreeSet::new();
        for law in &desc.laws {
            match law {
                CausalLaw::Dynamic { effect, .. } => {
                    dynamic.insert(effect.atom.predicate.clone());
                }
                CausalLaw::Inertial { predicate } => {
                    dynamic.insert(predicate.clone());
                }
                _ => {}
            }
        }
        loop {
            let before = dynamic.len();
            for law in &desc.laws {
                if let CausalLaw::Static { head, body } = law {
                    let depends = body.iter().any(|b| match b {
                        BodyItem::Literal(l) => dynamic.contains(&l.atom.predicate),
                        BodyItem::NotEqual(..) => false,
                    });
                    if depends {
                        dynamic.insert(head.predicate.clone());
                    }
                }
            }
            if dynamic.len() == before {
                break;
            }
        }

        let mut g = Grounder {
            desc,
            objects_by_type,
            dynamic,
            static_atoms: BTreeSet::new(),
        };
        g.close_static()?;
        Ok(g)
    }

    fn type_objects(&self, ty: &str) -> Result<&BTreeSet<&'a str>, GroundingError> {
        self.objects_by_type
            .get(ty)
            .ok_or_else(|| GroundingError::UnknownSymbol {
                kind: "type",
                name: ty.to_string(),
            })
    }

    fn param_types(&self, atom: &Atom, is_action: bool) -> Result<&'a [String], GroundingError> {
        let sig = if is_action {
            self.desc.action(&atom.predicate)
        } else {
            self.desc.fluent(&atom.predicate)
        };
        let sig = sig.ok_or_else(|| GroundingError::UnknownSymbol {
            kind: if is_action { "action" } else { "fluent" },
            name: atom.predicate.clone(),
        })?;
        Ok(&sig.params)
    }

    /// Domain of each variable: intersection of the object sets of every
    /// argument position it occupies.
    fn var_domains(
        &self,
        action: Option<&'a Atom>,
        atoms: impl Iterator<Item = &'a Atom>,
    ) -> Result<BTreeMap<&'a str, BTreeSet<&'a str>>, GroundingError> {
        let mut doms: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        let mut visit = |atom: &'a Atom, is_action: bool| -> Result<(), GroundingError> {
            let types = self.param_types(atom, is_action)?;
            for (t, ty) in atom.args.iter().zip(types) {
                if let Term::Var(v) = t {
                    let objs = self.type_objects(ty)?;
                    doms.entry(v.as_str())
                        .and_modify(|d| d.retain(|o| objs.contains(o)))
                        .or_insert_with(|| objs.clone());
                }
            }
            Ok(())
        };
        if let Some(a) = action {
            visit(a, true)?;
        }
        for a in atoms {
            visit(a, false)?;
        }
        Ok(doms)
    }

    /// Enumerates every binding of the law's variables that satisfies its
    /// static literals and inequalities. Static positive literals drive the
    /// search; remaining variables range over their domains.
    fn bindings(
        &self,
        body: &'a [BodyItem],
        doms: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        init: Binding<'a>,
        out: &mut Vec<Binding<'a>>,
    ) {
        let static_pos: Vec<&Atom> = body
            .iter()
            .filter_map(|b| match b {
                BodyItem::Literal(l) if l.positive && !self.dynamic.contains(&l.atom.predicate) => {
                    Some(&l.atom)
                }
                _ => None,
            })
            .collect();
        self.match_static(&static_pos, body, doms, init, out);
    }

    fn match_static(
        &self,
        rest: &[&'a Atom],
        body: &'a [BodyItem],
        doms: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        b: Binding<'a>,
        out: &mut Vec<Binding<'a>>,
    ) {
        let Some((first, tail)) = rest.split_first() else {
            let free: Vec<&str> = doms
                .keys()
                .copied()
                .filter(|v| !b.contains_key(v))
                .collect();
            self.enumerate_free(&free, body, doms, b, out);
            return;
        };
        let lo = GroundAtom {
            predicate: first.predicate.clone(),
            args: Vec::new(),
        };
        for cand in self.static_atoms.range(lo..) {
            if cand.predicate != first.predicate {
                break;
            }
            if cand.args.len() != first.args.len() {
                continue;
            }
            let mut nb = b.clone();
            let ok = first.args.iter().zip(&cand.args).all(|(t, val)| match t {
                Term::Const(c) => c == val,
                Term::Var(v) => match nb.get(v.as_str()) {
                    Some(bound) => *bound == val,
                    None => match doms.get(v.as_str()).and_then(|d| d.get(val.as_str())) {
                        Some(obj) => {
                            nb.insert(v.as_str(), obj);
                            true
                        }
                        None => false,
                    },
                },
            });
            if ok {
                self.match_static(tail, body, doms, nb, out);
            }
        }
    }

    fn enumerate_free(
        &self,
        free: &[&'a str],
        body: &'a [BodyItem],
        doms: &BTreeMap<&'a str, BTreeSet<&'a str>>,
        b: Binding<'a>,
        out: &mut Vec<Binding<'a>>,
    ) {
        if let Some((v, rest)) = free.split_first() {
            for obj in &doms[v] {
                let mut nb = b.clone();
                nb.insert(v, obj);
                self.enumerate_free(rest, body, doms, nb, out);
            }
            return;
        }
        let ok = body.iter().all(|item| match item {
            BodyItem::NotEqual(x, y) => resolve(x, &b) != resolve(y, &b),
            BodyItem::Literal(l) if !l.positive && !self.dynamic.contains(&l.atom.predicate) => {
                !self.static_atoms.contains(&ground_atom(&l.atom, &b))
            }
            _ => true,
        });
        if ok {
            out.push(b);
        }
    }

    fn close_static(&mut self) -> Result<(), GroundingError> {
        for f in &self.desc.facts {
            self.static_atoms.insert(ground_atom(f, &BTreeMap::new()));
        }
        let laws: Vec<(&Atom, &[BodyItem])> = self
            .desc
            .laws
            .iter()
            .filter_map(|l| match l {
                CausalLaw::Static { head, body } if !self.dynamic.contains(&head.predicate) => {
                    Some((head, body.as_slice()))
                }
                _ => None,
            })
            .collect();
        let mut prepared = Vec::new();
        for (head, body) in laws {
            let doms = self.var_domains(None, std::iter::once(head).chain(body_atoms(body)))?;
            prepared.push((head, body, doms));
        }
        loop {
            let mut new_atoms = Vec::new();
            for (head, body, doms) in &prepared {
                let mut bs = Vec::new();
                self.bindings(body, doms, BTreeMap::new(), &mut bs);
                for b in bs {
                    let g = ground_atom(head, &b);
                    if !self.static_atoms.contains(&g) {
                        new_atoms.push(g);
                    }
                }
            }
            if new_atoms.is_empty() {
                return Ok(());
            }
            self.static_atoms.extend(new_atoms);
        }
    }

    fn run(self, limit: usize) -> Result<GroundedDomain, GroundingError> {
        // Dynamic atom table.
        let mut atoms = Vec::new();
        for sig in &self.desc.fluents {
            if !self.dynamic.contains(&sig.name) {
                continue;
            }
            let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
            for ty in &sig.params {
                let objs = self.type_objects(ty)?;
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        objs.iter().map(move |o| {
                            let mut t = t.clone();
                            t.push(o.to_string());
                            t
                        })
                    })
                    .collect();
            }
            atoms.extend(tuples.into_iter().map(|args| GroundAtom {
                predicate: sig.name.clone(),
                args,
            }));
        }
        atoms.sort();
        atoms.dedup();
        let atom_index: HashMap<GroundAtom, AtomId> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i as AtomId))
            .collect();
        let n = atoms.len();

        // Ground action skeletons.
        let mut count = 0usize;
        for sig in &self.desc.actions {
            let mut c = 1usize;
            for ty in &sig.params {
                c = c.saturating_mul(self.type_objects(ty)?.len());
            }
            count = count.saturating_add(c);
        }
        if count > limit {
            return Err(GroundingError::TooManyActions { count, limit });
        }
        let mut actions = Vec::with_capacity(count);
        for sig in &self.desc.actions {
            let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
            for ty in &sig.params {
                let objs = self.type_objects(ty)?;
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        objs.iter().map(move |o| {
                            let mut t = t.clone();
                            t.push(o.to_string());
                            t
                        })
                    })
                    .collect();
            }
            for args in tuples {
                actions.push(GroundAction {
                    name: sig.name.clone(),
                    args,
                    pre: Cond::empty(n),
                    blockers: Vec::new(),
                    effects: Vec::new(),
                });
            }
        }
        actions.sort_by(|a, b| (&a.name, &a.args).cmp(&(&b.name, &b.args)));

        let compile = |lits: &[(GroundAtom, bool)]| -> Option<Cond> {
            let mut c = Cond::empty(n);
            for (g, positive) in lits {
                match atom_index.get(g) {
                    Some(&id) => {
                        if !c.add(id, *positive) {
                            return None;
                        }
                    }
                    // Outside the atom table the atom is always false.
                    None if *positive => return None,
                    None => {}
                }
            }
            Some(c)
        };

        for law in &self.desc.laws {
            let (action, body, effect) = match law {
                CausalLaw::Dynamic {
                    action,
                    effect,
                    body,
                } => (action, body, Some(effect)),
                CausalLaw::Nonexecutable { action, body } => (action, body, None),
                _ => continue,
            };
            let extra = effect.map(|e| &e.atom);
            let doms = self.var_domains(Some(action), extra.into_iter().chain(body_atoms(body)))?;
            for ga in actions.iter_mut().filter(|ga| ga.name == action.predicate) {
                let mut init = Binding::new();
                let unifies = action.args.iter().zip(&ga.args).all(|(t, val)| match t {
                    Term::Const(c) => c == val,
                    Term::Var(v) => {
                        let Some(obj) = doms.get(v.as_str()).and_then(|d| d.get(val.as_str()))
                        else {
                            return false;
                        };
                        match init.insert(v.as_str(), obj) {
                            Some(prev) => prev == *obj,
                            None => true,
                        }
                    }
                });
                if !unifies {
                    continue;
                }
                let mut bs = Vec::new();
                self.bindings(body, &doms, init, &mut bs);
                for b in bs {
                    let lits = self.dynamic_literals(body, &b);
                    let Some(cond) = compile(&lits) else { continue };
                    match effect {
                        Some(e) => {
                            let g = ground_atom(&e.atom, &b);
                            let Some(&id) = atom_index.get(&g) else {
                                return Err(GroundingError::UnknownAtom(g.to_string()));
                            };
                            ga.effects.push(Effect {
                                cond,
                                atom: id,
                                positive: e.positive,
                            });
                        }
                        None => match cond.single_literal() {
                            // nonexecutable a if l  ==  a requires not-l
                            Some((id, positive)) => {
                                if !ga.pre.add(id, !positive) {
                                    ga.blockers.push(Cond::empty(n));
                                }
                            }
                            None => ga.blockers.push(cond),
                        },
                    }
                }
            }
        }

        let mut rules = Vec::new();
        for law in &self.desc.laws {
            let CausalLaw::Static { head, body } = law else {
                continue;
            };
            if !self.dynamic.contains(&head.predicate) {
                continue;
            }
            let doms = self.var_domains(None, std::iter::once(head).chain(body_atoms(body)))?;
            let mut bs = Vec::new();
            self.bindings(body, &doms, BTreeMap::new(), &mut bs);
            for b in bs {
                let g = ground_atom(head, &b);
                let Some(&id) = atom_index.get(&g) else {
                    continue;
                };
                if let Some(cond) = compile(&self.dynamic_literals(body, &b)) {
                    rules.push((cond, id));
                }
            }
        }

        let inertial_preds: BTreeSet<&str> = self
            .desc
            .laws
            .iter()
            .filter_map(|l| match l {
                CausalLaw::Inertial { predicate } => Some(predicate.as_str()),
                _ => None,
            })
            .collect();
        let mut inertial = State::empty(n);
        for (i, a) in atoms.iter().enumerate() {
            if inertial_preds.contains(a.predicate.as_str()) {
                inertial.insert(i as AtomId);
            }
        }

        let action_index = actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.label(), i))
            .collect();
        Ok(GroundedDomain {
            atoms,
            atom_index,
            static_atoms: self.static_atoms,
            dynamic_predicates: self.dynamic,
            actions,
            action_index,
            inertial,
            rules,
        })
    }

    fn dynamic_literals(&self, body: &[BodyItem], b: &Binding) -> Vec<(GroundAtom, bool)> {
        body.iter()
            .filter_map(|item| match item {
                BodyItem::Literal(l) if self.dynamic.contains(&l.atom.predicate) => {
                    Some((ground_atom(&l.atom, b), l.positive))
                }
                _ => None,
            })
            .collect()
    }
}

fn resolve<'b>(t: &'b Term, b: &Binding<'b>) -> &'b str {
    match t {
        Term::Const(c) => c,
        Term::Var(v) => b[v.as_str()],
    }
}

fn body_atoms(body: &[BodyItem]) -> impl Iterator<Item = &Atom> {
    body.iter().filter_map(|b| match b {
        BodyItem::Literal(l) => Some(&l.atom),
        BodyItem::NotEqual(..) => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action_lang::parse_domain;

    #[test]
    fn zero_ary_action_grounds_once() {
        let d = parse_domain("fluent lit. action toggle. toggle causes lit.").unwrap();
        let g = GroundedDomain::ground(&d).unwrap();
        assert_eq!(g.actions().len(), 1);
        assert_eq!(g.action(0).label(), "toggle");
    }

    #[test]
    fn static_symmetry_closure() {
        let d = parse_domain(
            "type door. object a : door. object b : door.\n\
             fluent acc(door, door).\n\
             fact acc(a, b).\n\
             acc(D1, D2) if acc(D2, D1).",
        )
        .unwrap();
        let g = GroundedDomain::ground(&d).unwrap();
        assert!(g.holds_statically(&GroundAtom::new("acc", &["b", "a"])));
        assert!(g.holds_statically(&GroundAtom::new("acc", &["a", "b"])));
        assert!(!g.holds_statically(&GroundAtom::new("acc", &["a", "a"])));
        assert!(!g.is_dynamic("acc"));
    }

    #[test]
    fn transitive_closure_terminates() {
        let mut text = String::from("type n. fluent e(n, n).\n");
        for i in 0..8 {
            text.push_str(&format!("object n{i} : n.\n"));
        }
        for i in 0..7 {
            text.push_str(&format!("fact e(n{i}, n{}).\n", i + 1));
        }
        text.push_str("e(X, Z) if e(X, Y), e(Y, Z).\n");
        let g = GroundedDomain::ground(&parse_domain(&text).unwrap()).unwrap();
        assert_eq!(g.static_atoms().len(), 28);
    }

    #[test]
    fn grounding_limit() {
        let mut text = String::from("type t. action a(t, t, t).\n");
        for i in 0..50 {
            text.push_str(&format!("object o{i} : t.\n"));
        }
        let d = parse_domain(&text).unwrap();
        let err = GroundedDomain::ground(&d).unwrap_err();
        assert_eq!(
            err,
            GroundingError::TooManyActions {
                count: 125_000,
                limit: DEFAULT_GROUNDING_LIMIT
            }
        );
        assert!(GroundedDomain::ground_with_limit(&d, 200_000).is_ok());
    }

    #[test]
    fn inequality_resolved_at_grounding() {
        let d = parse_domain(
            "type d. object x : d. object y : d. fluent near(d). action go(d).\n\
             go(D) causes near(D).\n\
             go(D) causes -near(E) if near(E), D != E.\n\
             inertial near.",
        )
        .unwrap();
        let g = GroundedDomain::ground(&d).unwrap();
        let go_x = g.action(g.action_by_label("go(x)").unwrap());
        let effects = go_x.conditional_effects();
        assert_eq!(effects.len(), 2);
        let near_y = g.atom_id(&GroundAtom::new("near", &["y"])).unwrap();
        assert!(effects
            .iter()
            .any(|(c, a, pos)| *a == near_y && !pos && c == &vec![(near_y, true)]));
    }

    #[test]
    fn single_literal_nonexecutable_becomes_precondition() {
        let d = parse_domain(
            "type d. object x : d. fluent open(d). fluent facing(d). action pass(d).\n\
             nonexecutable pass(D) if -open(D).\n\
             nonexecutable pass(D) if -facing(D), open(D).\n\
             inertial open. inertial facing.",
        )
        .unwrap();
        let g = GroundedDomain::ground(&d).unwrap();
        let a = g.action(0);
        let open_x = g.atom_id(&GroundAtom::new("open", &["x"])).unwrap();
        assert_eq!(a.precondition(), vec![(open_x, true)]);
        assert_eq!(a.nonexecutable_conditions().len(), 1);
    }
}
