//! A Boolean-fluent action description language with static, dynamic,
//! nonexecutable and inertial causal laws, plus explicit grounding into a
//! deterministic transition system.
//!
//! Domain files are line-oriented statements terminated by `.`:
//!
//! ```text
//! % comment
//! type door.
//! object top_door : door.
//! fluent near(door).
//! action approach(door).
//! fact has(r_open, top_door).
//! connected(R1, R2) if connected(R2, R1).
//! approach(D) causes near(D).
//! approach(D) causes -near(D2) if near(D2), D != D2.
//! nonexecutable approach(D) if near(D).
//! inertial near.
//! ```

mod ground;
mod parser;
mod state;

use std::fmt;

pub use ground::{
    AtomId, GroundAction, GroundAtom, GroundedDomain, GroundingError, SignedAtom,
    DEFAULT_GROUNDING_LIMIT,
};
pub use parser::{parse_domain, parse_ground_atoms, ParseError, Position};
pub use state::{check_transition, successors, State};

/// An argument of an atom: an uppercase variable or a lowercase constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `predicate(arg, ...)`, used both for fluent atoms and action terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter(|t| t.is_var()).map(Term::name)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A fluent atom with a sign; `positive == false` is written `-atom`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("-")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BodyItem {
    Literal(Literal),
    /// `X != Y`, resolved during grounding.
    NotEqual(Term, Term),
}

impl fmt::Display for BodyItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyItem::Literal(l) => write!(f, "{l}"),
            BodyItem::NotEqual(a, b) => write!(f, "{a} != {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CausalLaw {
    /// `head if body.`
    Static { head: Atom, body: Vec<BodyItem> },
    /// `action causes [-]effect [if body].`
    Dynamic {
        action: Atom,
        effect: Literal,
        body: Vec<BodyItem>,
    },
    /// `nonexecutable action if body.`
    Nonexecutable { action: Atom, body: Vec<BodyItem> },
    /// `inertial predicate.`
    Inertial { predicate: String },
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &[BodyItem]) -> fmt::Result {
    for (i, b) in body.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{b}")?;
    }
    Ok(())
}

impl fmt::Display for CausalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CausalLaw::Static { head, body } => {
                write!(f, "{head} if ")?;
                write_body(f, body)?;
            }
            CausalLaw::Dynamic {
                action,
                effect,
                body,
            } => {
                write!(f, "{action} causes {effect}")?;
                if !body.is_empty() {
                    f.write_str(" if ")?;
                    write_body(f, body)?;
                }
            }
            CausalLaw::Nonexecutable { action, body } => {
                write!(f, "nonexecutable {action} if ")?;
                write_body(f, body)?;
            }
            CausalLaw::Inertial { predicate } => write!(f, "inertial {predicate}")?,
        }
        f.write_str(".")
    }
}

/// Name and parameter types of a fluent or action schema.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub name: String,
    pub params: Vec<String>,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            write!(f, "({})", self.params.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectDecl {
    pub name: String,
    pub ty: String,
}

/// A parsed domain: declarations, static facts and causal laws in source order.
///
/// An object may be declared under several types; grounding treats type
/// membership as a relation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActionDescription {
    pub types: Vec<String>,
    pub objects: Vec<ObjectDecl>,
    pub fluents: Vec<Signature>,
    pub actions: Vec<Signature>,
    pub facts: Vec<Atom>,
    pub laws: Vec<CausalLaw>,
}

impl ActionDescription {
    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
            && self.objects.is_empty()
            && self.fluents.is_empty()
            && self.actions.is_empty()
            && self.facts.is_empty()
            && self.laws.is_empty()
    }

    pub fn fluent(&self, name: &str) -> Option<&Signature> {
        self.fluents.iter().find(|s| s.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&Signature> {
        self.actions.iter().find(|s| s.name == name)
    }

    pub fn objects_of<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.objects
            .iter()
            .filter(move |o| o.ty == ty)
            .map(|o| o.name.as_str())
    }
}

/// Canonical printer; `parse_domain` accepts its output unchanged.
impl fmt::Display for ActionDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.types {
            writeln!(f, "type {t}.")?;
        }
        for o in &self.objects {
            writeln!(f, "object {} : {}.", o.name, o.ty)?;
        }
        for s in &self.fluents {
            writeln!(f, "fluent {s}.")?;
        }
        for s in &self.actions {
            writeln!(f, "action {s}.")?;
        }
        for a in &self.facts {
            writeln!(f, "fact {a}.")?;
        }
        for l in &self.laws {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}
