use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::{ActionDescription, Atom, BodyItem, CausalLaw, Literal, ObjectDecl, Signature, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error at {found}: expected {expected}")]
    Syntax {
        pos: Position,
        found: String,
        expected: String,
    },
    #[error("{pos}: undeclared {kind} `{name}`")]
    Undeclared {
        pos: Position,
        kind: &'static str,
        name: String,
    },
    #[error("{pos}: `{name}` takes {expected} argument(s) but {found} were given")]
    Arity {
        pos: Position,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{pos}: variable `{var}` is not bound by the law body")]
    UnboundVariable { pos: Position, var: String },
    #[error("{pos}: duplicate declaration of `{name}`")]
    Duplicate { pos: Position, name: String },
}

impl ParseError {
    pub fn position(&self) -> Position {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Undeclared { pos, .. }
            | ParseError::Arity { pos, .. }
            | ParseError::UnboundVariable { pos, .. }
            | ParseError::Duplicate { pos, .. } => *pos,
        }
    }
}

const KEYWORDS: &[&str] = &[
    "type",
    "object",
    "fluent",
    "action",
    "fact",
    "if",
    "causes",
    "nonexecutable",
    "inertial",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Minus,
    NotEq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "token `{s}`"),
            Tok::LParen => f.write_str("token `(`"),
            Tok::RParen => f.write_str("token `)`"),
            Tok::Comma => f.write_str("token `,`"),
            Tok::Dot => f.write_str("token `.`"),
            Tok::Colon => f.write_str("token `:`"),
            Tok::Minus => f.write_str("token `-`"),
            Tok::NotEq => f.write_str("token `!=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Position, Tok)>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Position {
                line: li + 1,
                col: i + 1,
            };
            if c == '%' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                '-' => Tok::Minus,
                '!' if chars.get(i + 1) == Some(&'=') => {
                    i += 1;
                    Tok::NotEq
                }
                c if c.is_ascii_alphanumeric() || c == '_' => {
                    let start = i;
                    while i + 1 < chars.len()
                        && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_')
                    {
                        i += 1;
                    }
                    Tok::Ident(chars[start..=i].iter().collect())
                }
                other => {
                    return Err(ParseError::Syntax {
                        pos,
                        found: format!("character `{other}`"),
                        expected: "a token".into(),
                    })
                }
            };
            out.push((pos, tok));
            i += 1;
        }
    }
    let eof = Position {
        line: text.lines().count().max(1),
        col: text.lines().last().map_or(1, |l| l.chars().count() + 1),
    };
    out.push((eof, Tok::Eof));
    Ok(out)
}

fn is_var_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

/// Deferred semantic check, run after all declarations are known.
enum Check {
    Type(Position, String),
    Fluent {
        pos: Position,
        atom: Atom,
        ground: bool,
    },
    Action {
        pos: Position,
        atom: Atom,
    },
    Inertial(Position, String),
    Object(Position, String),
}

struct Parser {
    toks: Vec<(Position, Tok)>,
    at: usize,
    checks: Vec<Check>,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            at: 0,
            checks: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> Position {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (Position, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            found: self.peek().to_string(),
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// A non-keyword identifier.
    fn name(&mut self, what: &str) -> Result<(Position, String), ParseError> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                let pos = self.pos();
                self.bump();
                Ok((pos, s))
            }
            _ => Err(self.error(what)),
        }
    }

    fn lower_name(&mut self, what: &str) -> Result<(Position, String), ParseError> {
        let save = self.at;
        let (pos, s) = self.name(what)?;
        if is_var_name(&s) {
            self.at = save;
            return Err(self.error(what));
        }
        Ok((pos, s))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (_, s) = self.name("a variable or constant")?;
        Ok(if is_var_name(&s) {
            Term::Var(s)
        } else {
            Term::Const(s)
        })
    }

    fn atom_rest(&mut self, predicate: String) -> Result<Atom, ParseError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.error("`,` or `)`")),
                }
            }
        }
        Ok(Atom { predicate, args })
    }

    fn atom(&mut self) -> Result<(Position, Atom), ParseError> {
        let (pos, p) = self.lower_name("an atom")?;
        Ok((pos, self.atom_rest(p)?))
    }

    fn literal(&mut self) -> Result<(Position, Literal), ParseError> {
        let positive = if *self.peek() == Tok::Minus {
            self.bump();
            false
        } else {
            true
        };
        let (pos, atom) = self.atom()?;
        Ok((pos, Literal { positive, atom }))
    }

    fn body(&mut self) -> Result<Vec<BodyItem>, ParseError> {
        let mut items = Vec::new();
        loop {
            let item = if *self.peek() == Tok::Minus {
                let (pos, lit) = self.literal()?;
                self.fluent_check(pos, &lit.atom, false);
                BodyItem::Literal(lit)
            } else {
                let (pos, s) = self.name("a literal or inequality")?;
                if *self.peek() == Tok::NotEq {
                    self.bump();
                    let lhs = if is_var_name(&s) {
                        Term::Var(s)
                    } else {
                        self.checks.push(Check::Object(pos, s.clone()));
                        Term::Const(s)
                    };
                    let rpos = self.pos();
                    let rhs = self.term()?;
                    if let Term::Const(c) = &rhs {
                        self.checks.push(Check::Object(rpos, c.clone()));
                    }
                    BodyItem::NotEqual(lhs, rhs)
                } else if is_var_name(&s) {
                    return Err(ParseError::Syntax {
                        pos,
                        found: format!("variable `{s}`"),
                        expected: "an atom or `X != Y`".into(),
                    });
                } else {
                    let atom = self.atom_rest(s)?;
                    self.fluent_check(pos, &atom, false);
                    BodyItem::Literal(Literal {
                        positive: true,
                        atom,
                    })
                }
            };
            items.push(item);
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(items);
            }
        }
    }

    fn fluent_check(&mut self, pos: Position, atom: &Atom, ground: bool) {
        self.checks.push(Check::Fluent {
            pos,
            atom: atom.clone(),
            ground,
        });
    }

    fn signature(&mut self) -> Result<Signature, ParseError> {
        let (_, name) = self.lower_name("a name")?;
        let mut params = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                let (p, ty) = self.lower_name("a type name")?;
                self.checks.push(Check::Type(p, ty.clone()));
                params.push(ty);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.error("`,` or `)`")),
                }
            }
        }
        Ok(Signature { name, params })
    }

    fn statement(&mut self, desc: &mut ActionDescription) -> Result<(), ParseError> {
        let start = self.pos();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error("a statement")),
        };
        match kw.as_str() {
            "type" => {
                self.bump();
                let (p, t) = self.lower_name("a type name")?;
                if desc.types.contains(&t) {
                    return Err(ParseError::Duplicate { pos: p, name: t });
                }
                desc.types.push(t);
            }
            "object" => {
                self.bump();
                let (p, name) = self.lower_name("an object name")?;
                self.expect(Tok::Colon, "`:`")?;
                let (tp, ty) = self.lower_name("a type name")?;
                self.checks.push(Check::Type(tp, ty.clone()));
                if desc.objects.iter().any(|o| o.name == name && o.ty == ty) {
                    return Err(ParseError::Duplicate { pos: p, name });
                }
                desc.objects.push(ObjectDecl { name, ty });
            }
            "fluent" | "action" => {
                self.bump();
                let sig = self.signature()?;
                let dup = desc.fluent(&sig.name).is_some() || desc.action(&sig.name).is_some();
                if dup {
                    return Err(ParseError::Duplicate {
                        pos: start,
                        name: sig.name,
                    });
                }
                if kw == "fluent" {
                    desc.fluents.push(sig);
                } else {
                    desc.actions.push(sig);
                }
            }
            "fact" => {
                self.bump();
                let (pos, atom) = self.atom()?;
                self.fluent_check(pos, &atom, true);
                desc.facts.push(atom);
            }
            "inertial" => {
                self.bump();
                let (p, pred) = self.lower_name("a fluent name")?;
                self.checks.push(Check::Inertial(p, pred.clone()));
                desc.laws.push(CausalLaw::Inertial { predicate: pred });
            }
            "nonexecutable" => {
                self.bump();
                let (apos, action) = self.atom()?;
                self.checks.push(Check::Action {
                    pos: apos,
                    atom: action.clone(),
                });
                if !self.keyword("if") {
                    return Err(self.error("`if`"));
                }
                self.bump();
                let body = self.body()?;
                check_neq_bound(start, std::iter::once(&action), &body)?;
                desc.laws.push(CausalLaw::Nonexecutable { action, body });
            }
            k if KEYWORDS.contains(&k) => return Err(self.error("a statement")),
            _ => {
                let (hpos, head) = self.atom()?;
                if self.keyword("if") {
                    self.bump();
                    self.fluent_check(hpos, &head, false);
                    let body = self.body()?;
                    let bound = body_vars(&body);
                    if let Some(v) = head.vars().find(|v| !bound.contains(v)) {
                        return Err(ParseError::UnboundVariable {
                            pos: hpos,
                            var: v.to_string(),
                        });
                    }
                    check_neq_bound(start, std::iter::once(&head), &body)?;
                    desc.laws.push(CausalLaw::Static { head, body });
                } else if self.keyword("causes") {
                    self.bump();
                    self.checks.push(Check::Action {
                        pos: hpos,
                        atom: head.clone(),
                    });
                    let (epos, effect) = self.literal()?;
                    self.fluent_check(epos, &effect.atom, false);
                    let body = if self.keyword("if") {
                        self.bump();
                        self.body()?
                    } else {
                        Vec::new()
                    };
                    let mut bound = body_vars(&body);
                    bound.extend(head.vars());
                    if let Some(v) = effect.atom.vars().find(|v| !bound.contains(v)) {
                        return Err(ParseError::UnboundVariable {
                            pos: epos,
                            var: v.to_string(),
                        });
                    }
                    check_neq_bound(start, [&head, &effect.atom].into_iter(), &body)?;
                    desc.laws.push(CausalLaw::Dynamic {
                        action: head,
                        effect,
                        body,
                    });
                } else {
                    return Err(self.error("`if` or `causes`"));
                }
            }
        }
        self.expect(Tok::Dot, "`.`")
    }

    fn run_checks(&self, desc: &ActionDescription) -> Result<(), ParseError> {
        let objects: HashSet<&str> = desc.objects.iter().map(|o| o.name.as_str()).collect();
        let check_consts = |pos: Position, atom: &Atom, ground: bool| -> Result<(), ParseError> {
            for t in &atom.args {
                match t {
                    Term::Const(c) if !objects.contains(c.as_str()) => {
                        return Err(ParseError::Undeclared {
                            pos,
                            kind: "object",
                            name: c.clone(),
                        })
                    }
                    Term::Var(v) if ground => {
                        return Err(ParseError::Syntax {
                            pos,
                            found: format!("variable `{v}`"),
                            expected: "a ground fact".into(),
                        })
                    }
                    _ => {}
                }
            }
            Ok(())
        };
        let check_sig =
            |pos: Position, atom: &Atom, sig: Option<&Signature>, kind: &'static str| {
                let sig = sig.ok_or_else(|| ParseError::Undeclared {
                    pos,
                    kind,
                    name: atom.predicate.clone(),
                })?;
                if sig.params.len() != atom.args.len() {
                    return Err(ParseError::Arity {
                        pos,
                        name: atom.predicate.clone(),
                        expected: sig.params.len(),
                        found: atom.args.len(),
                    });
                }
                Ok(())
            };
        for c in &self.checks {
            match c {
                Check::Type(pos, t) => {
                    if !desc.types.contains(t) {
                        return Err(ParseError::Undeclared {
                            pos: *pos,
                            kind: "type",
                            name: t.clone(),
                        });
                    }
                }
                Check::Fluent { pos, atom, ground } => {
                    check_sig(*pos, atom, desc.fluent(&atom.predicate), "fluent")?;
                    check_consts(*pos, atom, *ground)?;
                }
                Check::Action { pos, atom } => {
                    check_sig(*pos, atom, desc.action(&atom.predicate), "action")?;
                    check_consts(*pos, atom, false)?;
                }
                Check::Inertial(pos, p) => {
                    if desc.fluent(p).is_none() {
                        return Err(ParseError::Undeclared {
                            pos: *pos,
                            kind: "fluent",
                            name: p.clone(),
                        });
                    }
                }
                Check::Object(pos, o) => {
                    if !objects.contains(o.as_str()) {
                        return Err(ParseError::Undeclared {
                            pos: *pos,
                            kind: "object",
                            name: o.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

fn body_vars(body: &[BodyItem]) -> HashSet<&str> {
    body.iter()
        .filter_map(|b| match b {
            BodyItem::Literal(l) => Some(l.atom.vars()),
            BodyItem::NotEqual(..) => None,
        })
        .flatten()
        .collect()
}

/// Every variable of an inequality must occur in some atom of the law.
fn check_neq_bound<'a>(
    pos: Position,
    atoms: impl Iterator<Item = &'a Atom>,
    body: &'a [BodyItem],
) -> Result<(), ParseError> {
    let mut bound = body_vars(body);
    for a in atoms {
        bound.extend(a.vars());
    }
    for b in body {
        if let BodyItem::NotEqual(x, y) = b {
            for t in [x, y] {
                if let Term::Var(v) = t {
                    if !bound.contains(v.as_str()) {
                        return Err(ParseError::UnboundVariable {
                            pos,
                            var: v.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Parses a domain file into its declarations, facts and laws.
pub fn parse_domain(text: &str) -> Result<ActionDescription, ParseError> {
    let mut p = Parser::new(text)?;
    let mut desc = ActionDescription::default();
    while *p.peek() != Tok::Eof {
        p.statement(&mut desc)?;
    }
    p.run_checks(&desc)?;
    Ok(desc)
}

/// Parses statements of the form `keyword lit, lit, ... .` where every
/// literal is ground. Used for problem files (`init ...`, `goal ...`).
pub fn parse_ground_atoms(
    text: &str,
    keywords: &[&str],
) -> Result<Vec<(Position, String, Vec<Literal>)>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        let kw = match p.peek() {
            Tok::Ident(s) if keywords.contains(&s.as_str()) => s.clone(),
            _ => return Err(p.error(&format!("one of {}", keywords.join(", ")))),
        };
        p.bump();
        let mut lits = Vec::new();
        if *p.peek() != Tok::Dot {
            loop {
                let (lpos, lit) = p.literal()?;
                if let Some(v) = lit.atom.vars().next() {
                    return Err(ParseError::Syntax {
                        pos: lpos,
                        found: format!("variable `{v}`"),
                        expected: "a ground atom".into(),
                    });
                }
                lits.push(lit);
                if *p.peek() == Tok::Comma {
                    p.bump();
                } else {
                    break;
                }
            }
        }
        p.expect(Tok::Dot, "`.`")?;
        out.push((pos, kw, lits));
    }
    Ok(out)
}
