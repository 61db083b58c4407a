//! Syntax tree of a contract document. Equality ignores source locations,
//! so two parses that differ only in layout and comments compare equal.

use std::hash::{Hash, Hasher};

use crate::span::Span;
use crate::term::Time;

/// A source location that never affects equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct Loc(pub Span);

impl PartialEq for Loc {
    fn eq(&self, _: &Loc) -> bool {
        true
    }
}

impl Eq for Loc {}

impl Hash for Loc {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ident {
    pub text: String,
    pub loc: Loc,
}

impl Ident {
    pub fn span(&self) -> Span {
        self.loc.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    pub name: Ident,
    pub items: Vec<Item>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Sort {
        name: Ident,
        constants: Vec<Ident>,
    },
    Fluent {
        name: Ident,
        params: Vec<Ident>,
    },
    Predicate {
        name: Ident,
        params: Vec<Ident>,
    },
    Action(ActionItem),
    Init {
        at: Option<Time>,
        atoms: Vec<Atom>,
        loc: Loc,
    },
    Proc {
        name: Ident,
        params: Vec<Binder>,
        body: Prog,
    },
    Program {
        name: Ident,
        body: Prog,
    },
    Property {
        name: Ident,
        on: Option<Ident>,
        kind: PropKind,
    },
}

/// `name: Sort`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: Ident,
    pub sort: Ident,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionItem {
    pub name: Ident,
    pub params: Vec<Binder>,
    pub time_var: Option<Ident>,
    pub poss: Option<Expr>,
    pub causes: Vec<Effect>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Effect {
    pub negated: bool,
    pub fluent: Ident,
    pub args: Vec<TermAst>,
    pub vars: Vec<Binder>,
    pub when: Option<Expr>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub name: Ident,
    pub args: Vec<TermAst>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimeAst {
    Value(Time, Loc),
    Unknown(Loc),
    Name(Ident),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermAst {
    Name(Ident),
    Num(Time, Loc),
    /// `start`: start time of the current situation.
    Start(Loc),
    /// `f(args)`, a literal or an action depending on position.
    App(Ident, Vec<TermAst>),
    /// `not f(args)` in literal position.
    NotLit(Ident, Vec<TermAst>, Loc),
}

impl TermAst {
    pub fn span(&self) -> Span {
        match self {
            TermAst::Name(i) | TermAst::App(i, _) => i.span(),
            TermAst::Num(_, l) | TermAst::Start(l) | TermAst::NotLit(_, _, l) => l.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Gt => ">",
            Rel::Ge => ">=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    ForAll,
    Exists,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    True(Loc),
    False(Loc),
    /// Fluent, predicate or `Obl` atom.
    Atom(Atom),
    Rel(Rel, TermAst, TermAst, Loc),
    Not(Box<Expr>, Loc),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Quant(Quant, Binder, Box<Expr>, Loc),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::True(l)
            | Expr::False(l)
            | Expr::Rel(.., l)
            | Expr::Not(_, l)
            | Expr::Quant(.., l) => l.0,
            Expr::Atom(a) => a.name.span(),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) => a.span().to(b.span()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prog {
    Nil(Loc),
    /// An action or a procedure call: `name`, `name(args)`, `name@T`,
    /// `name(args)@T`.
    Step {
        name: Ident,
        args: Option<Vec<TermAst>>,
        time: Option<TimeAst>,
    },
    Test(Expr, Loc),
    Seq(Box<Prog>, Box<Prog>),
    Choice(Box<Prog>, Box<Prog>),
    Pick(Binder, Box<Prog>, Loc),
    Star(Box<Prog>, Loc),
    If(Expr, Box<Prog>, Box<Prog>, Loc),
    While(Expr, Box<Prog>, Loc),
}

impl Prog {
    pub fn span(&self) -> Span {
        match self {
            Prog::Nil(l)
            | Prog::Test(_, l)
            | Prog::Pick(.., l)
            | Prog::Star(_, l)
            | Prog::If(.., l)
            | Prog::While(.., l) => l.0,
            Prog::Step { name, .. } => name.span(),
            Prog::Seq(a, b) | Prog::Choice(a, b) => a.span().to(b.span()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropKind {
    AtEnd(Expr),
    /// `at_end STATUS(agent, literal, deadline)`
    AtEndStatus {
        status: Ident,
        agent: TermAst,
        literal: TermAst,
        deadline: TermAst,
    },
    Always(Expr),
    Possible(Expr),
    NoViolations,
    Subtraces(Expr),
}
