//! Sorted terms: object constants, exact time points, timestamped action
//! terms, reified fluent literals and situations built from `S0` by `do`.

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;

use crate::error::{Error, Result};

/// Interned-ish identifier. Cheap to clone and share across threads.
pub type Name = Arc<str>;

/// Time points are exact rationals so comparisons are decidable.
pub type Time = Rational64;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

pub fn time(n: i64) -> Time {
    Time::from_integer(n)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    /// A user-declared sort with a finite extension.
    Object(Name),
    /// Any object sort; used by the agent slot of the obligation fluent.
    AnyObject,
    Action,
    Situation,
    Time,
    /// Reified ground fluent literals carried by obligations.
    Literal,
}

impl Sort {
    pub fn object(s: &str) -> Sort {
        Sort::Object(name(s))
    }

    /// Whether a value of sort `other` may fill a slot declared as `self`.
    pub fn accepts(&self, other: &Sort) -> bool {
        match (self, other) {
            (Sort::AnyObject, Sort::Object(_)) | (Sort::AnyObject, Sort::AnyObject) => true,
            (a, b) => a == b,
        }
    }

    pub fn is_object(&self) -> bool {
        matches!(self, Sort::Object(_) | Sort::AnyObject)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Object(n) => f.write_str(n),
            Sort::AnyObject => f.write_str("Object"),
            Sort::Action => f.write_str("Action"),
            Sort::Situation => f.write_str("Situation"),
            Sort::Time => f.write_str("Time"),
            Sort::Literal => f.write_str("Literal"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Name,
    pub sort: Sort,
}

impl Var {
    pub fn new(n: &str, sort: Sort) -> Var {
        Var {
            name: name(n),
            sort,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `symbol(args)@time`; the occurrence time is always the last component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionTerm {
    pub symbol: Name,
    pub args: Vec<Term>,
    pub time: Box<Term>,
}

impl ActionTerm {
    pub fn new(symbol: &str, args: Vec<Term>, time: Term) -> ActionTerm {
        ActionTerm {
            symbol: name(symbol),
            args,
            time: Box::new(time),
        }
    }

    /// The occurrence time of a ground action.
    pub fn time_value(&self) -> Result<Time> {
        match &*self.time {
            Term::Time(t) => Ok(*t),
            other => Err(Error::Groundness(format!(
                "action time `{other}` is not a time point"
            ))),
        }
    }

    pub fn with_time(&self, t: Time) -> ActionTerm {
        ActionTerm {
            symbol: self.symbol.clone(),
            args: self.args.clone(),
            time: Box::new(Term::Time(t)),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground) && self.time.is_ground()
    }
}

/// A reified fluent literal such as `not delivered(widget)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiteralTerm {
    pub positive: bool,
    pub fluent: Name,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// Object constant together with its sort name.
    Const(Name, Name),
    Time(Time),
    /// The symbolic `?` time, instantiated when an action is executed.
    Now,
    /// Start time of a situation.
    Start(Box<Term>),
    Action(ActionTerm),
    Lit(LiteralTerm),
    S0,
    Do(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn constant(c: &str, sort: &str) -> Term {
        Term::Const(name(c), name(sort))
    }

    pub fn var(n: &str, sort: Sort) -> Term {
        Term::Var(Var::new(n, sort))
    }

    pub fn time(n: i64) -> Term {
        Term::Time(time(n))
    }

    pub fn action(symbol: &str, args: Vec<Term>, t: Term) -> Term {
        Term::Action(ActionTerm::new(symbol, args, t))
    }

    pub fn do_(action: Term, prev: Term) -> Term {
        Term::Do(Arc::new(action), Arc::new(prev))
    }

    /// The intrinsic sort of a term. Constants and variables carry theirs.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort.clone(),
            Term::Const(_, s) => Sort::Object(s.clone()),
            Term::Time(_) | Term::Now | Term::Start(_) => Sort::Time,
            Term::Action(_) => Sort::Action,
            Term::Lit(_) => Sort::Literal,
            Term::S0 | Term::Do(..) => Sort::Situation,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) | Term::Now => false,
            Term::Const(..) | Term::Time(_) | Term::S0 => true,
            Term::Start(s) => s.is_ground(),
            Term::Action(a) => a.is_ground(),
            Term::Lit(l) => l.args.iter().all(Term::is_ground),
            Term::Do(a, s) => a.is_ground() && s.is_ground(),
        }
    }

    pub fn as_action(&self) -> Option<&ActionTerm> {
        match self {
            Term::Action(a) => Some(a),
            _ => None,
        }
    }

    /// Number of `do` applications in a situation term.
    pub fn do_depth(&self) -> usize {
        let mut depth = 0;
        let mut cur = self;
        while let Term::Do(_, prev) = cur {
            depth += 1;
            cur = prev;
        }
        depth
    }

    pub fn free_vars_into(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::Const(..) | Term::Time(_) | Term::Now | Term::S0 => {}
            Term::Start(s) => s.free_vars_into(out),
            Term::Action(a) => {
                a.args.iter().for_each(|t| t.free_vars_into(out));
                a.time.free_vars_into(out);
            }
            Term::Lit(l) => l.args.iter().for_each(|t| t.free_vars_into(out)),
            Term::Do(a, s) => {
                a.free_vars_into(out);
                s.free_vars_into(out);
            }
        }
    }

    pub fn mentions_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Const(..) | Term::Time(_) | Term::Now | Term::S0 => false,
            Term::Start(s) => s.mentions_var(v),
            Term::Action(a) => a.args.iter().any(|t| t.mentions_var(v)) || a.time.mentions_var(v),
            Term::Lit(l) => l.args.iter().any(|t| t.mentions_var(v)),
            Term::Do(a, s) => a.mentions_var(v) || s.mentions_var(v),
        }
    }
}

/// Builds the situation term for an action sequence, oldest action first.
pub fn situation_of(actions: &[ActionTerm]) -> Term {
    actions
        .iter()
        .fold(Term::S0, |s, a| Term::do_(Term::Action(a.clone()), s))
}

/// Unfolds a ground situation into its action sequence, oldest first.
pub fn situation_actions(s: &Term) -> Result<Vec<ActionTerm>> {
    let mut out = Vec::new();
    let mut cur = s;
    loop {
        match cur {
            Term::S0 => break,
            Term::Do(a, prev) => {
                match &**a {
                    Term::Action(act) if act.is_ground() => out.push(act.clone()),
                    other => {
                        return Err(Error::Groundness(format!(
                            "`{other}` is not a ground action"
                        )))
                    }
                }
                cur = prev;
            }
            other => {
                return Err(Error::Groundness(format!(
                    "`{other}` is not a ground situation"
                )))
            }
        }
    }
    out.reverse();
    Ok(out)
}

/// Proper-subtrace order on ground situations: the action sequence of `s1`
/// is a strict prefix of that of `s2`.
pub fn precedes(s1: &Term, s2: &Term) -> Result<bool> {
    let a1 = situation_actions(s1)?;
    let a2 = situation_actions(s2)?;
    Ok(a1.len() < a2.len() && a2[..a1.len()] == a1[..])
}

fn comma_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl fmt::Display for ActionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            comma_list(f, &self.args)?;
            f.write_str(")")?;
        }
        write!(f, "@{}", self.time)
    }
}

impl fmt::Display for LiteralTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("not ")?;
        }
        f.write_str(&self.fluent)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            comma_list(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c, _) => f.write_str(c),
            Term::Time(t) => write!(f, "{t}"),
            Term::Now => f.write_str("?"),
            Term::Start(s) => write!(f, "start({s})"),
            Term::Action(a) => write!(f, "{a}"),
            Term::Lit(l) => write!(f, "{l}"),
            Term::S0 | Term::Do(..) => {
                // ground prefixes print as action lists, open ones as do(..)
                match situation_actions(self) {
                    Ok(acts) => {
                        f.write_str("[")?;
                        for (i, a) in acts.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{a}")?;
                        }
                        f.write_str("]")
                    }
                    Err(_) => match self {
                        Term::Do(a, s) => write!(f, "do({a}, {s})"),
                        _ => unreachable!(),
                    },
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pay(t: i64) -> ActionTerm {
        ActionTerm::new("pay", vec![Term::constant("widget", "Item")], Term::time(t))
    }

    fn deliver(t: i64) -> ActionTerm {
        ActionTerm::new(
            "deliver",
            vec![Term::constant("widget", "Item")],
            Term::time(t),
        )
    }

    #[test]
    fn situation_actions_unfolds_oldest_first() {
        assert!(situation_actions(&Term::S0).unwrap().is_empty());
        let s = situation_of(&[pay(1), deliver(5)]);
        assert_eq!(situation_actions(&s).unwrap(), vec![pay(1), deliver(5)]);
        assert_eq!(s.do_depth(), 2);
        assert_eq!(s.to_string(), "[pay(widget)@1, deliver(widget)@5]");
        assert_eq!(Term::S0.to_string(), "[]");
    }

    #[test]
    fn precedes_examples() {
        let s1 = situation_of(&[pay(1)]);
        assert!(precedes(&Term::S0, &s1).unwrap());
        assert!(!precedes(&s1, &Term::S0).unwrap());
        assert!(!precedes(&Term::S0, &Term::S0).unwrap());
        assert!(!precedes(&s1, &s1).unwrap());
    }

    #[test]
    fn precedes_rejects_open_situations() {
        let open = Term::do_(Term::Action(pay(1)), Term::var("s", Sort::Situation));
        assert!(matches!(
            precedes(&open, &Term::S0),
            Err(Error::Groundness(_))
        ));
        let open_action = Term::do_(
            Term::action(
                "pay",
                vec![Term::var("i", Sort::object("Item"))],
                Term::time(1),
            ),
            Term::S0,
        );
        assert!(situation_actions(&open_action).is_err());
    }

    #[test]
    fn rational_times_render_exactly() {
        let a = ActionTerm::new("tick", vec![], Term::Time(Time::new(3, 2)));
        assert_eq!(a.to_string(), "tick@3/2");
        assert_eq!(a.time_value().unwrap(), Time::new(6, 4));
    }

    #[test]
    fn any_object_accepts_user_sorts() {
        assert!(Sort::AnyObject.accepts(&Sort::object("Agent")));
        assert!(!Sort::object("Agent").accepts(&Sort::object("Item")));
        assert!(!Sort::AnyObject.accepts(&Sort::Time));
    }
}
