//! First-order formulas over fluents, rigid predicates, equality, time
//! comparisons, `Poss` and the proper-subtrace relation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::term::{name, ActionTerm, LiteralTerm, Name, Sort, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
}

impl CmpOp {
    pub fn apply<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// `fluent(args, situation)`; the situation is the last argument.
    Fluent {
        fluent: Name,
        args: Vec<Term>,
        sit: Term,
    },
    /// Situation-independent predicate.
    Rigid {
        pred: Name,
        args: Vec<Term>,
    },
    Eq(Term, Term),
    TimeCmp(CmpOp, Term, Term),
    Poss(Term, Term),
    Precedes(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForAll(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

/// Name of the situation variable that stands for "the current situation"
/// in situation-suppressed formulas written by users.
pub const NOW: &str = "now";

pub fn now_var() -> Var {
    Var::new(NOW, Sort::Situation)
}

pub fn now() -> Term {
    Term::Var(now_var())
}

impl Formula {
    pub fn fluent(f: &str, args: Vec<Term>, sit: Term) -> Formula {
        Formula::Fluent {
            fluent: name(f),
            args,
            sit,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::ForAll(v, Box::new(body))
    }

    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.free_vars_rec(&mut Vec::new(), &mut out);
        out
    }

    fn free_vars_rec(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        let push_term = |t: &Term, bound: &Vec<Var>, out: &mut Vec<Var>| {
            let mut vs = Vec::new();
            t.free_vars_into(&mut vs);
            for v in vs {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Fluent { args, sit, .. } => {
                args.iter().for_each(|t| push_term(t, bound, out));
                push_term(sit, bound, out);
            }
            Formula::Rigid { args, .. } => args.iter().for_each(|t| push_term(t, bound, out)),
            Formula::Eq(a, b)
            | Formula::TimeCmp(_, a, b)
            | Formula::Poss(a, b)
            | Formula::Precedes(a, b) => {
                push_term(a, bound, out);
                push_term(b, bound, out);
            }
            Formula::Not(f) => f.free_vars_rec(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.free_vars_rec(bound, out))
            }
            Formula::Implies(a, b) => {
                a.free_vars_rec(bound, out);
                b.free_vars_rec(bound, out);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.free_vars_rec(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Visits every term occurring directly in an atom.
    pub fn any_term(&self, pred: &mut dyn FnMut(&Term) -> bool) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Fluent { args, sit, .. } => args.iter().any(&mut *pred) || pred(sit),
            Formula::Rigid { args, .. } => args.iter().any(pred),
            Formula::Eq(a, b)
            | Formula::TimeCmp(_, a, b)
            | Formula::Poss(a, b)
            | Formula::Precedes(a, b) => pred(a) || pred(b),
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => f.any_term(pred),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.any_term(pred)),
            Formula::Implies(a, b) => a.any_term(pred) || b.any_term(pred),
        }
    }

    pub fn any_atom(&self, pred: &mut dyn FnMut(&Formula) -> bool) -> bool {
        match self {
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => f.any_atom(pred),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(|f| f.any_atom(pred)),
            Formula::Implies(a, b) => a.any_atom(pred) || b.any_atom(pred),
            atom => pred(atom),
        }
    }

    /// Replaces the free situation placeholder `now` by `sit`.
    pub fn at(&self, sit: &Term) -> Formula {
        let mut sub = Substitution::new();
        sub.insert_unchecked(now_var(), sit.clone());
        sub.apply(self)
    }
}

/// A finite map from variables to terms of matching sort.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a binding, rejecting sort mismatches.
    pub fn bind(&mut self, v: Var, t: Term) -> Result<()> {
        let ts = t.sort();
        if !v.sort.accepts(&ts) {
            return Err(Error::Sort(format!(
                "cannot bind {}:{} to `{t}` of sort {ts}",
                v.name, v.sort
            )));
        }
        self.map.insert(v, t);
        Ok(())
    }

    pub fn insert_unchecked(&mut self, v: Var, t: Term) {
        self.map.insert(v, t);
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Result<Self> {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            s.bind(v, t)?;
        }
        Ok(s)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(..) | Term::Time(_) | Term::Now | Term::S0 => t.clone(),
            Term::Start(s) => Term::Start(Box::new(self.apply_term(s))),
            Term::Action(a) => Term::Action(self.apply_action(a)),
            Term::Lit(l) => Term::Lit(LiteralTerm {
                positive: l.positive,
                fluent: l.fluent.clone(),
                args: l.args.iter().map(|x| self.apply_term(x)).collect(),
            }),
            Term::Do(..) if t.is_ground() => t.clone(),
            Term::Do(a, s) => Term::Do(Arc::new(self.apply_term(a)), Arc::new(self.apply_term(s))),
        }
    }

    pub fn apply_action(&self, a: &ActionTerm) -> ActionTerm {
        ActionTerm {
            symbol: a.symbol.clone(),
            args: a.args.iter().map(|x| self.apply_term(x)).collect(),
            time: Box::new(self.apply_term(&a.time)),
        }
    }

    /// Applies the substitution to free occurrences, renaming bound
    /// variables apart when they would capture a substituted variable.
    pub fn apply(&self, f: &Formula) -> Formula {
        if self.map.is_empty() {
            return f.clone();
        }
        let mut counter = 0usize;
        self.apply_rec(f, &mut counter)
    }

    fn apply_rec(&self, f: &Formula, counter: &mut usize) -> Formula {
        let t = |x: &Term| self.apply_term(x);
        match f {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Fluent { fluent, args, sit } => Formula::Fluent {
                fluent: fluent.clone(),
                args: args.iter().map(t).collect(),
                sit: t(sit),
            },
            Formula::Rigid { pred, args } => Formula::Rigid {
                pred: pred.clone(),
                args: args.iter().map(t).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(t(a), t(b)),
            Formula::TimeCmp(op, a, b) => Formula::TimeCmp(*op, t(a), t(b)),
            Formula::Poss(a, s) => Formula::Poss(t(a), t(s)),
            Formula::Precedes(a, b) => Formula::Precedes(t(a), t(b)),
            Formula::Not(g) => Formula::Not(Box::new(self.apply_rec(g, counter))),
            Formula::And(gs) => {
                Formula::And(gs.iter().map(|g| self.apply_rec(g, counter)).collect())
            }
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.apply_rec(g, counter)).collect()),
            Formula::Implies(a, b) => Formula::Implies(
                Box::new(self.apply_rec(a, counter)),
                Box::new(self.apply_rec(b, counter)),
            ),
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let (v2, inner) = self.bind_under(v, body, counter);
                match f {
                    Formula::ForAll(..) => Formula::ForAll(v2, Box::new(inner)),
                    _ => Formula::Exists(v2, Box::new(inner)),
                }
            }
        }
    }

    fn bind_under(&self, v: &Var, body: &Formula, counter: &mut usize) -> (Var, Formula) {
        let shadows = self.map.contains_key(v);
        if !shadows && !self.map.values().any(|t| t.mentions_var(v)) {
            return (v.clone(), self.apply_rec(body, counter));
        }
        // the binder shadows v itself
        let mut inner_sub = self.clone();
        inner_sub.map.remove(v);
        let body_free = body.free_vars();
        let captures = inner_sub
            .map
            .iter()
            .any(|(dv, t)| body_free.contains(dv) && t.mentions_var(v));
        if !captures {
            return (v.clone(), inner_sub.apply_rec(body, counter));
        }
        let fresh = loop {
            *counter += 1;
            let candidate = Var {
                name: name(&format!("{}_{}", v.name, counter)),
                sort: v.sort.clone(),
            };
            let clash = body_free.contains(&candidate)
                || inner_sub.map.keys().any(|k| *k == candidate)
                || inner_sub.map.values().any(|t| t.mentions_var(&candidate));
            if !clash {
                break candidate;
            }
        };
        inner_sub.map.insert(v.clone(), Term::Var(fresh.clone()));
        (fresh, inner_sub.apply_rec(body, counter))
    }
}

/// Outcome of deciding a term equality syntactically.
enum EqDecision {
    True,
    False,
    Open(Formula),
}

fn decide_eq(a: &Term, b: &Term) -> EqDecision {
    if a == b {
        return EqDecision::True;
    }
    match (a, b) {
        (Term::Const(x, _), Term::Const(y, _)) => {
            if x == y {
                EqDecision::True
            } else {
                EqDecision::False
            }
        }
        (Term::Time(x), Term::Time(y)) => {
            if x == y {
                EqDecision::True
            } else {
                EqDecision::False
            }
        }
        (Term::Action(x), Term::Action(y)) => {
            if x.symbol != y.symbol || x.args.len() != y.args.len() {
                return EqDecision::False;
            }
            let pairs = x
                .args
                .iter()
                .zip(&y.args)
                .chain(std::iter::once((&*x.time, &*y.time)));
            decide_conj(pairs)
        }
        (Term::Lit(x), Term::Lit(y)) => {
            if x.positive != y.positive || x.fluent != y.fluent || x.args.len() != y.args.len() {
                return EqDecision::False;
            }
            decide_conj(x.args.iter().zip(&y.args))
        }
        (Term::S0, Term::Do(..)) | (Term::Do(..), Term::S0) => EqDecision::False,
        (Term::Do(a1, s1), Term::Do(a2, s2)) => {
            decide_conj([(&**a1, &**a2), (&**s1, &**s2)].into_iter())
        }
        _ if a.is_ground()
            && b.is_ground()
            && !matches!(a, Term::Start(_))
            && !matches!(b, Term::Start(_)) =>
        {
            EqDecision::False
        }
        _ => EqDecision::Open(Formula::Eq(a.clone(), b.clone())),
    }
}

fn decide_conj<'a>(pairs: impl Iterator<Item = (&'a Term, &'a Term)>) -> EqDecision {
    let mut open = Vec::new();
    for (x, y) in pairs {
        match decide_eq(x, y) {
            EqDecision::True => {}
            EqDecision::False => return EqDecision::False,
            EqDecision::Open(f) => open.push(f),
        }
    }
    match open.len() {
        0 => EqDecision::True,
        1 => EqDecision::Open(open.pop().unwrap()),
        _ => EqDecision::Open(Formula::And(open)),
    }
}

/// Boolean and unique-names simplification. Ground equalities are decided
/// syntactically, ground time comparisons arithmetically, and constants are
/// absorbed through connectives and quantifiers. Equalities involving
/// variables are left symbolic unless unique names already decide them.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Eq(a, b) => match decide_eq(a, b) {
            EqDecision::True => Formula::True,
            EqDecision::False => Formula::False,
            EqDecision::Open(g) => g,
        },
        Formula::TimeCmp(op, Term::Time(a), Term::Time(b)) => bool_formula(op.apply(a, b)),
        Formula::TimeCmp(op, a, b) if a == b => bool_formula(*op != CmpOp::Lt),
        Formula::Not(g) => match simplify(g) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(h) => *h,
            h => Formula::Not(Box::new(h)),
        },
        Formula::And(gs) => {
            let mut out = Vec::with_capacity(gs.len());
            for g in gs {
                match simplify(g) {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    Formula::And(hs) => out.extend(hs),
                    h => out.push(h),
                }
            }
            match out.len() {
                0 => Formula::True,
                1 => out.pop().unwrap(),
                _ => Formula::And(out),
            }
        }
        Formula::Or(gs) => {
            let mut out = Vec::with_capacity(gs.len());
            for g in gs {
                match simplify(g) {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    Formula::Or(hs) => out.extend(hs),
                    h => out.push(h),
                }
            }
            match out.len() {
                0 => Formula::False,
                1 => out.pop().unwrap(),
                _ => Formula::Or(out),
            }
        }
        Formula::Implies(a, b) => match (simplify(a), simplify(b)) {
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (Formula::True, h) => h,
            (h, Formula::False) => simplify(&Formula::not(h)),
            (x, y) => Formula::implies(x, y),
        },
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let inner = simplify(body);
            match inner {
                // sort extensions are nonempty, so constants pass through
                Formula::True | Formula::False => inner,
                _ if !inner.free_vars().contains(v) => inner,
                _ => match f {
                    Formula::ForAll(..) => Formula::ForAll(v.clone(), Box::new(inner)),
                    _ => Formula::Exists(v.clone(), Box::new(inner)),
                },
            }
        }
        other => other.clone(),
    }
}

fn bool_formula(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

fn write_args(
    f: &mut fmt::Formatter<'_>,
    head: &str,
    args: &[Term],
    extra: Option<&Term>,
) -> fmt::Result {
    f.write_str(head)?;
    if args.is_empty() && extra.is_none() {
        return Ok(());
    }
    f.write_str("(")?;
    let mut first = true;
    for a in args.iter().chain(extra) {
        if !first {
            f.write_str(", ")?;
        }
        first = false;
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl Formula {
    fn is_atomic(&self) -> bool {
        !matches!(
            self,
            Formula::And(_)
                | Formula::Or(_)
                | Formula::Implies(..)
                | Formula::ForAll(..)
                | Formula::Exists(..)
        )
    }
}

struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_atomic() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Fluent { fluent, args, sit } => write_args(f, fluent, args, Some(sit)),
            Formula::Rigid { pred, args } => write_args(f, pred, args, None),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::TimeCmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Formula::Poss(a, s) => write!(f, "poss({a}, {s})"),
            Formula::Precedes(a, b) => write!(f, "precedes({a}, {b})"),
            Formula::Not(g) => write!(f, "not {}", Paren(g)),
            Formula::And(gs) | Formula::Or(gs) => {
                let sep = if matches!(self, Formula::And(_)) {
                    " & "
                } else {
                    " | "
                };
                if gs.is_empty() {
                    return f.write_str(if matches!(self, Formula::And(_)) {
                        "true"
                    } else {
                        "false"
                    });
                }
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{}", Paren(g))?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => write!(f, "{} -> {}", Paren(a), Paren(b)),
            Formula::ForAll(v, body) => write!(f, "forall {}:{} . {}", v.name, v.sort, body),
            Formula::Exists(v, body) => write!(f, "exists {}:{} . {}", v.name, v.sort, body),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn widget() -> Term {
        Term::constant("widget", "Item")
    }

    fn x() -> Var {
        Var::new("x", Sort::object("Item"))
    }

    fn s() -> Term {
        Term::var("s", Sort::Situation)
    }

    fn paid(arg: Term) -> Formula {
        Formula::fluent("paid", vec![arg], s())
    }

    #[test]
    fn substitute_replaces_free_occurrence() {
        let sub = Substitution::from_pairs([(x(), widget())]).unwrap();
        assert_eq!(sub.apply(&paid(Term::Var(x()))), paid(widget()));
    }

    #[test]
    fn empty_substitution_is_identity() {
        let f = Formula::And(vec![paid(Term::Var(x())), Formula::not(Formula::True)]);
        assert_eq!(Substitution::new().apply(&f), f);
    }

    #[test]
    fn substitute_leaves_bound_occurrences() {
        let f = Formula::exists(x(), paid(Term::Var(x())));
        let sub = Substitution::from_pairs([(x(), widget())]).unwrap();
        assert_eq!(sub.apply(&f), f);
    }

    #[test]
    fn substitute_rejects_sort_mismatch() {
        let err = Substitution::from_pairs([(x(), Term::time(3))]).unwrap_err();
        assert!(matches!(err, Error::Sort(_)));
    }

    #[test]
    fn substitute_renames_apart_to_avoid_capture() {
        // forall x. y = x   with y := x   must not become forall x. x = x
        let y = Var::new("y", Sort::object("Item"));
        let f = Formula::forall(x(), Formula::Eq(Term::Var(y.clone()), Term::Var(x())));
        let mut sub = Substitution::new();
        sub.bind(y, Term::Var(x())).unwrap();
        let out = sub.apply(&f);
        match &out {
            Formula::ForAll(v, body) => {
                assert_ne!(v, &x());
                assert_eq!(**body, Formula::Eq(Term::Var(x()), Term::Var(v.clone())));
            }
            other => panic!("unexpected {other}"),
        }
        // deterministic renaming
        assert_eq!(out, sub.apply(&f));
    }

    #[test]
    fn simplify_examples() {
        let pay1 = Term::action("pay", vec![widget()], Term::time(1));
        let deliver1 = Term::action("deliver", vec![widget()], Term::time(1));
        let phi = paid(widget());
        assert_eq!(
            simplify(&Formula::Or(vec![
                Formula::Eq(pay1.clone(), pay1.clone()),
                phi.clone()
            ])),
            Formula::True
        );
        assert_eq!(simplify(&Formula::Eq(pay1, deliver1)), Formula::False);
        assert_eq!(
            simplify(&Formula::And(vec![
                Formula::TimeCmp(CmpOp::Le, Term::time(3), Term::time(5)),
                phi.clone()
            ])),
            phi
        );
    }

    #[test]
    fn simplify_keeps_open_equalities_symbolic() {
        let f = Formula::Eq(Term::Var(x()), widget());
        assert_eq!(simplify(&f), f);
        // same symbol, decompose to argument equality
        let a = Term::action("pay", vec![Term::Var(x())], Term::time(1));
        let b = Term::action("pay", vec![widget()], Term::time(1));
        assert_eq!(simplify(&Formula::Eq(a, b)), f);
        // different times decide false even with open args
        let c = Term::action("pay", vec![Term::Var(x())], Term::time(2));
        let d = Term::action("pay", vec![widget()], Term::time(1));
        assert_eq!(simplify(&Formula::Eq(c, d)), Formula::False);
    }

    #[test]
    fn simplify_drops_vacuous_quantifier() {
        let f = Formula::exists(x(), paid(widget()));
        assert_eq!(simplify(&f), paid(widget()));
    }

    #[test]
    fn display_is_infix() {
        let f = Formula::implies(
            Formula::And(vec![
                paid(widget()),
                Formula::Or(vec![Formula::True, Formula::False]),
            ]),
            Formula::not(paid(widget())),
        );
        assert_eq!(
            f.to_string(),
            "(paid(widget, s) & (true | false)) -> not paid(widget, s)"
        );
    }
}
