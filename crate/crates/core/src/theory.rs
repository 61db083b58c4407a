//! Basic contractual theories: declarations, precondition axioms,
//! successor state axioms compiled from effect clauses, the initial
//! database and the time axioms.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::formula::{now_var, Formula, Substitution};
use crate::obligation;
use crate::span::Span;
use crate::term::{name, ActionTerm, Name, Sort, Term, Time, Var};

pub const OBLIGE: &str = "oblige";
pub const RELEASE: &str = "release";
pub const OBL: &str = "Obl";

pub fn is_reserved_action(symbol: &str) -> bool {
    symbol == OBLIGE || symbol == RELEASE
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluentDecl {
    pub name: Name,
    pub params: Vec<Sort>,
    pub span: Option<Span>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredicateDecl {
    pub name: Name,
    pub params: Vec<Sort>,
    pub span: Option<Span>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionDecl {
    pub name: Name,
    pub params: Vec<Var>,
    pub time_var: Var,
    pub span: Option<Span>,
}

impl ActionDecl {
    pub fn param_sorts(&self) -> impl Iterator<Item = &Sort> {
        self.params.iter().map(|v| &v.sort)
    }
}

/// `Poss(A(params)@t, now) <-> rhs`, with `rhs` uniform in `now`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreconditionAxiom {
    pub action: Name,
    pub params: Vec<Var>,
    pub time_var: Var,
    pub rhs: Formula,
    pub span: Option<Span>,
}

impl PreconditionAxiom {
    /// The right-hand side instantiated for a concrete action at `sit`.
    pub fn instantiate(&self, action: &ActionTerm, sit: &Term) -> Formula {
        let mut sub = Substitution::new();
        for (v, t) in self.params.iter().zip(&action.args) {
            sub.insert_unchecked(v.clone(), t.clone());
        }
        sub.insert_unchecked(self.time_var.clone(), (*action.time).clone());
        sub.insert_unchecked(now_var(), sit.clone());
        sub.apply(&self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    MakesTrue,
    MakesFalse,
}

/// `A(params)@t causes [not] F(args) when guard`. Variables of `fluent_args`
/// or `guard` that are not action parameters must be listed in `extra`.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectClause {
    pub action: Name,
    pub params: Vec<Var>,
    pub time_var: Var,
    pub polarity: Polarity,
    pub fluent: Name,
    pub fluent_args: Vec<Term>,
    pub extra: Vec<Var>,
    pub guard: Formula,
    pub span: Option<Span>,
}

/// One disjunct of a successor state axiom's positive or negative
/// condition.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectCase {
    pub action: Name,
    pub params: Vec<Var>,
    pub time_var: Var,
    pub extra: Vec<Var>,
    pub fluent_args: Vec<Term>,
    pub guard: Formula,
    pub span: Option<Span>,
}

impl EffectCase {
    /// Binds the action parameters and time variable to the components of
    /// a concrete action with the same symbol.
    pub fn action_binding(&self, action: &ActionTerm) -> Substitution {
        let mut sub = Substitution::new();
        for (v, t) in self.params.iter().zip(&action.args) {
            sub.insert_unchecked(v.clone(), t.clone());
        }
        sub.insert_unchecked(self.time_var.clone(), (*action.time).clone());
        sub
    }

    /// `exists extra . args = fluent_args & guard` for the fluent instance
    /// `args`, the concrete action `action` and situation `sit`.
    pub fn condition_for(&self, args: &[Term], action: &ActionTerm, sit: &Term) -> Formula {
        // instance args go through formals so the extra binders are renamed
        // apart from any variables they contain
        let formals: Vec<Var> = args
            .iter()
            .enumerate()
            .map(|(i, a)| Var::new(&format!("x#{}", i + 1), a.sort()))
            .collect();
        let mut parts: Vec<Formula> = formals
            .iter()
            .zip(&self.fluent_args)
            .map(|(x, p)| Formula::Eq(Term::Var(x.clone()), p.clone()))
            .collect();
        parts.push(self.guard.clone());
        let body = self.extra.iter().rev().fold(Formula::And(parts), |acc, v| {
            Formula::exists(v.clone(), acc)
        });
        let mut sub = self.action_binding(action);
        sub.insert_unchecked(now_var(), sit.clone());
        for (x, a) in formals.into_iter().zip(args) {
            sub.insert_unchecked(x, a.clone());
        }
        sub.apply(&body)
    }

    fn view(&self, formals: &[Var], action_var: &Var) -> Formula {
        let pattern = Term::action(
            &self.action,
            self.params.iter().cloned().map(Term::Var).collect(),
            Term::Var(self.time_var.clone()),
        );
        let mut parts = vec![Formula::Eq(Term::Var(action_var.clone()), pattern)];
        parts.extend(
            formals
                .iter()
                .zip(&self.fluent_args)
                .map(|(x, p)| Formula::Eq(Term::Var(x.clone()), p.clone())),
        );
        if self.guard != Formula::True {
            parts.push(self.guard.clone());
        }
        let mut body = Formula::And(parts);
        for v in self.extra.iter().rev() {
            body = Formula::exists(v.clone(), body);
        }
        body = Formula::exists(self.time_var.clone(), body);
        for v in self.params.iter().rev() {
            body = Formula::exists(v.clone(), body);
        }
        body
    }
}

/// `F(x, do(a, s)) <-> gamma_plus | (F(x, s) & not gamma_minus)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessorStateAxiom {
    pub fluent: Name,
    pub params: Vec<Var>,
    pub positive: Vec<EffectCase>,
    pub negative: Vec<EffectCase>,
    pub span: Option<Span>,
}

pub fn action_var() -> Var {
    Var::new("a", Sort::Action)
}

impl SuccessorStateAxiom {
    pub fn frame_only(fluent: &FluentDecl) -> Self {
        SuccessorStateAxiom {
            fluent: fluent.name.clone(),
            params: formal_params(&fluent.params),
            positive: Vec::new(),
            negative: Vec::new(),
            span: fluent.span,
        }
    }

    pub fn cases(&self, polarity: Polarity) -> &[EffectCase] {
        match polarity {
            Polarity::MakesTrue => &self.positive,
            Polarity::MakesFalse => &self.negative,
        }
    }

    /// The disjunction of cases as a formula over the formal parameters,
    /// the action variable `a` and the situation `now`.
    pub fn gamma(&self, polarity: Polarity) -> Formula {
        let a = action_var();
        let cases = self.cases(polarity);
        match cases.len() {
            0 => Formula::False,
            1 => cases[0].view(&self.params, &a),
            _ => Formula::Or(cases.iter().map(|c| c.view(&self.params, &a)).collect()),
        }
    }

    /// The condition instantiated for fluent arguments `args`, ground action
    /// `action` and predecessor situation `sit`.
    pub fn instantiate(
        &self,
        polarity: Polarity,
        args: &[Term],
        action: &ActionTerm,
        sit: &Term,
    ) -> Formula {
        let parts: Vec<Formula> = self
            .cases(polarity)
            .iter()
            .filter(|c| c.action == action.symbol)
            .map(|c| c.condition_for(args, action, sit))
            .collect();
        match parts.len() {
            0 => Formula::False,
            1 => parts.into_iter().next().unwrap(),
            _ => Formula::Or(parts),
        }
    }
}

impl fmt::Display for SuccessorStateAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.params.iter().map(|v| v.name.to_string()).collect();
        let sep = if args.is_empty() { "" } else { ", " };
        write!(
            f,
            "{}({}{sep}do(a, now)) <-> ({}) | ({}({}{sep}now) & not ({}))",
            self.fluent,
            args.join(", "),
            self.gamma(Polarity::MakesTrue),
            self.fluent,
            args.join(", "),
            self.gamma(Polarity::MakesFalse),
        )
    }
}

pub fn formal_params(sorts: &[Sort]) -> Vec<Var> {
    sorts
        .iter()
        .enumerate()
        .map(|(i, s)| Var::new(&format!("x#{}", i + 1), s.clone()))
        .collect()
}

/// A ground atom: fluent instance without its situation, or a rigid fact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub symbol: Name,
    pub args: Vec<Term>,
}

impl GroundAtom {
    pub fn new(symbol: &str, args: Vec<Term>) -> Self {
        GroundAtom {
            symbol: name(symbol),
            args,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
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

/// Fluent atoms true at `S0`; everything else is false there.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InitialDatabase {
    pub facts: BTreeSet<GroundAtom>,
    pub rigid: BTreeSet<GroundAtom>,
    pub start: Time,
    pub span: Option<Span>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractTheory {
    pub name: String,
    /// Object sorts with their extensions in declaration order.
    pub sorts: IndexMap<Name, Vec<Name>>,
    pub sort_spans: IndexMap<Name, Span>,
    pub fluents: IndexMap<Name, FluentDecl>,
    pub predicates: IndexMap<Name, PredicateDecl>,
    pub actions: IndexMap<Name, ActionDecl>,
    pub preconditions: Vec<PreconditionAxiom>,
    pub ssas: Vec<SuccessorStateAxiom>,
    pub init: InitialDatabase,
}

impl ContractTheory {
    /// An empty theory holding only the obligation fluent, its successor
    /// state axiom and the two obligation actions.
    pub fn new(name: &str) -> Self {
        let mut th = ContractTheory {
            name: name.to_string(),
            sorts: IndexMap::new(),
            sort_spans: IndexMap::new(),
            fluents: IndexMap::new(),
            predicates: IndexMap::new(),
            actions: IndexMap::new(),
            preconditions: Vec::new(),
            ssas: Vec::new(),
            init: InitialDatabase::default(),
        };
        let obl = obligation::obligation_fluent();
        th.fluents.insert(obl.name.clone(), obl);
        for act in [OBLIGE, RELEASE] {
            let decl = obligation::obligation_action(act);
            th.preconditions.push(PreconditionAxiom {
                action: decl.name.clone(),
                params: decl.params.clone(),
                time_var: decl.time_var.clone(),
                rhs: Formula::True,
                span: None,
            });
            th.actions.insert(decl.name.clone(), decl);
        }
        th.ssas.push(obligation::obligation_ssa());
        th
    }

    pub fn add_sort(&mut self, sort: &str, constants: &[&str]) -> &mut Self {
        self.sorts
            .insert(name(sort), constants.iter().map(|c| name(c)).collect());
        self
    }

    pub fn add_fluent(&mut self, fluent: &str, params: Vec<Sort>) -> &mut Self {
        self.fluents.insert(
            name(fluent),
            FluentDecl {
                name: name(fluent),
                params,
                span: None,
            },
        );
        self
    }

    /// Declares an action with its precondition (default `true`).
    pub fn add_action(&mut self, decl: ActionDecl, poss: Option<Formula>) -> &mut Self {
        if let Some(existing) = self
            .preconditions
            .iter_mut()
            .find(|p| p.action == decl.name)
        {
            if let Some(rhs) = poss {
                existing.rhs = rhs;
            }
        } else {
            self.preconditions.push(PreconditionAxiom {
                action: decl.name.clone(),
                params: decl.params.clone(),
                time_var: decl.time_var.clone(),
                rhs: poss.unwrap_or(Formula::True),
                span: decl.span,
            });
        }
        self.actions.insert(decl.name.clone(), decl);
        self
    }

    /// Compiles effect clauses into successor state axioms for every user
    /// fluent, replacing any previously installed user axioms.
    pub fn install_effects(&mut self, clauses: &[EffectClause]) -> Result<()> {
        let user: IndexMap<Name, FluentDecl> = self
            .fluents
            .iter()
            .filter(|(n, _)| &***n != OBL)
            .map(|(n, d)| (n.clone(), d.clone()))
            .collect();
        let ssas = compile_effects(clauses, &user, &self.actions)?;
        self.ssas.retain(|s| &*s.fluent == OBL);
        self.ssas.extend(ssas);
        Ok(())
    }

    pub fn ssa(&self, fluent: &str) -> Option<&SuccessorStateAxiom> {
        self.ssas.iter().find(|s| &*s.fluent == fluent)
    }

    pub fn precondition(&self, action: &str) -> Option<&PreconditionAxiom> {
        self.preconditions.iter().find(|p| &*p.action == action)
    }

    pub fn constant_sort(&self, c: &str) -> Option<&Name> {
        self.sorts
            .iter()
            .find(|(_, cs)| cs.iter().any(|x| &**x == c))
            .map(|(s, _)| s)
    }

    pub fn constant(&self, c: &str) -> Option<Term> {
        self.constant_sort(c)
            .map(|s| Term::Const(name(c), s.clone()))
    }

    /// The finite extension of a sort.
    pub fn domain(&self, sort: &Sort) -> Result<Vec<Term>> {
        match sort {
            Sort::Object(s) => self
                .sorts
                .get(s)
                .map(|cs| {
                    cs.iter()
                        .map(|c| Term::Const(c.clone(), s.clone()))
                        .collect()
                })
                .ok_or_else(|| Error::Evaluation(format!("unknown sort {s}"))),
            Sort::AnyObject => Ok(self
                .sorts
                .iter()
                .flat_map(|(s, cs)| cs.iter().map(move |c| Term::Const(c.clone(), s.clone())))
                .collect()),
            other => Err(Error::Evaluation(format!(
                "cannot quantify over infinite sort {other}"
            ))),
        }
    }

    /// Ground user actions (reserved ones excluded) with their time left
    /// symbolic, in declaration order.
    pub fn ground_actions(&self) -> Result<Vec<ActionTerm>> {
        let mut out = Vec::new();
        for decl in self
            .actions
            .values()
            .filter(|d| !is_reserved_action(&d.name))
        {
            let domains = decl
                .params
                .iter()
                .map(|v| self.domain(&v.sort))
                .collect::<Result<Vec<_>>>()?;
            for args in cartesian(&domains) {
                out.push(ActionTerm {
                    symbol: decl.name.clone(),
                    args,
                    time: Box::new(Term::Now),
                });
            }
        }
        Ok(out)
    }

    pub fn user_fluents(&self) -> impl Iterator<Item = &FluentDecl> {
        self.fluents.values().filter(|f| &*f.name != OBL)
    }
}

/// All tuples drawn from the given domains, leftmost varying slowest.
pub fn cartesian(domains: &[Vec<Term>]) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        let mut next = Vec::with_capacity(out.len() * d.len());
        for prefix in &out {
            for v in d {
                let mut row = prefix.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Causal completion: one successor state axiom per declared fluent, whose
/// positive and negative conditions have one case per clause of matching
/// polarity. Fluents without clauses get a pure frame axiom.
pub fn compile_effects(
    clauses: &[EffectClause],
    fluents: &IndexMap<Name, FluentDecl>,
    actions: &IndexMap<Name, ActionDecl>,
) -> Result<Vec<SuccessorStateAxiom>> {
    for c in clauses {
        if !fluents.contains_key(&c.fluent) {
            return Err(Error::Validation(vec![crate::span::Diagnostic::error(
                format!("effect clause on undeclared fluent {}", c.fluent),
                c.span,
            )]));
        }
        if !actions.contains_key(&c.action) {
            return Err(Error::Validation(vec![crate::span::Diagnostic::error(
                format!("effect clause on undeclared action {}", c.action),
                c.span,
            )]));
        }
    }
    let mut out = Vec::with_capacity(fluents.len());
    for decl in fluents.values() {
        let mut ssa = SuccessorStateAxiom::frame_only(decl);
        for c in clauses.iter().filter(|c| c.fluent == decl.name) {
            let case = EffectCase {
                action: c.action.clone(),
                params: c.params.clone(),
                time_var: c.time_var.clone(),
                extra: c.extra.clone(),
                fluent_args: c.fluent_args.clone(),
                guard: c.guard.clone(),
                span: c.span,
            };
            match c.polarity {
                Polarity::MakesTrue => ssa.positive.push(case),
                Polarity::MakesFalse => ssa.negative.push(case),
            }
        }
        out.push(ssa);
    }
    Ok(out)
}

pub fn action_time(a: &ActionTerm) -> Result<Time> {
    a.time_value()
}

/// Start time of a ground situation: the initial start for `S0`, the
/// occurrence time of the last action otherwise.
pub fn start(s: &Term, theory: &ContractTheory) -> Result<Time> {
    match s {
        Term::S0 => Ok(theory.init.start),
        Term::Do(a, _) => match &**a {
            Term::Action(act) => act.time_value(),
            other => Err(Error::Groundness(format!("`{other}` is not an action"))),
        },
        other => Err(Error::Groundness(format!(
            "`{other}` is not a ground situation"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::situation_of;

    fn item() -> Sort {
        Sort::object("Item")
    }

    fn sale() -> ContractTheory {
        let mut th = ContractTheory::new("sale");
        th.add_sort("Item", &["widget"])
            .add_fluent("paid", vec![item()])
            .add_fluent("delivered", vec![item()]);
        for a in ["pay", "deliver"] {
            th.add_action(
                ActionDecl {
                    name: name(a),
                    params: vec![Var::new("i", item())],
                    time_var: Var::new("t", Sort::Time),
                    span: None,
                },
                None,
            );
        }
        th
    }

    fn clause(action: &str, polarity: Polarity, fluent: &str) -> EffectClause {
        EffectClause {
            action: name(action),
            params: vec![Var::new("i", item())],
            time_var: Var::new("t", Sort::Time),
            polarity,
            fluent: name(fluent),
            fluent_args: vec![Term::var("i", item())],
            extra: vec![],
            guard: Formula::True,
            span: None,
        }
    }

    #[test]
    fn single_positive_clause() {
        let mut th = sale();
        th.install_effects(&[clause("pay", Polarity::MakesTrue, "paid")])
            .unwrap();
        let ssa = th.ssa("paid").unwrap();
        assert_eq!(ssa.positive.len(), 1);
        assert!(ssa.negative.is_empty());
        assert_eq!(ssa.gamma(Polarity::MakesFalse), Formula::False);
        assert_eq!(
            ssa.gamma(Polarity::MakesTrue).to_string(),
            "exists i:Item . exists t:Time . a = pay(i)@t & x#1 = i"
        );
    }

    #[test]
    fn fluent_without_clauses_is_frame_only() {
        let mut th = sale();
        th.install_effects(&[clause("pay", Polarity::MakesTrue, "paid")])
            .unwrap();
        let ssa = th.ssa("delivered").unwrap();
        assert!(ssa.positive.is_empty() && ssa.negative.is_empty());
        // user fluents plus the obligation fluent
        assert_eq!(th.ssas.len(), 3);
    }

    #[test]
    fn disjunct_count_matches_clause_count() {
        let mut th = sale();
        let clauses = [
            clause("pay", Polarity::MakesTrue, "paid"),
            clause("deliver", Polarity::MakesTrue, "paid"),
            clause("deliver", Polarity::MakesFalse, "paid"),
        ];
        th.install_effects(&clauses).unwrap();
        let ssa = th.ssa("paid").unwrap();
        // independent walk over the clause list
        let plus = clauses
            .iter()
            .filter(|c| c.fluent.as_ref() == "paid" && c.polarity == Polarity::MakesTrue)
            .count();
        let minus = clauses
            .iter()
            .filter(|c| c.fluent.as_ref() == "paid" && c.polarity == Polarity::MakesFalse)
            .count();
        match ssa.gamma(Polarity::MakesTrue) {
            Formula::Or(ds) => assert_eq!(ds.len(), plus),
            other => panic!("expected disjunction, got {other}"),
        }
        assert!(matches!(
            ssa.gamma(Polarity::MakesFalse),
            Formula::Exists(..)
        ));
        assert_eq!(minus, 1);
    }

    #[test]
    fn compile_rejects_undeclared_fluent() {
        let th = sale();
        let err = compile_effects(
            &[clause("pay", Polarity::MakesTrue, "shipped")],
            &th.fluents,
            &th.actions,
        );
        assert!(matches!(err, Err(Error::Validation(_))));
        let err = compile_effects(
            &[clause("refund", Polarity::MakesTrue, "paid")],
            &th.fluents,
            &th.actions,
        );
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn time_axioms() {
        let th = sale();
        let w = Term::constant("widget", "Item");
        let pay = ActionTerm::new("pay", vec![w.clone()], Term::time(1));
        let deliver = ActionTerm::new("deliver", vec![w], Term::time(5));
        assert_eq!(action_time(&pay).unwrap(), crate::term::time(1));
        assert_eq!(start(&Term::S0, &th).unwrap(), crate::term::time(0));
        assert_eq!(
            start(&situation_of(&[pay, deliver]), &th).unwrap(),
            crate::term::time(5)
        );
    }

    #[test]
    fn cartesian_order() {
        let d = vec![vec![Term::time(1), Term::time(2)], vec![Term::time(3)]];
        assert_eq!(
            cartesian(&d),
            vec![
                vec![Term::time(1), Term::time(3)],
                vec![Term::time(2), Term::time(3)]
            ]
        );
        assert_eq!(cartesian(&[]), vec![Vec::<Term>::new()]);
    }
}
