//! Well-formedness of a contract theory. Problems are reported as
//! diagnostics; an empty report means the theory can be used for
//! evaluation.

use std::collections::{HashMap, HashSet};

use crate::formula::{now_var, Formula};
use crate::obligation::obligation_ssa;
use crate::span::{Diagnostic, Span};
use crate::term::{Sort, Term, Var};
use crate::theory::{is_reserved_action, ContractTheory, EffectCase, GroundAtom, OBL};

const BUILTIN_SORTS: [&str; 5] = ["Action", "Situation", "Time", "Literal", "Object"];

pub fn validate(theory: &ContractTheory) -> Vec<Diagnostic> {
    let mut v = Validator {
        theory,
        diags: Vec::new(),
        span: None,
    };
    v.sorts();
    v.preconditions();
    v.successor_state_axioms();
    v.initial_database();
    v.diags
}

struct Validator<'a> {
    theory: &'a ContractTheory,
    diags: Vec<Diagnostic>,
    span: Option<Span>,
}

impl Validator<'_> {
    fn error(&mut self, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(msg, self.span));
    }

    fn sorts(&mut self) {
        let mut owner: HashMap<&str, &str> = HashMap::new();
        for (sort, consts) in &self.theory.sorts {
            self.span = self.theory.sort_spans.get(sort).copied();
            if BUILTIN_SORTS.contains(&&**sort) {
                self.error(format!("sort {sort} clashes with a built-in sort"));
            }
            if consts.is_empty() {
                self.error(format!("sort {sort} has an empty extension"));
            }
            let mut seen = HashSet::new();
            for c in consts {
                if !seen.insert(c) {
                    self.error(format!("duplicate constant {c} in sort {sort}"));
                } else if let Some(prev) = owner.insert(c, sort) {
                    self.error(format!("constant {c} declared in both {prev} and {sort}"));
                }
            }
        }
        for decl in self
            .theory
            .fluents
            .values()
            .map(|f| (&f.params, f.span))
            .chain(self.theory.predicates.values().map(|p| (&p.params, p.span)))
        {
            self.span = decl.1;
            for s in decl.0 {
                self.check_sort_exists(s);
            }
        }
        for decl in self.theory.actions.values() {
            self.span = decl.span;
            for p in &decl.params {
                self.check_sort_exists(&p.sort);
            }
        }
    }

    fn check_sort_exists(&mut self, s: &Sort) {
        if let Sort::Object(n) = s {
            if !self.theory.sorts.contains_key(n) {
                self.error(format!("unknown sort {n}"));
            }
        }
    }

    fn preconditions(&mut self) {
        let mut count: HashMap<&str, usize> = HashMap::new();
        for ax in &self.theory.preconditions {
            self.span = ax.span;
            *count.entry(&ax.action).or_default() += 1;
            if count[&*ax.action] == 2 {
                self.error(format!("duplicate precondition axiom for {}", ax.action));
            }
            let Some(decl) = self.theory.actions.get(&ax.action) else {
                self.error(format!(
                    "precondition axiom for undeclared action {}",
                    ax.action
                ));
                continue;
            };
            if ax.params != decl.params || ax.time_var != decl.time_var {
                self.error(format!(
                    "precondition axiom parameters do not match action {}",
                    ax.action
                ));
            }
            let mut scope: Vec<Var> = ax.params.clone();
            scope.push(ax.time_var.clone());
            self.formula(&ax.rhs, &mut scope);
        }
        for decl in self.theory.actions.values() {
            if !count.contains_key(&*decl.name) {
                self.span = decl.span;
                self.error(format!("missing precondition axiom for {}", decl.name));
            }
        }
    }

    fn successor_state_axioms(&mut self) {
        let mut count: HashMap<&str, usize> = HashMap::new();
        for ssa in &self.theory.ssas {
            self.span = ssa.span;
            *count.entry(&ssa.fluent).or_default() += 1;
            if count[&*ssa.fluent] == 2 {
                self.error(format!("duplicate SSA for fluent {}", ssa.fluent));
            }
            let Some(decl) = self.theory.fluents.get(&ssa.fluent) else {
                self.error(format!("SSA for undeclared fluent {}", ssa.fluent));
                continue;
            };
            if &*ssa.fluent == OBL {
                if *ssa != obligation_ssa() {
                    self.error("the obligation successor state axiom cannot be altered");
                }
                continue;
            }
            let params = decl.params.clone();
            for case in ssa.positive.iter().chain(&ssa.negative) {
                self.span = case.span.or(ssa.span);
                self.effect_case(case, &params);
            }
        }
        for decl in self.theory.fluents.values() {
            if !count.contains_key(&*decl.name) {
                self.span = decl.span;
                self.error(format!("missing SSA for fluent {}", decl.name));
            }
        }
    }

    fn effect_case(&mut self, case: &EffectCase, fluent_params: &[Sort]) {
        if is_reserved_action(&case.action) {
            self.error(format!("reserved action {} in effect clause", case.action));
            return;
        }
        let Some(decl) = self.theory.actions.get(&case.action) else {
            self.error(format!(
                "effect clause on undeclared action {}",
                case.action
            ));
            return;
        };
        if case.params != decl.params {
            self.error(format!(
                "effect clause parameters do not match action {}",
                case.action
            ));
        }
        for v in &case.extra {
            if !v.sort.is_object() {
                self.error(format!(
                    "effect variable {} must range over an object sort",
                    v.name
                ));
            }
        }
        if case.fluent_args.len() != fluent_params.len() {
            self.error(format!(
                "effect expects {} fluent argument(s)",
                fluent_params.len()
            ));
        }
        let mut scope: Vec<Var> = case.params.clone();
        scope.push(case.time_var.clone());
        scope.extend(case.extra.iter().cloned());
        for (arg, want) in case.fluent_args.iter().zip(fluent_params) {
            if let Some(got) = self.term(arg, &scope, true) {
                if !want.accepts(&got) {
                    self.error(format!(
                        "effect argument `{arg}` has sort {got}, expected {want}"
                    ));
                }
            }
        }
        self.formula(&case.guard, &mut scope);
    }

    fn initial_database(&mut self) {
        self.span = self.theory.init.span;
        let facts: Vec<GroundAtom> = self.theory.init.facts.iter().cloned().collect();
        for atom in &facts {
            if &*atom.symbol == OBL {
                self.error(format!(
                    "initial database may not contain obligation {atom}"
                ));
                continue;
            }
            match self.theory.fluents.get(&atom.symbol) {
                Some(decl) => self.ground_args(atom, &decl.params.clone()),
                None => self.error(format!(
                    "unknown fluent {} in initial database",
                    atom.symbol
                )),
            }
        }
        let rigid: Vec<GroundAtom> = self.theory.init.rigid.iter().cloned().collect();
        for atom in &rigid {
            match self.theory.predicates.get(&atom.symbol) {
                Some(decl) => self.ground_args(atom, &decl.params.clone()),
                None => self.error(format!(
                    "unknown predicate {} in initial database",
                    atom.symbol
                )),
            }
        }
    }

    fn ground_args(&mut self, atom: &GroundAtom, params: &[Sort]) {
        if atom.args.len() != params.len() {
            self.error(format!(
                "{} expects {} argument(s)",
                atom.symbol,
                params.len()
            ));
            return;
        }
        for (a, want) in atom.args.iter().zip(params) {
            if !a.is_ground() {
                self.error(format!("initial fact {atom} is not ground"));
            } else if let Some(got) = self.term(a, &[], false) {
                if !want.accepts(&got) {
                    self.error(format!(
                        "argument `{a}` of {} has sort {got}, expected {want}",
                        atom.symbol
                    ));
                }
            }
        }
    }

    /// Checks a formula uniform in `now`.
    fn formula(&mut self, f: &Formula, scope: &mut Vec<Var>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Fluent { fluent, args, sit } => {
                if *sit != Term::Var(now_var()) {
                    self.error(format!(
                        "fluent {fluent} must refer to the current situation only"
                    ));
                }
                match self.theory.fluents.get(fluent) {
                    Some(decl) => {
                        let params = decl.params.clone();
                        self.args(fluent, args, &params, scope);
                    }
                    None => self.error(format!("unknown fluent {fluent}")),
                }
            }
            Formula::Rigid { pred, args } => match self.theory.predicates.get(pred) {
                Some(decl) => {
                    let params = decl.params.clone();
                    self.args(pred, args, &params, scope);
                }
                None => self.error(format!("unknown predicate {pred}")),
            },
            Formula::Eq(a, b) => {
                if let (Some(x), Some(y)) = (self.term(a, scope, true), self.term(b, scope, true)) {
                    if !x.accepts(&y) && !y.accepts(&x) {
                        self.error(format!(
                            "cannot compare `{a}` of sort {x} with `{b}` of sort {y}"
                        ));
                    }
                }
            }
            Formula::TimeCmp(_, a, b) => {
                for t in [a, b] {
                    if let Some(s) = self.term(t, scope, true) {
                        if s != Sort::Time {
                            self.error(format!("`{t}` is not a time"));
                        }
                    }
                }
            }
            Formula::Poss(..) => {
                self.error("poss may not occur in a formula uniform in the current situation")
            }
            Formula::Precedes(..) => {
                self.error("precedes may not occur in a formula uniform in the current situation")
            }
            Formula::Not(g) => self.formula(g, scope),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| self.formula(g, scope)),
            Formula::Implies(a, b) => {
                self.formula(a, scope);
                self.formula(b, scope);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                if !v.sort.is_object() {
                    self.error(format!("quantifier over {} is not supported", v.sort));
                }
                self.check_sort_exists(&v.sort);
                scope.push(v.clone());
                self.formula(body, scope);
                scope.pop();
            }
        }
    }

    fn args(&mut self, symbol: &str, args: &[Term], params: &[Sort], scope: &[Var]) {
        if args.len() != params.len() {
            self.error(format!(
                "{symbol} expects {} argument(s), got {}",
                params.len(),
                args.len()
            ));
            return;
        }
        for (a, want) in args.iter().zip(params) {
            if let Some(got) = self.term(a, scope, true) {
                if !want.accepts(&got) {
                    self.error(format!(
                        "argument `{a}` of {symbol} has sort {got}, expected {want}"
                    ));
                }
            }
        }
    }

    /// Sort of a term, reporting problems. `uniform` restricts situations
    /// to the current-situation variable.
    fn term(&mut self, t: &Term, scope: &[Var], uniform: bool) -> Option<Sort> {
        match t {
            Term::Var(v) => {
                if *v == now_var() {
                    return Some(Sort::Situation);
                }
                if !scope.contains(v) {
                    self.error(format!("unbound variable {}", v.name));
                    return None;
                }
                Some(v.sort.clone())
            }
            Term::Const(c, s) => {
                if self.theory.constant_sort(c) != Some(s) {
                    self.error(format!("unknown constant {c}"));
                    return None;
                }
                Some(Sort::Object(s.clone()))
            }
            Term::Time(_) => Some(Sort::Time),
            Term::Now => {
                self.error("symbolic time `?` is only allowed in programs");
                None
            }
            Term::Start(s) => {
                self.term(s, scope, uniform)?;
                Some(Sort::Time)
            }
            Term::Action(a) => {
                let Some(decl) = self.theory.actions.get(&a.symbol) else {
                    self.error(format!("unknown action {}", a.symbol));
                    return None;
                };
                let params: Vec<Sort> = decl.param_sorts().cloned().collect();
                self.args(&a.symbol, &a.args, &params, scope);
                if let Some(s) = self.term(&a.time, scope, uniform) {
                    if s != Sort::Time {
                        self.error(format!("time of {} is not a time", a.symbol));
                    }
                }
                Some(Sort::Action)
            }
            Term::Lit(l) => {
                if &*l.fluent == OBL {
                    self.error("obligation conditions cannot mention Obl");
                    return Some(Sort::Literal);
                }
                match self.theory.fluents.get(&l.fluent) {
                    Some(decl) => {
                        let params = decl.params.clone();
                        self.args(&l.fluent, &l.args, &params, scope);
                    }
                    None => self.error(format!("unknown fluent {}", l.fluent)),
                }
                Some(Sort::Literal)
            }
            Term::S0 | Term::Do(..) => {
                if uniform {
                    self.error("explicit situations may not occur in a formula uniform in the current situation");
                }
                Some(Sort::Situation)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::name;
    use crate::theory::{ActionDecl, EffectClause, Polarity};

    fn item() -> Sort {
        Sort::object("Item")
    }

    fn base() -> ContractTheory {
        let mut th = ContractTheory::new("sale");
        th.add_sort("Item", &["widget"])
            .add_sort("Agent", &["buyer", "seller"]);
        th.add_fluent("paid", vec![item()]);
        th.add_action(
            ActionDecl {
                name: name("pay"),
                params: vec![Var::new("i", item())],
                time_var: Var::new("t", Sort::Time),
                span: None,
            },
            None,
        );
        th.install_effects(&[]).unwrap();
        th
    }

    #[test]
    fn well_formed_theory_has_empty_report() {
        assert_eq!(validate(&base()), vec![]);
    }

    #[test]
    fn duplicate_ssa() {
        let mut th = base();
        let dup = th.ssa("paid").unwrap().clone();
        th.ssas.push(dup);
        let report = validate(&th);
        assert_eq!(report.len(), 1);
        assert!(report[0].message.contains("duplicate SSA"));
    }

    #[test]
    fn reserved_action_in_effect_clause() {
        let mut th = base();
        let clause = EffectClause {
            action: name("oblige"),
            params: crate::obligation::obligation_action("oblige").params,
            time_var: Var::new("t", Sort::Time),
            polarity: Polarity::MakesTrue,
            fluent: name("paid"),
            fluent_args: vec![Term::constant("widget", "Item")],
            extra: vec![],
            guard: Formula::True,
            span: None,
        };
        th.install_effects(&[clause]).unwrap();
        let report = validate(&th);
        assert!(
            report.iter().any(|d| d
                .message
                .contains("reserved action oblige in effect clause")),
            "{report:?}"
        );
    }

    #[test]
    fn missing_precondition_and_unknown_sort() {
        let mut th = base();
        th.preconditions.retain(|p| &*p.action != "pay");
        th.add_fluent("owns", vec![Sort::object("Person")]);
        th.install_effects(&[]).unwrap();
        let msgs: Vec<String> = validate(&th).into_iter().map(|d| d.message).collect();
        assert!(
            msgs.iter()
                .any(|m| m == "missing precondition axiom for pay"),
            "{msgs:?}"
        );
        assert!(msgs.iter().any(|m| m == "unknown sort Person"), "{msgs:?}");
    }

    #[test]
    fn initial_obligations_are_rejected() {
        let mut th = base();
        th.init.facts.insert(GroundAtom::new(
            OBL,
            vec![
                Term::constant("seller", "Agent"),
                Term::Lit(crate::term::LiteralTerm {
                    positive: true,
                    fluent: name("paid"),
                    args: vec![Term::constant("widget", "Item")],
                }),
                Term::time(10),
            ],
        ));
        assert!(validate(&th)[0]
            .message
            .contains("may not contain obligation"));
    }

    #[test]
    fn non_uniform_precondition() {
        let mut th = base();
        th.preconditions[2].rhs = Formula::fluent("paid", vec![Term::var("i", item())], Term::S0);
        let msgs: Vec<String> = validate(&th).into_iter().map(|d| d.message).collect();
        assert_eq!(
            msgs,
            vec!["fluent paid must refer to the current situation only".to_string()]
        );
    }
}
