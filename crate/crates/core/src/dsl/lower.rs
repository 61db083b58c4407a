//! Name resolution and lowering of a parsed document to a contract theory
//! with its procedures, programs and properties.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;

use super::ast::{
    self, Atom, Binder, Expr, Ident, Item, Prog, PropKind, Quant, Rel, Spec, TermAst, TimeAst,
};
use crate::formula::{now, CmpOp, Formula};
use crate::golog::{Procedure, Procedures, Program};
use crate::obligation::{ObligationLiteral, ObligationStatus};
use crate::span::{Diagnostic, Span};
use crate::term::{name, ActionTerm, LiteralTerm, Name, Sort, Term, Var};
use crate::theory::{
    is_reserved_action, ActionDecl, ContractTheory, EffectClause, FluentDecl, GroundAtom, Polarity,
    PreconditionAxiom, PredicateDecl, OBL,
};
use crate::validate::validate;
use crate::verify::{Assertion, Property};

/// A property bound to the program it is checked against.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyDef {
    pub program: Name,
    pub property: Property,
}

/// A lowered, validated contract.
#[derive(Clone, Debug)]
pub struct Contract {
    pub theory: ContractTheory,
    pub procs: Procedures,
    pub programs: IndexMap<Name, Program>,
    pub properties: IndexMap<Name, PropertyDef>,
}

pub const DEFAULT_PROGRAM: &str = "main";

type LResult<T> = Result<T, Diagnostic>;

fn err<T>(msg: impl Into<String>, span: Span) -> LResult<T> {
    Err(Diagnostic::error(msg, Some(span)))
}

/// Resolution context: the theory under construction and the procedure
/// signatures.
pub struct Ctx<'a> {
    pub theory: &'a ContractTheory,
    pub procs: &'a HashMap<String, Vec<Sort>>,
}

impl Ctx<'_> {
    pub fn sort(&self, id: &Ident, allow: &[Sort]) -> LResult<Sort> {
        let s = match id.text.as_str() {
            "Object" => Sort::AnyObject,
            "Literal" => Sort::Literal,
            "Time" => Sort::Time,
            "Action" => Sort::Action,
            other if self.theory.sorts.contains_key(other) => return Ok(Sort::object(other)),
            other => return err(format!("unknown sort {other}"), id.span()),
        };
        if allow.contains(&s) {
            Ok(s)
        } else {
            err(format!("sort {s} is not allowed here"), id.span())
        }
    }

    fn binder(&self, b: &Binder, allow: &[Sort]) -> LResult<Var> {
        Ok(Var::new(&b.name.text, self.sort(&b.sort, allow)?))
    }

    fn name_term(&self, id: &Ident, scope: &[Var]) -> LResult<Term> {
        if let Some(v) = scope.iter().rev().find(|v| *v.name == *id.text) {
            return Ok(Term::Var(v.clone()));
        }
        match self.theory.constant(&id.text) {
            Some(c) => Ok(c),
            None => err(format!("unknown name {}", id.text), id.span()),
        }
    }

    pub fn term(&self, t: &TermAst, scope: &[Var]) -> LResult<Term> {
        match t {
            TermAst::Name(id) => self.name_term(id, scope),
            TermAst::Num(n, _) => Ok(Term::Time(*n)),
            TermAst::Start(_) => Ok(Term::Start(Box::new(now()))),
            TermAst::App(id, _) | TermAst::NotLit(id, _, _) => err(
                format!(
                    "`{}(...)` is not allowed here; expected a name or a number",
                    id.text
                ),
                id.span(),
            ),
        }
    }

    fn literal(&self, t: &TermAst, scope: &[Var]) -> LResult<Term> {
        let (positive, id, args) = match t {
            TermAst::App(id, args) => (true, id, args.as_slice()),
            TermAst::NotLit(id, args, _) => (false, id, args.as_slice()),
            TermAst::Name(id) => {
                if let Some(v) = scope.iter().rev().find(|v| *v.name == *id.text) {
                    return Ok(Term::Var(v.clone()));
                }
                (true, id, &[][..])
            }
            other => return err("expected a fluent literal", other.span()),
        };
        if id.text == OBL {
            return err("obligations cannot be nested", id.span());
        }
        let Some(decl) = self.theory.fluents.get(id.text.as_str()) else {
            return err(format!("unknown fluent {}", id.text), id.span());
        };
        let args = self.args(id, args, &decl.params.clone(), scope)?;
        Ok(Term::Lit(LiteralTerm {
            positive,
            fluent: name(&id.text),
            args,
        }))
    }

    fn args(
        &self,
        head: &Ident,
        args: &[TermAst],
        params: &[Sort],
        scope: &[Var],
    ) -> LResult<Vec<Term>> {
        if args.len() != params.len() {
            return err(
                format!(
                    "{} expects {} argument(s), found {}",
                    head.text,
                    params.len(),
                    args.len()
                ),
                head.span(),
            );
        }
        let mut out = Vec::with_capacity(args.len());
        for (a, want) in args.iter().zip(params) {
            let t = if *want == Sort::Literal {
                self.literal(a, scope)?
            } else {
                self.term(a, scope)?
            };
            let got = t.sort();
            if !want.accepts(&got) {
                return err(
                    format!(
                        "argument `{t}` of {} has sort {got}, expected {want}",
                        head.text
                    ),
                    a.span(),
                );
            }
            out.push(t);
        }
        Ok(out)
    }

    fn obligation_args(&self, head: &Ident, args: &[TermAst], scope: &[Var]) -> LResult<Vec<Term>> {
        self.args(
            head,
            args,
            &[Sort::AnyObject, Sort::Literal, Sort::Time],
            scope,
        )
    }

    pub fn formula(&self, e: &Expr, scope: &mut Vec<Var>) -> LResult<Formula> {
        Ok(match e {
            Expr::True(_) => Formula::True,
            Expr::False(_) => Formula::False,
            Expr::Atom(Atom { name: id, args }) => {
                if id.text == OBL {
                    let args = self.obligation_args(id, args, scope)?;
                    Formula::Fluent {
                        fluent: name(OBL),
                        args,
                        sit: now(),
                    }
                } else if let Some(decl) = self.theory.fluents.get(id.text.as_str()) {
                    let args = self.args(id, args, &decl.params.clone(), scope)?;
                    Formula::Fluent {
                        fluent: name(&id.text),
                        args,
                        sit: now(),
                    }
                } else if let Some(decl) = self.theory.predicates.get(id.text.as_str()) {
                    let args = self.args(id, args, &decl.params.clone(), scope)?;
                    Formula::Rigid {
                        pred: name(&id.text),
                        args,
                    }
                } else {
                    return err(
                        format!("unknown fluent or predicate {}", id.text),
                        id.span(),
                    );
                }
            }
            Expr::Rel(rel, a, b, loc) => {
                let (x, y) = (self.term(a, scope)?, self.term(b, scope)?);
                match rel {
                    Rel::Eq | Rel::Ne => {
                        let (sx, sy) = (x.sort(), y.sort());
                        if !(sx.accepts(&sy) || sy.accepts(&sx)) {
                            return err(format!("cannot compare {sx} with {sy}"), loc.0);
                        }
                        let eq = Formula::Eq(x, y);
                        if *rel == Rel::Eq {
                            eq
                        } else {
                            Formula::not(eq)
                        }
                    }
                    _ => {
                        for t in [&x, &y] {
                            if t.sort() != Sort::Time {
                                return err(format!("`{t}` is not a time"), loc.0);
                            }
                        }
                        match rel {
                            Rel::Lt => Formula::TimeCmp(CmpOp::Lt, x, y),
                            Rel::Le => Formula::TimeCmp(CmpOp::Le, x, y),
                            Rel::Gt => Formula::TimeCmp(CmpOp::Lt, y, x),
                            _ => Formula::TimeCmp(CmpOp::Le, y, x),
                        }
                    }
                }
            }
            Expr::Not(g, _) => Formula::not(self.formula(g, scope)?),
            Expr::And(a, b) => Formula::And(vec![self.formula(a, scope)?, self.formula(b, scope)?]),
            Expr::Or(a, b) => Formula::Or(vec![self.formula(a, scope)?, self.formula(b, scope)?]),
            Expr::Implies(a, b) => {
                Formula::implies(self.formula(a, scope)?, self.formula(b, scope)?)
            }
            Expr::Quant(q, b, body, _) => {
                let v = self.binder(b, &object_sorts(self.theory))?;
                scope.push(v.clone());
                let body = self.formula(body, scope);
                scope.pop();
                match q {
                    Quant::ForAll => Formula::forall(v, body?),
                    Quant::Exists => Formula::exists(v, body?),
                }
            }
        })
    }

    fn time(&self, t: &Option<TimeAst>, scope: &[Var]) -> LResult<Term> {
        match t {
            None | Some(TimeAst::Unknown(_)) => Ok(Term::Now),
            Some(TimeAst::Value(v, _)) => Ok(Term::Time(*v)),
            Some(TimeAst::Name(id)) => match scope.iter().rev().find(|v| *v.name == *id.text) {
                Some(v) if v.sort == Sort::Time => Ok(Term::Var(v.clone())),
                Some(_) => err(format!("{} is not a time variable", id.text), id.span()),
                None => err(format!("unknown time variable {}", id.text), id.span()),
            },
        }
    }

    /// An action occurrence `name(args)@time`.
    pub fn action(
        &self,
        id: &Ident,
        args: &[TermAst],
        time: &Option<TimeAst>,
        scope: &[Var],
    ) -> LResult<ActionTerm> {
        let Some(decl) = self.theory.actions.get(id.text.as_str()) else {
            return err(format!("unknown action {}", id.text), id.span());
        };
        let sorts: Vec<Sort> = decl.param_sorts().cloned().collect();
        let args = self.args(id, args, &sorts, scope)?;
        Ok(ActionTerm {
            symbol: name(&id.text),
            args,
            time: Box::new(self.time(time, scope)?),
        })
    }

    pub fn program(&self, p: &Prog, scope: &mut Vec<Var>) -> LResult<Program> {
        Ok(match p {
            Prog::Nil(_) => Program::Nil,
            Prog::Step {
                name: id,
                args,
                time,
            } => {
                if args.is_none() && time.is_none() {
                    if let Some(v) = scope.iter().rev().find(|v| *v.name == *id.text) {
                        if v.sort != Sort::Action {
                            return err(
                                format!("{} is not an action variable", id.text),
                                id.span(),
                            );
                        }
                        return Ok(Program::Prim(Term::Var(v.clone())));
                    }
                }
                let empty = Vec::new();
                let arg_list = args.as_ref().unwrap_or(&empty);
                if self.theory.actions.contains_key(id.text.as_str()) {
                    Program::prim(self.action(id, arg_list, time, scope)?)
                } else if let Some(params) = self.procs.get(&id.text) {
                    if time.is_some() {
                        return err(
                            format!("procedure call {} cannot carry a time", id.text),
                            id.span(),
                        );
                    }
                    Program::Call(name(&id.text), self.args(id, arg_list, params, scope)?)
                } else {
                    return err(
                        format!("unknown action or procedure {}", id.text),
                        id.span(),
                    );
                }
            }
            Prog::Test(e, _) => Program::Test(self.formula(e, scope)?),
            Prog::Seq(a, b) => Program::seq(self.program(a, scope)?, self.program(b, scope)?),
            Prog::Choice(a, b) => Program::choice(self.program(a, scope)?, self.program(b, scope)?),
            Prog::Pick(b, body, _) => {
                let mut allow = object_sorts(self.theory);
                allow.push(Sort::Action);
                let v = self.binder(b, &allow)?;
                scope.push(v.clone());
                let body = self.program(body, scope);
                scope.pop();
                Program::pick(v, body?)
            }
            Prog::Star(body, _) => Program::star(self.program(body, scope)?),
            Prog::If(c, a, b, _) => Program::if_(
                self.formula(c, scope)?,
                self.program(a, scope)?,
                self.program(b, scope)?,
            ),
            Prog::While(c, body, _) => {
                Program::while_(self.formula(c, scope)?, self.program(body, scope)?)
            }
        })
    }
}

fn object_sorts(theory: &ContractTheory) -> Vec<Sort> {
    let mut v: Vec<Sort> = theory
        .sorts
        .keys()
        .map(|s| Sort::Object(s.clone()))
        .collect();
    v.push(Sort::AnyObject);
    v
}

struct Lowerer {
    diags: Vec<Diagnostic>,
}

impl Lowerer {
    fn report<T>(&mut self, r: LResult<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(d) => {
                self.diags.push(d);
                None
            }
        }
    }

    fn unique<'a>(&mut self, kind: &str, seen: &mut HashMap<&'a str, ()>, id: &'a Ident) -> bool {
        if seen.insert(&id.text, ()).is_some() {
            self.diags.push(Diagnostic::error(
                format!("duplicate {kind} {}", id.text),
                Some(id.span()),
            ));
            false
        } else {
            true
        }
    }
}

/// Resolves every name in `spec` and builds the contract. Fails with all
/// resolution diagnostics, or with the validation report of the theory.
pub fn lower(spec: &Spec) -> Result<Contract, Vec<Diagnostic>> {
    let mut lw = Lowerer { diags: Vec::new() };
    let mut theory = ContractTheory::new(&spec.name.text);

    // sorts and constants
    let mut sort_names = HashMap::new();
    let mut const_owner: HashMap<&str, &str> = HashMap::new();
    for item in &spec.items {
        if let Item::Sort {
            name: id,
            constants,
        } = item
        {
            if ["Object", "Literal", "Time", "Action", "Situation"].contains(&id.text.as_str()) {
                lw.diags.push(Diagnostic::error(
                    format!("sort {} clashes with a built-in sort", id.text),
                    Some(id.span()),
                ));
                continue;
            }
            if !lw.unique("sort", &mut sort_names, id) {
                continue;
            }
            if constants.is_empty() {
                lw.diags.push(Diagnostic::error(
                    format!("sort {} has an empty extension", id.text),
                    Some(id.span()),
                ));
            }
            let mut consts = Vec::new();
            for c in constants {
                if let Some(prev) = const_owner.insert(&c.text, &id.text) {
                    lw.diags.push(Diagnostic::error(
                        format!("constant {} already declared in sort {prev}", c.text),
                        Some(c.span()),
                    ));
                } else {
                    consts.push(name(&c.text));
                }
            }
            theory.sorts.insert(name(&id.text), consts);
            theory.sort_spans.insert(name(&id.text), id.span());
        }
    }

    // fluents, predicates, actions, procedure signatures
    let objects = object_sorts(&theory);
    let no_procs = HashMap::new();
    let mut symbols = HashMap::new();
    symbols.insert(OBL, ());
    let mut action_names = HashMap::new();
    let mut proc_sigs: HashMap<String, Vec<Sort>> = HashMap::new();
    for item in &spec.items {
        let ctx = Ctx {
            theory: &theory,
            procs: &no_procs,
        };
        match item {
            Item::Fluent { name: id, params } | Item::Predicate { name: id, params } => {
                let kind = if matches!(item, Item::Fluent { .. }) {
                    "fluent"
                } else {
                    "predicate"
                };
                if id.text == OBL {
                    lw.diags.push(Diagnostic::error(
                        format!("{OBL} is reserved for obligations"),
                        Some(id.span()),
                    ));
                    continue;
                }
                if !lw.unique("fluent or predicate", &mut symbols, id) {
                    continue;
                }
                let sorts: Vec<Option<Sort>> = params
                    .iter()
                    .map(|p| lw.report(ctx.sort(p, &objects)))
                    .collect();
                let Some(params) = sorts.into_iter().collect::<Option<Vec<Sort>>>() else {
                    continue;
                };
                if kind == "fluent" {
                    theory.fluents.insert(
                        name(&id.text),
                        FluentDecl {
                            name: name(&id.text),
                            params,
                            span: Some(id.span()),
                        },
                    );
                } else {
                    theory.predicates.insert(
                        name(&id.text),
                        PredicateDecl {
                            name: name(&id.text),
                            params,
                            span: Some(id.span()),
                        },
                    );
                }
            }
            Item::Action(a) => {
                if !lw.unique("action", &mut action_names, &a.name) {
                    continue;
                }
                let reserved = is_reserved_action(&a.name.text);
                let allow: Vec<Sort> = if reserved {
                    vec![Sort::AnyObject, Sort::Literal, Sort::Time]
                } else {
                    objects.clone()
                };
                let vars: Vec<Option<Var>> = a
                    .params
                    .iter()
                    .map(|b| lw.report(ctx.binder(b, &allow)))
                    .collect();
                let Some(params) = vars.into_iter().collect::<Option<Vec<Var>>>() else {
                    continue;
                };
                if reserved && params.iter().map(|v| v.sort.clone()).collect::<Vec<_>>() != allow {
                    lw.diags.push(Diagnostic::error(
                        format!("reserved action {} must be declared as {}(agent: Object, l: Literal, d: Time)", a.name.text, a.name.text),
                        Some(a.name.span()),
                    ));
                    continue;
                }
                let time_var = Var::new(
                    a.time_var.as_ref().map_or("t", |t| t.text.as_str()),
                    Sort::Time,
                );
                let decl = ActionDecl {
                    name: name(&a.name.text),
                    params,
                    time_var,
                    span: Some(a.name.span()),
                };
                theory.preconditions.retain(|p| p.action != decl.name);
                theory.preconditions.push(PreconditionAxiom {
                    action: decl.name.clone(),
                    params: decl.params.clone(),
                    time_var: decl.time_var.clone(),
                    rhs: Formula::True,
                    span: decl.span,
                });
                theory.actions.insert(decl.name.clone(), decl);
            }
            Item::Proc {
                name: id, params, ..
            } => {
                if !lw.unique("action", &mut action_names, id) {
                    continue;
                }
                let mut allow = objects.clone();
                allow.push(Sort::Time);
                let sorts: Vec<Option<Sort>> = params
                    .iter()
                    .map(|b| lw.report(ctx.sort(&b.sort, &allow)))
                    .collect();
                if let Some(sorts) = sorts.into_iter().collect::<Option<Vec<Sort>>>() {
                    proc_sigs.insert(id.text.clone(), sorts);
                }
            }
            _ => {}
        }
    }

    // preconditions and effects
    let mut clauses = Vec::new();
    let mut posses = Vec::new();
    {
        let ctx = Ctx {
            theory: &theory,
            procs: &proc_sigs,
        };
        for item in &spec.items {
            let Item::Action(a) = item else { continue };
            let Some(decl) = theory.actions.get(a.name.text.as_str()) else {
                continue;
            };
            if decl.span != Some(a.name.span()) {
                continue;
            }
            let mut scope = decl.params.clone();
            scope.push(decl.time_var.clone());
            if let Some(p) = &a.poss {
                if let Some(f) = lw.report(ctx.formula(p, &mut scope)) {
                    posses.push((decl.name.clone(), f));
                }
            }
            for e in &a.causes {
                if let Some(c) = lw.report(effect_clause(&ctx, decl, e, &objects)) {
                    clauses.push(c);
                }
            }
        }
    }
    for (act, f) in posses {
        if let Some(p) = theory.preconditions.iter_mut().find(|p| p.action == act) {
            p.rhs = f;
        }
    }
    if let Err(e) = theory.install_effects(&clauses) {
        match e {
            crate::Error::Validation(ds) => lw.diags.extend(ds),
            other => lw
                .diags
                .push(Diagnostic::error(other.to_string(), Some(spec.name.span()))),
        }
    }

    // initial database
    let mut seen_init = false;
    for item in &spec.items {
        let Item::Init { at, atoms, loc } = item else {
            continue;
        };
        if seen_init {
            lw.diags
                .push(Diagnostic::error("duplicate init block", Some(loc.0)));
            continue;
        }
        seen_init = true;
        theory.init.start = at.unwrap_or_default();
        theory.init.span = Some(loc.0);
        let mut facts = BTreeSet::new();
        let mut rigid = BTreeSet::new();
        {
            let ctx = Ctx {
                theory: &theory,
                procs: &proc_sigs,
            };
            for atom in atoms {
                let f = lw.report(ctx.formula(&Expr::Atom(atom.clone()), &mut Vec::new()));
                match f {
                    Some(Formula::Fluent { fluent, args, .. }) => {
                        facts.insert(GroundAtom {
                            symbol: fluent,
                            args,
                        });
                    }
                    Some(Formula::Rigid { pred, args }) => {
                        rigid.insert(GroundAtom { symbol: pred, args });
                    }
                    _ => {}
                }
            }
        }
        theory.init.facts = facts;
        theory.init.rigid = rigid;
    }

    // procedures, programs, properties
    let ctx = Ctx {
        theory: &theory,
        procs: &proc_sigs,
    };
    let mut procs = Procedures::new();
    let mut programs = IndexMap::new();
    let mut program_names = HashMap::new();
    let mut properties = IndexMap::new();
    let mut property_names = HashMap::new();
    for item in &spec.items {
        match item {
            Item::Proc {
                name: id,
                params,
                body,
            } => {
                let Some(sorts) = proc_sigs.get(&id.text) else {
                    continue;
                };
                if procs.contains_key(id.text.as_str()) {
                    continue;
                }
                let mut scope: Vec<Var> = params
                    .iter()
                    .zip(sorts)
                    .map(|(b, s)| Var::new(&b.name.text, s.clone()))
                    .collect();
                let params = scope.clone();
                if let Some(body) = lw.report(ctx.program(body, &mut scope)) {
                    procs.insert(
                        name(&id.text),
                        Procedure {
                            name: name(&id.text),
                            params,
                            body,
                        },
                    );
                }
            }
            Item::Program { name: id, body } => {
                if !lw.unique("program", &mut program_names, id) {
                    continue;
                }
                if let Some(p) = lw.report(ctx.program(body, &mut Vec::new())) {
                    programs.insert(name(&id.text), p);
                }
            }
            _ => {}
        }
    }
    for item in &spec.items {
        let Item::Property { name: id, on, kind } = item else {
            continue;
        };
        if !lw.unique("property", &mut property_names, id) {
            continue;
        }
        let program = match on {
            Some(p) if program_names.contains_key(p.text.as_str()) => name(&p.text),
            Some(p) => {
                lw.diags.push(Diagnostic::error(
                    format!("unknown program {}", p.text),
                    Some(p.span()),
                ));
                continue;
            }
            None if program_names.contains_key(DEFAULT_PROGRAM) => name(DEFAULT_PROGRAM),
            None => {
                lw.diags.push(Diagnostic::error(
                    format!("property {} needs `on PROGRAM` since there is no program {DEFAULT_PROGRAM}", id.text),
                    Some(id.span()),
                ));
                continue;
            }
        };
        if let Some(property) = lw.report(property(&ctx, kind)) {
            properties.insert(name(&id.text), PropertyDef { program, property });
        }
    }

    if lw.diags.is_empty() {
        lw.diags = validate(&theory);
    }
    if !lw.diags.is_empty() {
        let mut diags = lw.diags;
        diags.sort_by_key(|d| d.span.map(|s| (s.start, s.end)));
        return Err(diags);
    }
    Ok(Contract {
        theory,
        procs,
        programs,
        properties,
    })
}

fn effect_clause(
    ctx: &Ctx<'_>,
    decl: &ActionDecl,
    e: &ast::Effect,
    objects: &[Sort],
) -> LResult<EffectClause> {
    if e.fluent.text == OBL {
        return err(
            format!("{OBL} can only be changed by oblige and release"),
            e.fluent.span(),
        );
    }
    let Some(fdecl) = ctx.theory.fluents.get(e.fluent.text.as_str()) else {
        return err(format!("unknown fluent {}", e.fluent.text), e.fluent.span());
    };
    let mut scope = decl.params.clone();
    scope.push(decl.time_var.clone());
    let mut extra = Vec::new();
    for b in &e.vars {
        let v = ctx.binder(b, objects)?;
        extra.push(v.clone());
        scope.push(v);
    }
    let fluent_args = ctx.args(&e.fluent, &e.args, &fdecl.params.clone(), &scope)?;
    let guard = match &e.when {
        Some(w) => ctx.formula(w, &mut scope)?,
        None => Formula::True,
    };
    Ok(EffectClause {
        action: decl.name.clone(),
        params: decl.params.clone(),
        time_var: decl.time_var.clone(),
        polarity: if e.negated {
            Polarity::MakesFalse
        } else {
            Polarity::MakesTrue
        },
        fluent: name(&e.fluent.text),
        fluent_args,
        extra,
        guard,
        span: Some(e.loc.0),
    })
}

fn property(ctx: &Ctx<'_>, kind: &PropKind) -> LResult<Property> {
    let f = |e: &Expr| ctx.formula(e, &mut Vec::new());
    Ok(match kind {
        PropKind::AtEnd(e) => Property::AtTermination(Assertion::Formula(f(e)?)),
        PropKind::AtEndStatus {
            status,
            agent,
            literal,
            deadline,
        } => {
            let st = ObligationStatus::parse(&status.text).ok_or_else(|| {
                Diagnostic::error(
                    format!("unknown status {}", status.text),
                    Some(status.span()),
                )
            })?;
            let head = Ident {
                text: OBL.into(),
                loc: status.loc,
            };
            let args = ctx.obligation_args(
                &head,
                &[agent.clone(), literal.clone(), deadline.clone()],
                &[],
            )?;
            let o = match args.as_slice() {
                [a, Term::Lit(l), Term::Time(d)]
                    if a.is_ground() && l.args.iter().all(Term::is_ground) =>
                {
                    ObligationLiteral::new(a.clone(), l.clone(), *d)
                }
                _ => return err("status assertions need a ground obligation", status.span()),
            };
            Property::AtTermination(Assertion::Status(o, st))
        }
        PropKind::Always(e) => Property::Always(f(e)?),
        PropKind::Possible(e) => Property::ExistsExecution(f(e)?),
        PropKind::NoViolations => Property::NoViolatedObligationsAtTermination,
        PropKind::Subtraces(e) => Property::SubtraceAll(f(e)?),
    })
}
