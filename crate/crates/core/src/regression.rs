//! The regression operator. A fluent atom about `do(α, σ)` is rewritten
//! with the fluent's successor state axiom into a formula about `σ`; a
//! `Poss(α, σ)` atom is replaced by the instantiated precondition; and
//! `start(do(α, σ))` becomes the time of `α`. Iterating reaches a formula
//! uniform in `S0`, which the initial database decides.

use std::cell::RefCell;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::eval::evaluate_initial;
use crate::formula::{simplify, Formula};
use crate::progression::holds_by_progression;
use crate::term::{ActionTerm, Term};
use crate::theory::{ContractTheory, Polarity};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Regression,
    Progression,
}

fn is_ground_prefix(s: &Term) -> bool {
    match s {
        Term::S0 => true,
        Term::Do(a, prev) => {
            matches!(&**a, Term::Action(act) if act.is_ground()) && is_ground_prefix(prev)
        }
        _ => false,
    }
}

fn term_regressable(t: &Term) -> bool {
    match t {
        Term::S0 | Term::Do(..) => is_ground_prefix(t),
        Term::Start(s) => is_ground_prefix(s),
        Term::Now => false,
        Term::Var(v) => v.sort != crate::term::Sort::Situation,
        Term::Const(..) | Term::Time(_) => true,
        Term::Action(a) => a.args.iter().all(term_regressable) && term_regressable(&a.time),
        Term::Lit(l) => l.args.iter().all(term_regressable),
    }
}

/// Syntactic regressability: every situation term is a ground prefix built
/// from `S0` by `do`, every `Poss` applies to an action term, and no
/// proper-subtrace atoms occur.
pub fn is_regressable(f: &Formula) -> bool {
    let atoms_ok = !f.any_atom(&mut |atom| match atom {
        Formula::Precedes(..) => true,
        Formula::Poss(a, _) => !matches!(a, Term::Action(_)),
        Formula::Fluent { sit, .. } => !is_ground_prefix(sit),
        _ => false,
    });
    atoms_ok && !f.any_term(&mut |t| !term_regressable(t))
}

/// Whether every situation mentioned is `S0` and no `Poss` atom remains.
pub fn is_uniform_in_s0(f: &Formula) -> bool {
    fn term_ok(t: &Term) -> bool {
        match t {
            Term::Do(..) => false,
            Term::Start(s) => matches!(**s, Term::S0),
            Term::Action(a) => a.args.iter().all(term_ok) && term_ok(&a.time),
            Term::Lit(l) => l.args.iter().all(term_ok),
            Term::Var(v) => v.sort != crate::term::Sort::Situation,
            _ => true,
        }
    }
    !f.any_atom(&mut |a| matches!(a, Formula::Poss(..) | Formula::Precedes(..)))
        && !f.any_term(&mut |t| !term_ok(t))
}

/// Termination measure: the largest `do`-depth among situation-bearing
/// positions, where `Poss(α, σ)` weighs like `do(α, σ)`.
pub fn regression_measure(f: &Formula) -> usize {
    fn term_weight(t: &Term) -> usize {
        match t {
            Term::S0 | Term::Do(..) => t.do_depth(),
            Term::Start(s) => s.do_depth(),
            Term::Action(a) => a
                .args
                .iter()
                .map(term_weight)
                .chain([term_weight(&a.time)])
                .max()
                .unwrap_or(0),
            Term::Lit(l) => l.args.iter().map(term_weight).max().unwrap_or(0),
            _ => 0,
        }
    }
    let mut best = 0;
    f.any_atom(&mut |atom| {
        let w = match atom {
            Formula::Poss(a, s) => term_weight(a).max(s.do_depth() + 1),
            Formula::Fluent { args, sit, .. } => args
                .iter()
                .map(term_weight)
                .max()
                .unwrap_or(0)
                .max(sit.do_depth()),
            Formula::Rigid { args, .. } => args.iter().map(term_weight).max().unwrap_or(0),
            Formula::Eq(a, b) | Formula::TimeCmp(_, a, b) | Formula::Precedes(a, b) => {
                term_weight(a).max(term_weight(b))
            }
            _ => 0,
        };
        best = best.max(w);
        false
    });
    best
}

/// One regression step applied to every atom at once, then simplified.
pub fn regress_step(f: &Formula, theory: &ContractTheory) -> Result<Formula> {
    if !is_regressable(f) {
        return Err(Error::NotRegressable(f.to_string()));
    }
    Ok(simplify(&step(f, theory)?))
}

fn step(f: &Formula, theory: &ContractTheory) -> Result<Formula> {
    Ok(match f {
        Formula::True | Formula::False | Formula::Rigid { .. } | Formula::Precedes(..) => f.clone(),
        Formula::Fluent { fluent, args, sit } => {
            let args: Vec<Term> = args.iter().map(step_term).collect();
            match sit {
                Term::Do(a, prev) => {
                    let action = expect_action(a)?;
                    let ssa = theory.ssa(fluent).ok_or_else(|| {
                        Error::Theory(format!("no successor state axiom for {fluent}"))
                    })?;
                    let plus = ssa.instantiate(Polarity::MakesTrue, &args, action, prev);
                    let minus = ssa.instantiate(Polarity::MakesFalse, &args, action, prev);
                    Formula::Or(vec![
                        plus,
                        Formula::And(vec![
                            Formula::Fluent {
                                fluent: fluent.clone(),
                                args,
                                sit: (**prev).clone(),
                            },
                            Formula::not(minus),
                        ]),
                    ])
                }
                _ => Formula::Fluent {
                    fluent: fluent.clone(),
                    args,
                    sit: sit.clone(),
                },
            }
        }
        Formula::Poss(a, sit) => {
            let action = expect_action(a)?;
            let axiom = theory.precondition(&action.symbol).ok_or_else(|| {
                Error::Theory(format!("no precondition axiom for {}", action.symbol))
            })?;
            if axiom.params.len() != action.args.len() {
                return Err(Error::Sort(format!(
                    "{} expects {} argument(s)",
                    action.symbol,
                    axiom.params.len()
                )));
            }
            axiom.instantiate(action, sit)
        }
        Formula::Eq(a, b) => Formula::Eq(step_term(a), step_term(b)),
        Formula::TimeCmp(op, a, b) => Formula::TimeCmp(*op, step_term(a), step_term(b)),
        Formula::Not(g) => Formula::not(step(g, theory)?),
        Formula::And(gs) => {
            Formula::And(gs.iter().map(|g| step(g, theory)).collect::<Result<_>>()?)
        }
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| step(g, theory)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::implies(step(a, theory)?, step(b, theory)?),
        Formula::ForAll(v, body) => Formula::forall(v.clone(), step(body, theory)?),
        Formula::Exists(v, body) => Formula::exists(v.clone(), step(body, theory)?),
    })
}

/// `start(do(α, σ))` is the occurrence time of `α`.
fn step_term(t: &Term) -> Term {
    match t {
        Term::Start(s) => match &**s {
            Term::Do(a, _) => match &**a {
                Term::Action(act) => (*act.time).clone(),
                _ => t.clone(),
            },
            _ => t.clone(),
        },
        Term::Action(a) => Term::Action(ActionTerm {
            symbol: a.symbol.clone(),
            args: a.args.iter().map(step_term).collect(),
            time: Box::new(step_term(&a.time)),
        }),
        _ => t.clone(),
    }
}

fn expect_action(t: &Term) -> Result<&ActionTerm> {
    match t {
        Term::Action(a) => Ok(a),
        other => Err(Error::NotRegressable(format!(
            "`{other}` is not an action term"
        ))),
    }
}

/// Regresses `f` all the way back to `S0`.
pub fn regress(f: &Formula, theory: &ContractTheory) -> Result<Formula> {
    Regressor::new(theory).regress(f)
}

/// Regression by iterating [`regress_step`] until the measure reaches 0.
/// Equivalent to [`regress`]; kept as the reference formulation.
pub fn regress_stepwise(f: &Formula, theory: &ContractTheory) -> Result<Formula> {
    if !is_regressable(f) {
        return Err(Error::NotRegressable(f.to_string()));
    }
    let mut cur = simplify(f);
    let mut measure = regression_measure(&cur);
    while measure > 0 {
        cur = simplify(&step(&cur, theory)?);
        let next = regression_measure(&cur);
        debug_assert!(next < measure, "regression measure must decrease");
        measure = next;
    }
    Ok(cur)
}

/// Whether the closed formula `f` holds at the ground situation `s`. A free
/// `now` in `f` denotes `s`.
pub fn holds(f: &Formula, s: &Term, theory: &ContractTheory, method: Method) -> Result<bool> {
    match method {
        Method::Regression => {
            let g = f.at(s);
            evaluate_initial(&regress(&g, theory)?, theory)
        }
        Method::Progression => holds_by_progression(f, s, theory),
    }
}

/// Atom-wise regression, `R[F(do(a, s))] = R[SSA instance at s]`,
/// compositional over connectives and quantifiers, with fully regressed
/// atoms memoized for the lifetime of the regressor.
pub struct Regressor<'a> {
    theory: &'a ContractTheory,
    cache: RefCell<FxHashMap<Formula, Formula>>,
}

impl<'a> Regressor<'a> {
    pub fn new(theory: &'a ContractTheory) -> Self {
        Regressor {
            theory,
            cache: RefCell::new(FxHashMap::default()),
        }
    }

    pub fn regress(&self, f: &Formula) -> Result<Formula> {
        if !is_regressable(f) {
            return Err(Error::NotRegressable(f.to_string()));
        }
        Ok(simplify(&self.rec(f)?))
    }

    /// Whether `f` holds at `s`, by regression; `now` in `f` denotes `s`.
    pub fn holds(&self, f: &Formula, s: &Term) -> Result<bool> {
        evaluate_initial(&self.regress(&f.at(s))?, self.theory)
    }

    fn rec(&self, f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::Fluent {
                sit: Term::Do(..), ..
            }
            | Formula::Poss(..) => self.atom(f)?,
            Formula::Fluent { fluent, args, sit } => Formula::Fluent {
                fluent: fluent.clone(),
                args: args.iter().map(step_term).collect(),
                sit: sit.clone(),
            },
            Formula::True | Formula::False | Formula::Rigid { .. } | Formula::Precedes(..) => {
                f.clone()
            }
            Formula::Eq(a, b) => Formula::Eq(step_term(a), step_term(b)),
            Formula::TimeCmp(op, a, b) => Formula::TimeCmp(*op, step_term(a), step_term(b)),
            Formula::Not(g) => Formula::not(self.rec(g)?),
            Formula::And(gs) => {
                Formula::And(gs.iter().map(|g| self.rec(g)).collect::<Result<_>>()?)
            }
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.rec(g)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => Formula::implies(self.rec(a)?, self.rec(b)?),
            Formula::ForAll(v, body) => Formula::forall(v.clone(), self.rec(body)?),
            Formula::Exists(v, body) => Formula::exists(v.clone(), self.rec(body)?),
        })
    }

    fn atom(&self, f: &Formula) -> Result<Formula> {
        if let Some(r) = self.cache.borrow().get(f) {
            return Ok(r.clone());
        }
        let one = simplify(&step(f, self.theory)?);
        let r = simplify(&self.rec(&one)?);
        self.cache.borrow_mut().insert(f.clone(), r.clone());
        Ok(r)
    }
}
