//! Closed-world, finite-domain evaluation of formulas.
//!
//! Truth of fluent atoms is supplied by a [`SituationModel`]; everything
//! else (equality under unique names, time arithmetic, `Poss` via the
//! precondition axioms, proper-subtrace, rigid facts, quantifiers over sort
//! extensions) is decided here.

use crate::error::{Error, Result};
use crate::formula::{now_var, Formula};
use crate::term::{precedes, ActionTerm, LiteralTerm, Term, Time, Var};
use crate::theory::{ContractTheory, GroundAtom};

/// Source of fluent truth values and start times at ground situations.
pub trait SituationModel {
    fn fluent(&self, theory: &ContractTheory, atom: &GroundAtom, sit: &Term) -> Result<bool>;
    fn start(&self, theory: &ContractTheory, sit: &Term) -> Result<Time>;
}

/// The initial database under the closed-world assumption. Only `S0` may
/// be queried.
pub struct InitialModel;

impl SituationModel for InitialModel {
    fn fluent(&self, theory: &ContractTheory, atom: &GroundAtom, sit: &Term) -> Result<bool> {
        match sit {
            Term::S0 => Ok(theory.init.facts.contains(atom)),
            other => Err(Error::Evaluation(format!(
                "{atom} at {other}: formula is not uniform in S0"
            ))),
        }
    }

    fn start(&self, theory: &ContractTheory, sit: &Term) -> Result<Time> {
        match sit {
            Term::S0 => Ok(theory.init.start),
            other => Err(Error::Evaluation(format!(
                "start({other}): formula is not uniform in S0"
            ))),
        }
    }
}

pub struct Evaluator<'a, M: SituationModel + ?Sized> {
    pub theory: &'a ContractTheory,
    pub model: &'a M,
}

type Env = Vec<(Var, Term)>;

impl<'a, M: SituationModel + ?Sized> Evaluator<'a, M> {
    pub fn new(theory: &'a ContractTheory, model: &'a M) -> Self {
        Evaluator { theory, model }
    }

    pub fn eval_closed(&self, f: &Formula) -> Result<bool> {
        self.eval(f, &mut Vec::new())
    }

    pub fn eval(&self, f: &Formula, env: &mut Env) -> Result<bool> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Fluent { fluent, args, sit } => {
                let atom = GroundAtom {
                    symbol: fluent.clone(),
                    args: self.resolve_all(args, env)?,
                };
                let sit = self.resolve(sit, env)?;
                self.model.fluent(self.theory, &atom, &sit)
            }
            Formula::Rigid { pred, args } => {
                let atom = GroundAtom {
                    symbol: pred.clone(),
                    args: self.resolve_all(args, env)?,
                };
                Ok(self.theory.init.rigid.contains(&atom))
            }
            Formula::Eq(a, b) => Ok(self.resolve(a, env)? == self.resolve(b, env)?),
            Formula::TimeCmp(op, a, b) => {
                let x = self.resolve_time(a, env)?;
                let y = self.resolve_time(b, env)?;
                Ok(op.apply(&x, &y))
            }
            Formula::Poss(a, s) => {
                let action = match self.resolve(a, env)? {
                    Term::Action(act) => act,
                    other => {
                        return Err(Error::Evaluation(format!("poss of non-action `{other}`")))
                    }
                };
                let sit = self.resolve(s, env)?;
                self.poss(&action, &sit)
            }
            Formula::Precedes(a, b) => {
                let x = self.resolve(a, env)?;
                let y = self.resolve(b, env)?;
                precedes(&x, &y)
            }
            Formula::Not(g) => Ok(!self.eval(g, env)?),
            Formula::And(gs) => {
                for g in gs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            Formula::ForAll(v, body) => self.quantify(v, body, env, true),
            Formula::Exists(v, body) => self.quantify(v, body, env, false),
        }
    }

    fn quantify(&self, v: &Var, body: &Formula, env: &mut Env, universal: bool) -> Result<bool> {
        for value in self.theory.domain(&v.sort)? {
            env.push((v.clone(), value));
            let r = self.eval(body, env);
            env.pop();
            if r? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }

    /// `Poss(action, sit)` by the action's precondition axiom.
    pub fn poss(&self, action: &ActionTerm, sit: &Term) -> Result<bool> {
        let axiom = self
            .theory
            .precondition(&action.symbol)
            .ok_or_else(|| Error::Theory(format!("no precondition axiom for {}", action.symbol)))?;
        if axiom.params.len() != action.args.len() {
            return Err(Error::Sort(format!(
                "{} expects {} argument(s)",
                action.symbol,
                axiom.params.len()
            )));
        }
        let mut env: Env = axiom
            .params
            .iter()
            .cloned()
            .zip(action.args.iter().cloned())
            .collect();
        env.push((axiom.time_var.clone(), (*action.time).clone()));
        env.push((now_var(), sit.clone()));
        self.eval(&axiom.rhs, &mut env)
    }

    fn resolve_all(&self, ts: &[Term], env: &Env) -> Result<Vec<Term>> {
        ts.iter().map(|t| self.resolve(t, env)).collect()
    }

    fn resolve_time(&self, t: &Term, env: &Env) -> Result<Time> {
        match self.resolve(t, env)? {
            Term::Time(x) => Ok(x),
            other => Err(Error::Sort(format!("`{other}` is not a time point"))),
        }
    }

    /// Evaluates a term to a ground term under the variable environment.
    pub fn resolve(&self, t: &Term, env: &Env) -> Result<Term> {
        Ok(match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(w, _)| w == v)
                .map(|(_, val)| val.clone())
                .ok_or_else(|| Error::Evaluation(format!("free variable {}", v.name)))?,
            Term::Const(..) | Term::Time(_) | Term::S0 => t.clone(),
            Term::Now => {
                return Err(Error::Evaluation(
                    "symbolic time `?` cannot be evaluated".into(),
                ))
            }
            Term::Start(s) => {
                let sit = self.resolve(s, env)?;
                Term::Time(self.model.start(self.theory, &sit)?)
            }
            Term::Action(a) => Term::Action(ActionTerm {
                symbol: a.symbol.clone(),
                args: self.resolve_all(&a.args, env)?,
                time: Box::new(self.resolve(&a.time, env)?),
            }),
            Term::Lit(l) => Term::Lit(LiteralTerm {
                positive: l.positive,
                fluent: l.fluent.clone(),
                args: self.resolve_all(&l.args, env)?,
            }),
            Term::Do(..) if t.is_ground() => t.clone(),
            Term::Do(a, s) => Term::Do(
                std::sync::Arc::new(self.resolve(a, env)?),
                std::sync::Arc::new(self.resolve(s, env)?),
            ),
        })
    }
}

/// Whether a closed formula uniform in `S0` holds in the initial database.
pub fn evaluate_initial(f: &Formula, theory: &ContractTheory) -> Result<bool> {
    if let Some(v) = f.free_vars().first() {
        return Err(Error::Evaluation(format!(
            "formula has free variable {}",
            v.name
        )));
    }
    Evaluator::new(theory, &InitialModel).eval_closed(f)
}

/// Truth of a reified fluent literal given a fluent lookup.
pub fn literal_holds(lit: &LiteralTerm, lookup: impl Fn(&GroundAtom) -> bool) -> bool {
    let atom = GroundAtom {
        symbol: lit.fluent.clone(),
        args: lit.args.clone(),
    };
    lookup(&atom) == lit.positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Sort;

    fn theory() -> ContractTheory {
        let mut th = ContractTheory::new("t");
        th.add_sort("Item", &["widget"])
            .add_sort("Agent", &["buyer", "seller"]);
        th.add_fluent("paid", vec![Sort::object("Item")]);
        th
    }

    #[test]
    fn closed_world_at_s0() {
        let th = theory();
        let f = Formula::fluent("paid", vec![Term::constant("widget", "Item")], Term::S0);
        assert!(!evaluate_initial(&f, &th).unwrap());
        let i = Var::new("i", Sort::object("Item"));
        let g = Formula::exists(
            i.clone(),
            Formula::not(Formula::fluent("paid", vec![Term::Var(i)], Term::S0)),
        );
        assert!(evaluate_initial(&g, &th).unwrap());
    }

    #[test]
    fn exhaustive_range() {
        let th = theory();
        let x = Var::new("x", Sort::object("Agent"));
        let f = Formula::forall(
            x.clone(),
            Formula::Or(vec![
                Formula::Eq(Term::Var(x.clone()), Term::constant("buyer", "Agent")),
                Formula::Eq(Term::Var(x), Term::constant("seller", "Agent")),
            ]),
        );
        assert!(evaluate_initial(&f, &th).unwrap());
    }

    #[test]
    fn infinite_quantifier_is_an_error() {
        let th = theory();
        let t = Var::new("t", Sort::Time);
        let f = Formula::exists(t.clone(), Formula::Eq(Term::Var(t), Term::time(1)));
        assert!(matches!(
            evaluate_initial(&f, &th),
            Err(Error::Evaluation(_))
        ));
    }

    #[test]
    fn rejects_non_initial_situations() {
        let th = theory();
        let s = Term::do_(Term::action("pay", vec![], Term::time(1)), Term::S0);
        let f = Formula::fluent("paid", vec![Term::constant("widget", "Item")], s);
        assert!(evaluate_initial(&f, &th).is_err());
    }
}
