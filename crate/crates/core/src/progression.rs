//! Forward state update. Each successor state axiom is applied to an
//! explicit ground state: an instance becomes true when a positive case
//! fires, stays true unless a negative case fires, and an instance hit by
//! both is an [`Error::InconsistentEffect`].
//!
//! This path never builds regressed formulas; it matches effect cases
//! against the concrete action directly, so it serves as the oracle for the
//! regression engine.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::eval::{Evaluator, SituationModel};
use crate::formula::{now_var, Formula};
use crate::term::{situation_actions, situation_of, ActionTerm, Term, Time, Var};
use crate::theory::{cartesian, start, ContractTheory, EffectCase, GroundAtom, Polarity};

/// Everything true "now": fluent atoms (obligations included) and the
/// start time of the current situation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub facts: BTreeSet<GroundAtom>,
    pub start: Time,
}

impl State {
    pub fn initial(theory: &ContractTheory) -> State {
        State {
            facts: theory.init.facts.clone(),
            start: theory.init.start,
        }
    }

    pub fn holds(&self, atom: &GroundAtom) -> bool {
        self.facts.contains(atom)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.facts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}} @{}", self.start)
    }
}

/// A single state standing for whichever situation it is asked about.
pub struct StateModel<'s>(pub &'s State);

impl SituationModel for StateModel<'_> {
    fn fluent(&self, _: &ContractTheory, atom: &GroundAtom, _: &Term) -> Result<bool> {
        Ok(self.0.holds(atom))
    }

    fn start(&self, _: &ContractTheory, _: &Term) -> Result<Time> {
        Ok(self.0.start)
    }
}

/// Evaluates a formula uniform in `now` (a precondition right-hand side or
/// an effect guard) in an explicit state.
fn eval_in_state(
    theory: &ContractTheory,
    state: &State,
    f: &Formula,
    env: &mut Vec<(Var, Term)>,
) -> Result<bool> {
    env.push((now_var(), Term::S0));
    let r = Evaluator::new(theory, &StateModel(state)).eval(f, env);
    env.pop();
    r
}

/// `Poss(action)` in the situation described by `state`.
pub fn poss_in_state(theory: &ContractTheory, state: &State, action: &ActionTerm) -> Result<bool> {
    let axiom = theory
        .precondition(&action.symbol)
        .ok_or_else(|| Error::Theory(format!("no precondition axiom for {}", action.symbol)))?;
    if axiom.params.len() != action.args.len() {
        return Err(Error::Sort(format!(
            "{} expects {} argument(s)",
            action.symbol,
            axiom.params.len()
        )));
    }
    let mut env: Vec<(Var, Term)> = axiom
        .params
        .iter()
        .cloned()
        .zip(action.args.iter().cloned())
        .collect();
    env.push((axiom.time_var.clone(), (*action.time).clone()));
    eval_in_state(theory, state, &axiom.rhs, &mut env)
}

/// Instances made true (or false) by the cases matching `action`.
fn fired_instances(
    theory: &ContractTheory,
    state: &State,
    cases: &[EffectCase],
    action: &ActionTerm,
) -> Result<BTreeSet<Vec<Term>>> {
    let mut out = BTreeSet::new();
    for case in cases.iter().filter(|c| c.action == action.symbol) {
        let mut env: Vec<(Var, Term)> = case
            .params
            .iter()
            .cloned()
            .zip(action.args.iter().cloned())
            .collect();
        env.push((case.time_var.clone(), (*action.time).clone()));
        let domains = case
            .extra
            .iter()
            .map(|v| theory.domain(&v.sort))
            .collect::<Result<Vec<_>>>()?;
        for values in cartesian(&domains) {
            let base = env.len();
            env.extend(case.extra.iter().cloned().zip(values));
            if eval_in_state(theory, state, &case.guard, &mut env)? {
                let model = StateModel(state);
                let ev = Evaluator::new(theory, &model);
                let args = case
                    .fluent_args
                    .iter()
                    .map(|t| ev.resolve(t, &env))
                    .collect::<Result<Vec<_>>>()?;
                out.insert(args);
            }
            env.truncate(base);
        }
    }
    Ok(out)
}

/// The state after performing the ground action `action` in `state`.
pub fn progress(state: &State, action: &ActionTerm, theory: &ContractTheory) -> Result<State> {
    let time = action.time_value()?;
    let mut facts = BTreeSet::new();
    for ssa in &theory.ssas {
        let plus = fired_instances(theory, state, ssa.cases(Polarity::MakesTrue), action)?;
        let minus = fired_instances(theory, state, ssa.cases(Polarity::MakesFalse), action)?;
        if let Some(args) = plus.intersection(&minus).next() {
            return Err(Error::InconsistentEffect {
                atom: GroundAtom {
                    symbol: ssa.fluent.clone(),
                    args: args.clone(),
                }
                .to_string(),
                action: action.to_string(),
                trace: String::new(),
            });
        }
        for atom in state.facts.iter().filter(|a| a.symbol == ssa.fluent) {
            if !minus.contains(&atom.args) {
                facts.insert(atom.clone());
            }
        }
        for args in plus {
            facts.insert(GroundAtom {
                symbol: ssa.fluent.clone(),
                args,
            });
        }
    }
    Ok(State { facts, start: time })
}

/// Why a ground action sequence is not executable.
#[derive(Clone, Debug, PartialEq)]
pub enum StepFailure {
    /// The action's time precedes the start of the situation it extends.
    TimeRegression {
        step: usize,
        action: ActionTerm,
        start: Time,
    },
    /// The precondition does not hold.
    NotPossible { step: usize, action: ActionTerm },
    /// Progression failed, typically with an inconsistent effect.
    Error { step: usize, error: Error },
}

impl fmt::Display for StepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepFailure::TimeRegression {
                step,
                action,
                start,
            } => {
                write!(
                    f,
                    "step {}: {action} occurs before the current start time {start}",
                    step + 1
                )
            }
            StepFailure::NotPossible { step, action } => {
                write!(f, "step {}: {action} is not possible", step + 1)
            }
            StepFailure::Error { step, error } => write!(f, "step {}: {error}", step + 1),
        }
    }
}

/// States along a ground action sequence, one per prefix (so `len + 1`).
#[derive(Clone, Debug)]
pub struct Trace {
    pub actions: Vec<ActionTerm>,
    pub situations: Vec<Term>,
    pub states: Vec<State>,
}

impl Trace {
    pub fn initial(theory: &ContractTheory) -> Trace {
        Trace {
            actions: Vec::new(),
            situations: vec![Term::S0],
            states: vec![State::initial(theory)],
        }
    }

    /// Progresses along `actions` without checking executability.
    pub fn replay(theory: &ContractTheory, actions: &[ActionTerm]) -> Result<Trace> {
        let mut tr = Trace::initial(theory);
        for a in actions {
            tr.push_unchecked(theory, a.clone())?;
        }
        Ok(tr)
    }

    /// Progresses along `actions`, checking time monotonicity and `Poss`
    /// at every step.
    pub fn execute(
        theory: &ContractTheory,
        actions: &[ActionTerm],
    ) -> std::result::Result<Trace, StepFailure> {
        let mut tr = Trace::initial(theory);
        for a in actions {
            tr.try_push(theory, a.clone())?;
        }
        Ok(tr)
    }

    pub fn last(&self) -> &State {
        self.states
            .last()
            .expect("trace has at least the initial state")
    }

    pub fn situation(&self) -> &Term {
        self.situations.last().expect("trace has at least S0")
    }

    pub fn push_unchecked(&mut self, theory: &ContractTheory, a: ActionTerm) -> Result<()> {
        let next = progress(self.last(), &a, theory).map_err(|e| self.annotate(e, &a))?;
        let sit = Term::do_(Term::Action(a.clone()), self.situation().clone());
        self.actions.push(a);
        self.situations.push(sit);
        self.states.push(next);
        Ok(())
    }

    pub fn try_push(
        &mut self,
        theory: &ContractTheory,
        a: ActionTerm,
    ) -> std::result::Result<(), StepFailure> {
        let step = self.actions.len();
        let now = self.last().start;
        let t = a
            .time_value()
            .map_err(|error| StepFailure::Error { step, error })?;
        if t < now {
            return Err(StepFailure::TimeRegression {
                step,
                action: a,
                start: now,
            });
        }
        match poss_in_state(theory, self.last(), &a) {
            Ok(true) => {}
            Ok(false) => return Err(StepFailure::NotPossible { step, action: a }),
            Err(error) => return Err(StepFailure::Error { step, error }),
        }
        self.push_unchecked(theory, a)
            .map_err(|error| StepFailure::Error { step, error })
    }

    pub fn pop(&mut self) -> Option<ActionTerm> {
        if self.actions.is_empty() {
            return None;
        }
        self.situations.pop();
        self.states.pop();
        self.actions.pop()
    }

    fn annotate(&self, e: Error, a: &ActionTerm) -> Error {
        match e {
            Error::InconsistentEffect { atom, action, .. } => {
                let mut acts = self.actions.clone();
                acts.push(a.clone());
                Error::InconsistentEffect {
                    atom,
                    action,
                    trace: situation_of(&acts).to_string(),
                }
            }
            other => other,
        }
    }

    fn state_at(&self, theory: &ContractTheory, sit: &Term) -> Result<std::borrow::Cow<'_, State>> {
        let k = sit.do_depth();
        if k < self.situations.len() && &self.situations[k] == sit {
            return Ok(std::borrow::Cow::Borrowed(&self.states[k]));
        }
        let acts = situation_actions(sit)?;
        Ok(std::borrow::Cow::Owned(
            Trace::replay(theory, &acts)?.last().clone(),
        ))
    }
}

/// Progression-backed model: situations on the trace are answered from the
/// stored states, any other ground situation is progressed on demand.
impl SituationModel for Trace {
    fn fluent(&self, theory: &ContractTheory, atom: &GroundAtom, sit: &Term) -> Result<bool> {
        Ok(self.state_at(theory, sit)?.holds(atom))
    }

    fn start(&self, theory: &ContractTheory, sit: &Term) -> Result<Time> {
        if sit.is_ground() {
            return start(sit, theory);
        }
        Err(Error::Groundness(format!(
            "`{sit}` is not a ground situation"
        )))
    }
}

/// Whether every action of `s` is possible and no earlier than the start
/// of the situation it extends. Traces whose progression hits an
/// inconsistent effect are not executable.
pub fn executable(s: &Term, theory: &ContractTheory) -> bool {
    match situation_actions(s) {
        Ok(acts) => Trace::execute(theory, &acts).is_ok(),
        Err(_) => false,
    }
}

/// Whether the closed formula `f` holds at `s`, by progression from `S0`.
/// A free `now` in `f` denotes `s`.
pub fn holds_by_progression(f: &Formula, s: &Term, theory: &ContractTheory) -> Result<bool> {
    let acts = situation_actions(s)?;
    let trace = Trace::replay(theory, &acts)?;
    holds_on_trace(f, &trace, theory)
}

/// Like [`holds_by_progression`] with the states already computed; `now`
/// denotes the last situation of the trace.
pub fn holds_on_trace(f: &Formula, trace: &Trace, theory: &ContractTheory) -> Result<bool> {
    let g = f.at(trace.situation());
    if let Some(v) = g.free_vars().first() {
        return Err(Error::Evaluation(format!(
            "formula has free variable {}",
            v.name
        )));
    }
    Evaluator::new(theory, trace).eval_closed(&g)
}
