//! The reified obligation fluent `Obl(agent, literal, deadline)` and the
//! two obligation-producing actions that alone affect it.
//!
//! `oblige(ag, l, d)` makes `Obl(ag, l, d)` true; `release(ag, l, d)` makes
//! it false; nothing else touches it, so an obligation persists until it is
//! released. Fulfilment and violation are derived statuses and never delete
//! the `Obl` atom.

use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::progression::{State, Trace};
use crate::regression::{holds, Method};
use crate::term::{name, situation_actions, LiteralTerm, Sort, Term, Time, Var};
use crate::theory::{
    formal_params, start, ActionDecl, ContractTheory, EffectCase, FluentDecl, GroundAtom,
    SuccessorStateAxiom, OBL, OBLIGE, RELEASE,
};

fn obligation_params() -> Vec<Var> {
    vec![
        Var::new("ag", Sort::AnyObject),
        Var::new("l", Sort::Literal),
        Var::new("d", Sort::Time),
    ]
}

pub fn obligation_fluent() -> FluentDecl {
    FluentDecl {
        name: name(OBL),
        params: vec![Sort::AnyObject, Sort::Literal, Sort::Time],
        span: None,
    }
}

pub fn obligation_action(symbol: &str) -> ActionDecl {
    ActionDecl {
        name: name(symbol),
        params: obligation_params(),
        time_var: Var::new("t", Sort::Time),
        span: None,
    }
}

fn obligation_case(symbol: &str) -> EffectCase {
    let params = obligation_params();
    EffectCase {
        action: name(symbol),
        fluent_args: params.iter().cloned().map(Term::Var).collect(),
        params,
        time_var: Var::new("t", Sort::Time),
        extra: Vec::new(),
        guard: Formula::True,
        span: None,
    }
}

/// `Obl(ag, l, d, do(a, s)) <-> (exists t . a = oblige(ag, l, d)@t)
///   | (Obl(ag, l, d, s) & not exists t . a = release(ag, l, d)@t)`
pub fn obligation_ssa() -> SuccessorStateAxiom {
    SuccessorStateAxiom {
        fluent: name(OBL),
        params: formal_params(&obligation_fluent().params),
        positive: vec![obligation_case(OBLIGE)],
        negative: vec![obligation_case(RELEASE)],
        span: None,
    }
}

/// A ground obligation: `agent` must bring about `condition` by `deadline`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObligationLiteral {
    pub agent: Term,
    pub condition: LiteralTerm,
    pub deadline: Time,
}

impl ObligationLiteral {
    pub fn new(agent: Term, condition: LiteralTerm, deadline: Time) -> Self {
        ObligationLiteral {
            agent,
            condition,
            deadline,
        }
    }

    pub fn args(&self) -> Vec<Term> {
        vec![
            self.agent.clone(),
            Term::Lit(self.condition.clone()),
            Term::Time(self.deadline),
        ]
    }

    pub fn atom(&self, sit: Term) -> Formula {
        Formula::Fluent {
            fluent: name(OBL),
            args: self.args(),
            sit,
        }
    }

    pub fn from_atom(atom: &GroundAtom) -> Result<Self> {
        match (&*atom.symbol, atom.args.as_slice()) {
            (OBL, [agent, Term::Lit(lit), Term::Time(d)]) => Ok(ObligationLiteral {
                agent: agent.clone(),
                condition: lit.clone(),
                deadline: *d,
            }),
            _ => Err(Error::Sort(format!("`{atom}` is not an obligation"))),
        }
    }

    /// The condition as a formula at `sit`.
    pub fn condition_at(&self, sit: Term) -> Formula {
        let atom = Formula::Fluent {
            fluent: self.condition.fluent.clone(),
            args: self.condition.args.clone(),
            sit,
        };
        if self.condition.positive {
            atom
        } else {
            Formula::not(atom)
        }
    }
}

impl fmt::Display for ObligationLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}, {}, {})",
            OBL, self.agent, self.condition, self.deadline
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObligationStatus {
    Pending,
    Fulfilled,
    Violated,
    Absent,
}

impl ObligationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ObligationStatus::Pending => "pending",
            ObligationStatus::Fulfilled => "fulfilled",
            ObligationStatus::Violated => "violated",
            ObligationStatus::Absent => "absent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "pending" => ObligationStatus::Pending,
            "fulfilled" => ObligationStatus::Fulfilled,
            "violated" => ObligationStatus::Violated,
            "absent" => ObligationStatus::Absent,
            _ => return None,
        })
    }
}

impl fmt::Display for ObligationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn classify(in_force: bool, satisfied: bool, start: Time, deadline: Time) -> ObligationStatus {
    match (in_force, satisfied) {
        (false, _) => ObligationStatus::Absent,
        (true, true) => ObligationStatus::Fulfilled,
        (true, false) if start > deadline => ObligationStatus::Violated,
        (true, false) => ObligationStatus::Pending,
    }
}

/// Status of `o` at the ground situation `s`, deciding `Obl` and the
/// condition with the given method.
pub fn status_with(
    o: &ObligationLiteral,
    s: &Term,
    theory: &ContractTheory,
    method: Method,
) -> Result<ObligationStatus> {
    let in_force = holds(&o.atom(s.clone()), s, theory, method)?;
    let satisfied = in_force && holds(&o.condition_at(s.clone()), s, theory, method)?;
    Ok(classify(in_force, satisfied, start(s, theory)?, o.deadline))
}

pub fn status(
    o: &ObligationLiteral,
    s: &Term,
    theory: &ContractTheory,
) -> Result<ObligationStatus> {
    status_with(o, s, theory, Method::Progression)
}

/// Status of `o` in an explicit progressed state.
pub fn status_in_state(o: &ObligationLiteral, state: &State) -> ObligationStatus {
    let in_force = state.holds(&GroundAtom {
        symbol: name(OBL),
        args: o.args(),
    });
    let cond = GroundAtom {
        symbol: o.condition.fluent.clone(),
        args: o.condition.args.clone(),
    };
    let satisfied = state.holds(&cond) == o.condition.positive;
    classify(in_force, satisfied, state.start, o.deadline)
}

/// Every obligation in force in `state` with its status, ordered by
/// rendering.
pub fn obligations_in_state(state: &State) -> Vec<(ObligationLiteral, ObligationStatus)> {
    let mut out: Vec<(ObligationLiteral, ObligationStatus)> = state
        .facts
        .iter()
        .filter(|a| &*a.symbol == OBL)
        .filter_map(|a| ObligationLiteral::from_atom(a).ok())
        .map(|o| {
            let st = status_in_state(&o, state);
            (o, st)
        })
        .collect();
    out.sort_by_cached_key(|(o, _)| o.to_string());
    out
}

/// Every obligation in force at `s` with its status.
pub fn obligations_at(
    s: &Term,
    theory: &ContractTheory,
) -> Result<Vec<(ObligationLiteral, ObligationStatus)>> {
    let trace = Trace::replay(theory, &situation_actions(s)?)?;
    Ok(obligations_in_state(trace.last()))
}
