//! Bounded exhaustive checking of contract properties over every
//! terminating execution of a program.

use std::fmt;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::golog::{Event, ExecBounds, ExecutionResult, Interpreter, Procedures, Program};
use crate::obligation::{status_in_state, ObligationLiteral, ObligationStatus};
use crate::progression::{holds_on_trace, Trace};
use crate::term::{situation_of, ActionTerm, Term};
use crate::theory::ContractTheory;

/// What must hold in a terminating situation.
#[derive(Clone, Debug, PartialEq)]
pub enum Assertion {
    Formula(Formula),
    Status(ObligationLiteral, ObligationStatus),
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Formula(g) => write!(f, "{g}"),
            Assertion::Status(o, st) => {
                write!(f, "{st}({}, {}, {})", o.agent, o.condition, o.deadline)
            }
        }
    }
}

/// Formulas are evaluated with `now` denoting the situation checked.
#[derive(Clone, Debug, PartialEq)]
pub enum Property {
    AtTermination(Assertion),
    Always(Formula),
    ExistsExecution(Formula),
    NoViolatedObligationsAtTermination,
    /// Holds at every proper prefix of each terminating situation.
    SubtraceAll(Formula),
}

impl Property {
    pub fn is_existential(&self) -> bool {
        matches!(self, Property::ExistsExecution(_))
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::AtTermination(a) => write!(f, "at_end {a}"),
            Property::Always(g) => write!(f, "always {g}"),
            Property::ExistsExecution(g) => write!(f, "possible {g}"),
            Property::NoViolatedObligationsAtTermination => f.write_str("no_violations"),
            Property::SubtraceAll(g) => write!(f, "subtraces {g}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    /// Counterexample for a failed universal property, witness for a
    /// successful existential one.
    pub trace: Option<Vec<ActionTerm>>,
    /// Error met on the counterexample trace, if that is why it failed.
    pub error: Option<String>,
    pub executions: usize,
    pub truncated: bool,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match (self.holds, self.truncated) {
            (true, true) => "holds within bounds",
            (true, false) => "holds",
            (false, _) => "fails",
        }
    }
}

/// `S0` through the terminating situation of `r`, in order.
pub fn enumerate_prefixes(r: &ExecutionResult) -> Vec<Term> {
    (0..=r.actions.len())
        .map(|k| situation_of(&r.actions[..k]))
        .collect()
}

fn check_formula(f: &Formula, trace: &Trace, theory: &ContractTheory) -> Result<bool> {
    holds_on_trace(f, trace, theory)
}

/// Whether the execution `actions` satisfies the per-trace part of `prop`
/// (for `ExistsExecution`, whether it is a witness).
pub fn check_execution(
    prop: &Property,
    actions: &[ActionTerm],
    theory: &ContractTheory,
) -> Result<bool> {
    let full = Trace::replay(theory, actions)?;
    match prop {
        Property::AtTermination(Assertion::Formula(f)) | Property::ExistsExecution(f) => {
            check_formula(f, &full, theory)
        }
        Property::AtTermination(Assertion::Status(o, st)) => {
            Ok(status_in_state(o, full.last()) == *st)
        }
        Property::NoViolatedObligationsAtTermination => {
            Ok(crate::obligation::obligations_in_state(full.last())
                .iter()
                .all(|(_, st)| *st != ObligationStatus::Violated))
        }
        Property::Always(f) | Property::SubtraceAll(f) => {
            let upto = match prop {
                Property::Always(_) => actions.len() + 1,
                _ => actions.len(),
            };
            let mut trace = Trace::initial(theory);
            for k in 0..upto {
                if !check_formula(f, &trace, theory)? {
                    return Ok(false);
                }
                if k < actions.len() {
                    trace.push_unchecked(theory, actions[k].clone())?;
                }
            }
            Ok(true)
        }
    }
}

fn least(
    slot: &mut Option<(Vec<ActionTerm>, Option<String>)>,
    actions: &[ActionTerm],
    error: Option<String>,
) {
    if slot
        .as_ref()
        .is_none_or(|(best, _)| actions < best.as_slice())
    {
        *slot = Some((actions.to_vec(), error));
    }
}

/// Checks `prop` over every execution of `program` from `S0` within
/// `bounds`. An execution error counts as a failure, with the erroring
/// trace as counterexample. Reported traces are the lexicographically
/// least qualifying ones.
pub fn verify(
    prop: &Property,
    program: &Program,
    procs: &Procedures,
    theory: &ContractTheory,
    bounds: ExecBounds,
) -> Result<Verdict> {
    let bounds = ExecBounds {
        max_results: None,
        ..bounds
    };
    let interp = Interpreter::new(theory, procs, bounds);
    let mut executions = 0;
    let mut failing: Option<(Vec<ActionTerm>, Option<String>)> = None;
    let mut witness: Option<(Vec<ActionTerm>, Option<String>)> = None;
    let mut hard: Option<Error> = None;
    let truncated = interp.run_with(program, Trace::initial(theory), &mut |ev| {
        match ev {
            Event::Result(r) => {
                executions += 1;
                match check_execution(prop, &r.actions, theory) {
                    Ok(ok) => {
                        if prop.is_existential() {
                            if ok {
                                least(&mut witness, &r.actions, None);
                            }
                        } else if !ok {
                            least(&mut failing, &r.actions, None);
                        }
                    }
                    Err(e) => {
                        hard = Some(e);
                        return ControlFlow::Break(());
                    }
                }
            }
            Event::Failure { actions, error } => {
                executions += 1;
                least(&mut failing, &actions, Some(error.to_string()));
            }
        }
        ControlFlow::Continue(())
    })?;
    if let Some(e) = hard {
        return Err(e);
    }
    let (holds, chosen) = if prop.is_existential() {
        match failing {
            Some(f) => (false, Some(f)),
            None => (witness.is_some(), witness),
        }
    } else {
        (failing.is_none(), failing)
    };
    let (trace, error) = match chosen {
        Some((t, e)) => (Some(t), e),
        None => (None, None),
    };
    Ok(Verdict {
        holds,
        trace,
        error,
        executions,
        truncated,
    })
}
