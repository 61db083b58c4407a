//! GOLOG-style complex actions executed against a contract theory.
//!
//! [`Interpreter::run`] enumerates the terminating situations of a program
//! by macro-expansion into primitive action sequences: left branch of a
//! choice first, pick values in declaration order, zero star iterations
//! first. [`Interpreter::step`] exposes the single-transition view used by
//! the REPL; its transitive closure yields the same situations.

use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, Substitution};
use crate::obligation::{obligations_in_state, ObligationLiteral, ObligationStatus};
use crate::progression::{holds_on_trace, StepFailure, Trace};
use crate::term::{situation_of, ActionTerm, Name, Sort, Term, Var};
use crate::theory::ContractTheory;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Nil,
    /// A primitive action term, or an `Action`-sorted variable bound by a
    /// pick. A `?` time is instantiated to the current start time.
    Prim(Term),
    Test(Formula),
    Seq(Box<Program>, Box<Program>),
    Choice(Box<Program>, Box<Program>),
    Pick(Var, Box<Program>),
    Star(Box<Program>),
    If(Formula, Box<Program>, Box<Program>),
    While(Formula, Box<Program>),
    Call(Name, Vec<Term>),
}

impl Program {
    pub fn prim(a: ActionTerm) -> Program {
        Program::Prim(Term::Action(a))
    }

    pub fn seq(p: Program, q: Program) -> Program {
        Program::Seq(Box::new(p), Box::new(q))
    }

    pub fn choice(p: Program, q: Program) -> Program {
        Program::Choice(Box::new(p), Box::new(q))
    }

    pub fn star(p: Program) -> Program {
        Program::Star(Box::new(p))
    }

    pub fn pick(v: Var, p: Program) -> Program {
        Program::Pick(v, Box::new(p))
    }

    pub fn if_(c: Formula, p: Program, q: Program) -> Program {
        Program::If(c, Box::new(p), Box::new(q))
    }

    pub fn while_(c: Formula, p: Program) -> Program {
        Program::While(c, Box::new(p))
    }

    /// Sequential composition of a list, `Nil` when empty.
    pub fn sequence(items: impl IntoIterator<Item = Program>) -> Program {
        let mut items: Vec<Program> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Program::Nil;
        };
        while let Some(p) = items.pop() {
            acc = Program::seq(p, acc);
        }
        acc
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Program::Nil | Program::Prim(_) | Program::Test(_) | Program::Call(..) => 1,
            Program::Seq(p, q) | Program::Choice(p, q) | Program::If(_, p, q) => {
                1 + p.size() + q.size()
            }
            Program::Pick(_, p) | Program::Star(p) | Program::While(_, p) => 1 + p.size(),
        }
    }

    /// Applies a substitution of ground terms to every action, formula and
    /// call argument. Pick binders shadow.
    pub fn substitute(&self, sub: &Substitution) -> Program {
        if sub.is_empty() {
            return self.clone();
        }
        match self {
            Program::Nil => Program::Nil,
            Program::Prim(a) => Program::Prim(sub.apply_term(a)),
            Program::Test(f) => Program::Test(sub.apply(f)),
            Program::Seq(p, q) => Program::seq(p.substitute(sub), q.substitute(sub)),
            Program::Choice(p, q) => Program::choice(p.substitute(sub), q.substitute(sub)),
            Program::Pick(v, p) => {
                if sub.get(v).is_some() {
                    let mut inner = Substitution::new();
                    for d in sub.domain().filter(|d| *d != v) {
                        inner.insert_unchecked(d.clone(), sub.get(d).unwrap().clone());
                    }
                    Program::pick(v.clone(), p.substitute(&inner))
                } else {
                    Program::pick(v.clone(), p.substitute(sub))
                }
            }
            Program::Star(p) => Program::star(p.substitute(sub)),
            Program::If(c, p, q) => {
                Program::if_(sub.apply(c), p.substitute(sub), q.substitute(sub))
            }
            Program::While(c, p) => Program::while_(sub.apply(c), p.substitute(sub)),
            Program::Call(n, args) => {
                Program::Call(n.clone(), args.iter().map(|t| sub.apply_term(t)).collect())
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Nil => f.write_str("nil"),
            Program::Prim(a) => write!(f, "{a}"),
            Program::Test(c) => write!(f, "test({c})"),
            Program::Seq(p, q) => write!(f, "({p} ; {q})"),
            Program::Choice(p, q) => write!(f, "({p} | {q})"),
            Program::Pick(v, p) => write!(f, "(pick {}:{} . {p})", v.name, v.sort),
            Program::Star(p) => write!(f, "star({p})"),
            Program::If(c, p, q) => write!(f, "(if {c} then {p} else {q})"),
            Program::While(c, p) => write!(f, "(while {c} do {p})"),
            Program::Call(n, args) => {
                write!(f, "{n}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Procedure {
    pub name: Name,
    pub params: Vec<Var>,
    pub body: Program,
}

pub type Procedures = IndexMap<Name, Procedure>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecBounds {
    /// Primitive actions per execution.
    pub max_steps: usize,
    /// Iterations of any one star.
    pub max_star: usize,
    /// Stop after this many distinct executions.
    pub max_results: Option<usize>,
}

impl Default for ExecBounds {
    fn default() -> Self {
        ExecBounds {
            max_steps: 20,
            max_star: 3,
            max_results: None,
        }
    }
}

/// One terminating execution.
#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionResult {
    pub actions: Vec<ActionTerm>,
    pub situation: Term,
    /// Obligations in force after each prefix, `S0` first.
    pub obligations: Vec<Vec<(ObligationLiteral, ObligationStatus)>>,
    /// Whether any bound cut the search that produced this result.
    pub truncated: bool,
}

impl ExecutionResult {
    pub fn final_obligations(&self) -> &[(ObligationLiteral, ObligationStatus)] {
        self.obligations.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn trace_string(&self) -> String {
        self.situation.to_string()
    }
}

/// Execution events reported by [`Interpreter::run_with`].
#[derive(Debug)]
pub enum Event {
    Result(ExecutionResult),
    /// The trace ending with the failing action hit an execution error,
    /// typically an inconsistent effect.
    Failure {
        actions: Vec<ActionTerm>,
        error: Error,
    },
}

#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub results: Vec<ExecutionResult>,
    pub truncated: bool,
}

/// Nested program frames allowed without consuming an action; guards
/// unproductive recursion.
const MAX_DEPTH: usize = 1024;

enum Frame {
    Prog(Program),
    /// Continue a star after one iteration started at trace length `mark`.
    StarIter {
        body: Program,
        remaining: usize,
        mark: usize,
    },
    WhileIter {
        cond: Formula,
        body: Program,
        mark: usize,
    },
}

pub struct Interpreter<'a> {
    pub theory: &'a ContractTheory,
    pub procs: &'a Procedures,
    pub bounds: ExecBounds,
}

struct Search<'a, 'f> {
    it: &'a Interpreter<'a>,
    trace: Trace,
    seen: HashSet<Vec<ActionTerm>>,
    truncated: bool,
    found: usize,
    sink: &'f mut dyn FnMut(Event) -> ControlFlow<()>,
}

type Flow = ControlFlow<()>;

impl<'a> Interpreter<'a> {
    pub fn new(theory: &'a ContractTheory, procs: &'a Procedures, bounds: ExecBounds) -> Self {
        Interpreter {
            theory,
            procs,
            bounds,
        }
    }

    /// Streams terminating executions of `p` from the end of `start` to
    /// `sink`, in enumeration order. Returns whether a bound was hit.
    pub fn run_with(
        &self,
        p: &Program,
        start: Trace,
        sink: &mut dyn FnMut(Event) -> ControlFlow<()>,
    ) -> Result<bool> {
        let mut search = Search {
            it: self,
            trace: start,
            seen: HashSet::new(),
            truncated: false,
            found: 0,
            sink,
        };
        let mut agenda = vec![Frame::Prog(p.clone())];
        let _ = search.exec(&mut agenda, 0)?;
        Ok(search.truncated)
    }

    /// All terminating executions of `p` from `S0`, or the first execution
    /// error met.
    pub fn run(&self, p: &Program) -> Result<RunOutcome> {
        self.run_from(p, Trace::initial(self.theory))
    }

    pub fn run_from(&self, p: &Program, start: Trace) -> Result<RunOutcome> {
        let mut results = Vec::new();
        let mut failure = None;
        let truncated = self.run_with(p, start, &mut |ev| match ev {
            Event::Result(r) => {
                results.push(r);
                ControlFlow::Continue(())
            }
            Event::Failure { error, .. } => {
                failure = Some(error);
                ControlFlow::Break(())
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        for r in &mut results {
            r.truncated = truncated;
        }
        Ok(RunOutcome { results, truncated })
    }

    pub fn first_solution(&self, p: &Program) -> Result<Option<ExecutionResult>> {
        let it = Interpreter {
            bounds: ExecBounds {
                max_results: Some(1),
                ..self.bounds
            },
            ..*self
        };
        Ok(it.run(p)?.results.into_iter().next())
    }

    /// Instantiates a primitive program term to the ground action it would
    /// perform in the last situation of `trace`.
    pub fn ground_action(&self, a: &Term, trace: &Trace) -> Result<ActionTerm> {
        let act = match a {
            Term::Action(act) => act,
            other => return Err(Error::Program(format!("`{other}` is not an action"))),
        };
        let mut act = act.clone();
        if *act.time == Term::Now {
            act.time = Box::new(Term::Time(trace.last().start));
        }
        if !act.is_ground() {
            return Err(Error::Program(format!("action `{act}` has free variables")));
        }
        Ok(act)
    }

    fn test(&self, f: &Formula, trace: &Trace) -> Result<bool> {
        holds_on_trace(f, trace, self.theory)
    }

    fn pick_domain(&self, v: &Var) -> Result<Vec<Term>> {
        match v.sort {
            Sort::Action => Ok(self
                .theory
                .ground_actions()?
                .into_iter()
                .map(Term::Action)
                .collect()),
            _ => self.theory.domain(&v.sort),
        }
    }

    fn call_body(&self, name: &Name, args: &[Term]) -> Result<Program> {
        let proc = self
            .procs
            .get(name)
            .ok_or_else(|| Error::Program(format!("undeclared procedure {name}")))?;
        if proc.params.len() != args.len() {
            return Err(Error::Program(format!(
                "{name} expects {} argument(s)",
                proc.params.len()
            )));
        }
        let sub = Substitution::from_pairs(proc.params.iter().cloned().zip(args.iter().cloned()))?;
        Ok(proc.body.substitute(&sub))
    }

    /// One-step continuations of `p` in the last situation of `trace`:
    /// the remaining program and the action performed, if any.
    pub fn step(&self, p: &Program, trace: &Trace) -> Result<Vec<(Program, Option<ActionTerm>)>> {
        self.trans(p, trace, 0)
    }

    fn trans(
        &self,
        p: &Program,
        trace: &Trace,
        depth: usize,
    ) -> Result<Vec<(Program, Option<ActionTerm>)>> {
        if depth > MAX_DEPTH {
            return Ok(Vec::new());
        }
        Ok(match p {
            Program::Nil => Vec::new(),
            Program::Prim(a) => {
                let act = self.ground_action(a, trace)?;
                let mut probe = trace.clone();
                match probe.try_push(self.theory, act.clone()) {
                    Ok(()) => vec![(Program::Nil, Some(act))],
                    Err(StepFailure::Error { error, .. }) => return Err(error),
                    Err(_) => Vec::new(),
                }
            }
            Program::Test(f) => {
                if self.test(f, trace)? {
                    vec![(Program::Nil, None)]
                } else {
                    Vec::new()
                }
            }
            Program::Seq(p1, q) => {
                let mut out: Vec<_> = self
                    .trans(p1, trace, depth + 1)?
                    .into_iter()
                    .map(|(r, a)| (Program::seq(r, (**q).clone()), a))
                    .collect();
                if self.is_final_rec(p1, trace, depth + 1)? {
                    out.extend(self.trans(q, trace, depth + 1)?);
                }
                out
            }
            Program::Choice(p1, q) => {
                let mut out = self.trans(p1, trace, depth + 1)?;
                out.extend(self.trans(q, trace, depth + 1)?);
                out
            }
            Program::Pick(v, body) => {
                let mut out = Vec::new();
                for value in self.pick_domain(v)? {
                    let sub = Substitution::from_pairs([(v.clone(), value)])?;
                    out.extend(self.trans(&body.substitute(&sub), trace, depth + 1)?);
                }
                out
            }
            Program::Star(body) => self
                .trans(body, trace, depth + 1)?
                .into_iter()
                .map(|(r, a)| (Program::seq(r, p.clone()), a))
                .collect(),
            Program::If(c, p1, q) => {
                if self.test(c, trace)? {
                    self.trans(p1, trace, depth + 1)?
                } else {
                    self.trans(q, trace, depth + 1)?
                }
            }
            Program::While(c, body) => {
                if self.test(c, trace)? {
                    self.trans(body, trace, depth + 1)?
                        .into_iter()
                        .map(|(r, a)| (Program::seq(r, p.clone()), a))
                        .collect()
                } else {
                    Vec::new()
                }
            }
            Program::Call(n, args) => self.trans(&self.call_body(n, args)?, trace, depth + 1)?,
        })
    }

    /// Whether `p` may terminate without further transitions.
    pub fn is_final(&self, p: &Program, trace: &Trace) -> Result<bool> {
        self.is_final_rec(p, trace, 0)
    }

    fn is_final_rec(&self, p: &Program, trace: &Trace, depth: usize) -> Result<bool> {
        if depth > MAX_DEPTH {
            return Ok(false);
        }
        Ok(match p {
            Program::Nil | Program::Star(_) => true,
            Program::Prim(_) | Program::Test(_) => false,
            Program::Seq(p1, q) => {
                self.is_final_rec(p1, trace, depth + 1)?
                    && self.is_final_rec(q, trace, depth + 1)?
            }
            Program::Choice(p1, q) => {
                self.is_final_rec(p1, trace, depth + 1)?
                    || self.is_final_rec(q, trace, depth + 1)?
            }
            Program::Pick(v, body) => {
                for value in self.pick_domain(v)? {
                    let sub = Substitution::from_pairs([(v.clone(), value)])?;
                    if self.is_final_rec(&body.substitute(&sub), trace, depth + 1)? {
                        return Ok(true);
                    }
                }
                false
            }
            Program::If(c, p1, q) => {
                if self.test(c, trace)? {
                    self.is_final_rec(p1, trace, depth + 1)?
                } else {
                    self.is_final_rec(q, trace, depth + 1)?
                }
            }
            // an iteration that changes nothing leaves the condition true
            Program::While(c, _) => !self.test(c, trace)?,
            Program::Call(n, args) => {
                self.is_final_rec(&self.call_body(n, args)?, trace, depth + 1)?
            }
        })
    }

    /// Terminating situations reachable by the transitive closure of
    /// [`Interpreter::step`], within `max_steps` actions.
    pub fn closure_results(&self, p: &Program) -> Result<Vec<Vec<ActionTerm>>> {
        let mut seen: HashSet<(Program, Vec<ActionTerm>)> = HashSet::new();
        let mut out: Vec<Vec<ActionTerm>> = Vec::new();
        let mut stack = vec![(p.clone(), Trace::initial(self.theory))];
        while let Some((prog, trace)) = stack.pop() {
            if !seen.insert((prog.clone(), trace.actions.clone())) {
                continue;
            }
            if self.is_final(&prog, &trace)? && !out.contains(&trace.actions) {
                out.push(trace.actions.clone());
            }
            for (rest, act) in self.step(&prog, &trace)? {
                match act {
                    None => stack.push((rest, trace.clone())),
                    Some(a) => {
                        if trace.actions.len() >= self.bounds.max_steps {
                            continue;
                        }
                        let mut next = trace.clone();
                        next.push_unchecked(self.theory, a)?;
                        stack.push((rest, next));
                    }
                }
            }
        }
        Ok(out)
    }
}

impl Search<'_, '_> {
    fn emit(&mut self) -> Flow {
        if !self.seen.insert(self.trace.actions.clone()) {
            return ControlFlow::Continue(());
        }
        let result = ExecutionResult {
            actions: self.trace.actions.clone(),
            situation: situation_of(&self.trace.actions),
            obligations: self.trace.states.iter().map(obligations_in_state).collect(),
            truncated: self.truncated,
        };
        self.found += 1;
        (self.sink)(Event::Result(result))?;
        match self.it.bounds.max_results {
            Some(n) if self.found >= n => ControlFlow::Break(()),
            _ => ControlFlow::Continue(()),
        }
    }

    /// Runs the agenda (top of stack executes next) to completion on every
    /// branch. The agenda is restored before returning.
    fn exec(&mut self, agenda: &mut Vec<Frame>, depth: usize) -> Result<Flow> {
        if depth > MAX_DEPTH {
            self.truncated = true;
            return Ok(ControlFlow::Continue(()));
        }
        let Some(frame) = agenda.pop() else {
            return Ok(self.emit());
        };
        let flow = self.exec_frame(&frame, agenda, depth);
        agenda.push(frame);
        flow
    }

    fn with<F>(
        &mut self,
        agenda: &mut Vec<Frame>,
        frames: Vec<Frame>,
        depth: usize,
        body: F,
    ) -> Result<Flow>
    where
        F: FnOnce(&mut Self, &mut Vec<Frame>, usize) -> Result<Flow>,
    {
        let n = frames.len();
        agenda.extend(frames);
        let r = body(self, agenda, depth);
        agenda.truncate(agenda.len() - n);
        r
    }

    fn push_then_exec(
        &mut self,
        agenda: &mut Vec<Frame>,
        frames: Vec<Frame>,
        depth: usize,
    ) -> Result<Flow> {
        self.with(agenda, frames, depth, |s, ag, d| s.exec(ag, d + 1))
    }

    fn exec_frame(&mut self, frame: &Frame, agenda: &mut Vec<Frame>, depth: usize) -> Result<Flow> {
        let it = self.it;
        match frame {
            Frame::StarIter {
                body,
                remaining,
                mark,
            } => {
                if self.trace.actions.len() == *mark {
                    // an iteration without actions adds nothing new
                    return Ok(ControlFlow::Continue(()));
                }
                self.star(body, *remaining, agenda, depth)
            }
            Frame::WhileIter { cond, body, mark } => {
                if self.trace.actions.len() == *mark {
                    return Ok(ControlFlow::Continue(()));
                }
                self.while_loop(cond, body, agenda, depth)
            }
            Frame::Prog(p) => match p {
                Program::Nil => self.exec(agenda, depth + 1),
                Program::Prim(a) => {
                    let act = it.ground_action(a, &self.trace)?;
                    if self.trace.actions.len() >= it.bounds.max_steps {
                        let mut probe = self.trace.clone();
                        if !matches!(
                            probe.try_push(it.theory, act),
                            Err(StepFailure::NotPossible { .. }
                                | StepFailure::TimeRegression { .. })
                        ) {
                            self.truncated = true;
                        }
                        return Ok(ControlFlow::Continue(()));
                    }
                    match self.trace.try_push(it.theory, act.clone()) {
                        Ok(()) => {
                            let r = self.exec(agenda, depth + 1);
                            self.trace.pop();
                            r
                        }
                        Err(StepFailure::Error {
                            error: e @ Error::InconsistentEffect { .. },
                            ..
                        }) => {
                            let mut actions = self.trace.actions.clone();
                            actions.push(act);
                            Ok((self.sink)(Event::Failure { actions, error: e }))
                        }
                        Err(StepFailure::Error { error, .. }) => Err(error),
                        Err(_) => Ok(ControlFlow::Continue(())),
                    }
                }
                Program::Test(f) => {
                    if it.test(f, &self.trace)? {
                        self.exec(agenda, depth + 1)
                    } else {
                        Ok(ControlFlow::Continue(()))
                    }
                }
                Program::Seq(p1, q) => self.push_then_exec(
                    agenda,
                    vec![Frame::Prog((**q).clone()), Frame::Prog((**p1).clone())],
                    depth,
                ),
                Program::Choice(p1, q) => {
                    if self
                        .push_then_exec(agenda, vec![Frame::Prog((**p1).clone())], depth)?
                        .is_break()
                    {
                        return Ok(ControlFlow::Break(()));
                    }
                    self.push_then_exec(agenda, vec![Frame::Prog((**q).clone())], depth)
                }
                Program::Pick(v, body) => {
                    for value in it.pick_domain(v)? {
                        let sub = Substitution::from_pairs([(v.clone(), value)])?;
                        let flow = self.push_then_exec(
                            agenda,
                            vec![Frame::Prog(body.substitute(&sub))],
                            depth,
                        )?;
                        if flow.is_break() {
                            return Ok(flow);
                        }
                    }
                    Ok(ControlFlow::Continue(()))
                }
                Program::Star(body) => self.star(body, it.bounds.max_star, agenda, depth),
                Program::If(c, p1, q) => {
                    let chosen = if it.test(c, &self.trace)? { p1 } else { q };
                    self.push_then_exec(agenda, vec![Frame::Prog((**chosen).clone())], depth)
                }
                Program::While(c, body) => self.while_loop(c, body, agenda, depth),
                Program::Call(n, args) => {
                    let body = it.call_body(n, args)?;
                    self.push_then_exec(agenda, vec![Frame::Prog(body)], depth)
                }
            },
        }
    }

    fn star(
        &mut self,
        body: &Program,
        remaining: usize,
        agenda: &mut Vec<Frame>,
        depth: usize,
    ) -> Result<Flow> {
        // zero further iterations first
        if self.exec(agenda, depth + 1)?.is_break() {
            return Ok(ControlFlow::Break(()));
        }
        if remaining == 0 {
            if !self.it.step(body, &self.trace)?.is_empty() {
                self.truncated = true;
            }
            return Ok(ControlFlow::Continue(()));
        }
        let mark = self.trace.actions.len();
        self.push_then_exec(
            agenda,
            vec![
                Frame::StarIter {
                    body: body.clone(),
                    remaining: remaining - 1,
                    mark,
                },
                Frame::Prog(body.clone()),
            ],
            depth,
        )
    }

    fn while_loop(
        &mut self,
        cond: &Formula,
        body: &Program,
        agenda: &mut Vec<Frame>,
        depth: usize,
    ) -> Result<Flow> {
        if !self.it.test(cond, &self.trace)? {
            return self.exec(agenda, depth + 1);
        }
        let mark = self.trace.actions.len();
        self.push_then_exec(
            agenda,
            vec![
                Frame::WhileIter {
                    cond: cond.clone(),
                    body: body.clone(),
                    mark,
                },
                Frame::Prog(body.clone()),
            ],
            depth,
        )
    }
}
