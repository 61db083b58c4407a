//! Situation calculus engine for smart-contract theories.
//!
//! A contract is written in the `.scl` language ([`dsl`]), lowered to a
//! [`ContractTheory`] (precondition axioms, successor state axioms, initial
//! database, obligation fluent), and then
//!
//! * queried at a situation by regression back to `S0` or by progression
//!   ([`regression`], [`progression`]),
//! * executed as GOLOG-style programs ([`golog`]),
//! * checked against properties over every bounded execution ([`verify`]).

pub mod dsl;
pub mod error;
pub mod eval;
pub mod formula;
pub mod golog;
pub mod obligation;
pub mod progression;
pub mod regression;
pub mod span;
pub mod term;
pub mod theory;
pub mod validate;
pub mod verify;

pub use error::{Error, Result};
pub use formula::{simplify, Formula, Substitution};
pub use golog::{ExecBounds, ExecutionResult, Program};
pub use obligation::{ObligationLiteral, ObligationStatus};
pub use progression::{executable, progress, State, Trace};
pub use regression::{holds, regress, Method};
pub use span::{Diagnostic, Span};
pub use term::{
    precedes, situation_actions, situation_of, ActionTerm, Name, Sort, Term, Time, Var,
};
pub use theory::ContractTheory;
pub use validate::validate;
pub use verify::{verify, Property, Verdict};
