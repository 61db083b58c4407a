//! The `.scl` contract language.
//!
//! ```text
//! contract Sale {
//!   sort Agent = {buyer, seller};
//!   sort Item = {widget};
//!   fluent paid(Item);
//!   action pay(i: Item) at t
//!     poss: not paid(i)
//!     causes: paid(i);
//!   program main = pay(widget)@1 ; oblige(seller, paid(widget), deadline 10)@2;
//!   property done = at_end paid(widget);
//! }
//! ```
//!
//! [`parse`] checks syntax and names, [`lower`] builds the validated
//! [`Contract`], [`render`] prints the canonical form.

pub mod ast;
pub mod lexer;
pub mod lower;
pub mod parser;
mod render;

pub use lower::{lower, Contract, Ctx, PropertyDef, DEFAULT_PROGRAM};
pub use parser::parse_syntax;
pub use render::render;

use std::collections::HashMap;

use crate::formula::Formula;
use crate::golog::Program;
use crate::span::Diagnostic;
use crate::term::ActionTerm;
use crate::theory::ContractTheory;

/// Parses a document and resolves its names; the tree is returned only if
/// the document lowers without diagnostics.
pub fn parse(src: &str) -> Result<ast::Spec, Vec<Diagnostic>> {
    let spec = parse_syntax(src)?;
    lower(&spec)?;
    Ok(spec)
}

/// Parses, lowers and validates a document.
pub fn load(src: &str) -> Result<Contract, Vec<Diagnostic>> {
    lower(&parse_syntax(src)?)
}

fn with_parser<T>(
    src: &str,
    f: impl FnOnce(&mut parser::Parser) -> Result<T, Diagnostic>,
) -> Result<T, Diagnostic> {
    let mut p = parser::Parser::new(src)?;
    let v = f(&mut p)?;
    p.expect_eof()?;
    Ok(v)
}

/// A closed formula over `theory`; `now` is the situation it is asked at.
pub fn parse_formula(src: &str, theory: &ContractTheory) -> Result<Formula, Diagnostic> {
    let e = with_parser(src, |p| p.expr())?;
    let procs = HashMap::new();
    Ctx {
        theory,
        procs: &procs,
    }
    .formula(&e, &mut Vec::new())
}

/// A comma-separated list of action occurrences such as
/// `pay(widget)@1, deliver(widget)@5`; times may be `?`.
pub fn parse_actions(src: &str, theory: &ContractTheory) -> Result<Vec<ActionTerm>, Diagnostic> {
    let steps = with_parser(src, |p| {
        let mut out = Vec::new();
        if p.at_eof() {
            return Ok(out);
        }
        loop {
            out.push(p.step()?);
            if !p.eat_comma() {
                return Ok(out);
            }
        }
    })?;
    let procs = HashMap::new();
    let ctx = Ctx {
        theory,
        procs: &procs,
    };
    steps
        .iter()
        .map(|s| match s {
            ast::Prog::Step { name, args, time } => {
                ctx.action(name, args.as_deref().unwrap_or(&[]), time, &[])
            }
            _ => unreachable!("step() only yields steps"),
        })
        .collect()
}

/// A single program over a loaded contract.
pub fn parse_program(src: &str, contract: &Contract) -> Result<Program, Diagnostic> {
    let p = with_parser(src, |p| p.prog())?;
    let procs = contract
        .procs
        .iter()
        .map(|(n, pr)| {
            (
                n.to_string(),
                pr.params.iter().map(|v| v.sort.clone()).collect(),
            )
        })
        .collect();
    Ctx {
        theory: &contract.theory,
        procs: &procs,
    }
    .program(&p, &mut Vec::new())
}
