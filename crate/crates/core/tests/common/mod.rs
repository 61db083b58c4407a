#![allow(dead_code)]

use scl_core::dsl::{self, Contract};
use scl_core::{ActionTerm, Formula, Term};

pub fn sale() -> Contract {
    let src = include_str!("../../../../contracts/sale.scl");
    dsl::load(src).unwrap_or_else(|d| panic!("sale.scl: {d:?}"))
}

pub fn formula(c: &Contract, src: &str) -> Formula {
    dsl::parse_formula(src, &c.theory).unwrap_or_else(|d| panic!("{src}: {d}"))
}

pub fn actions(c: &Contract, src: &str) -> Vec<ActionTerm> {
    dsl::parse_actions(src, &c.theory).unwrap_or_else(|d| panic!("{src}: {d}"))
}

pub fn situation(c: &Contract, src: &str) -> Term {
    scl_core::situation_of(&actions(c, src))
}
