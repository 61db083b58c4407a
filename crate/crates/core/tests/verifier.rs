mod common;

use common::{actions, sale};
use scl_core::golog::{Interpreter, Procedures};
use scl_core::verify::{enumerate_prefixes, Assertion};
use scl_core::{precedes, verify, ExecBounds, Formula, ObligationStatus, Program, Property};
use scl_testkit::{verifier_laws, LawReport};

#[test]
fn sale_properties() {
    let c = sale();
    let b = ExecBounds::default();
    let done = &c.properties["done"];
    assert!(matches!(
        done.property,
        Property::AtTermination(Assertion::Status(_, ObligationStatus::Fulfilled))
    ));
    let v = verify(&done.property, &c.programs["main"], &c.procs, &c.theory, b).unwrap();
    assert!(v.holds);
    assert_eq!(v.executions, 1);
    assert_eq!(v.label(), "holds");

    let on_time = &c.properties["on_time"];
    assert_eq!(&*on_time.program, "late");
    let v = verify(&on_time.property, &c.programs["late"], &c.procs, &c.theory, b).unwrap();
    assert!(!v.holds);
    assert_eq!(
        v.trace.unwrap(),
        actions(
            &c,
            "pay(widget)@1, oblige(seller, delivered(widget), deadline 10)@2, noop@11"
        )
    );
}

#[test]
fn empty_execution_sets() {
    let c = sale();
    let v = verify(
        &Property::ExistsExecution(Formula::True),
        &Program::Test(Formula::False),
        &Procedures::new(),
        &c.theory,
        ExecBounds::default(),
    )
    .unwrap();
    assert!(!v.holds);
    assert_eq!(v.executions, 0);
    let v = verify(
        &Property::Always(Formula::False),
        &Program::Test(Formula::False),
        &Procedures::new(),
        &c.theory,
        ExecBounds::default(),
    )
    .unwrap();
    assert!(v.holds && v.trace.is_none());
}

#[test]
fn truncated_verdicts_are_labelled() {
    let c = sale();
    let p = scl_core::dsl::parse_program("star(noop@?)", &c).unwrap();
    let v = verify(
        &Property::Always(Formula::True),
        &p,
        &c.procs,
        &c.theory,
        ExecBounds::default(),
    )
    .unwrap();
    assert!(v.truncated);
    assert_eq!(v.label(), "holds within bounds");
}

#[test]
fn prefixes_of_an_execution() {
    let c = sale();
    let it = Interpreter::new(&c.theory, &c.procs, ExecBounds::default());
    let p = scl_core::dsl::parse_program("pay(widget)@1 ; deliver(widget)@2", &c).unwrap();
    let r = it.first_solution(&p).unwrap().unwrap();
    let ps = enumerate_prefixes(&r);
    assert_eq!(ps.len(), 3);
    for (i, a) in ps.iter().enumerate() {
        assert!(a == &r.situation || precedes(a, &r.situation).unwrap());
        for b in &ps[i + 1..] {
            assert!(precedes(a, b).unwrap());
        }
    }
}

#[test]
fn inconsistent_effects_fail_verification() {
    let src = r#"contract Clash {
      fluent lit;
      action toggle at t causes: lit, not lit;
      program main = nil | toggle@1;
      property anything = always true;
    }"#;
    let c = scl_core::dsl::load(src).unwrap_or_else(|d| panic!("{d:?}"));
    let def = &c.properties["anything"];
    let v = verify(
        &def.property,
        &c.programs["main"],
        &c.procs,
        &c.theory,
        ExecBounds::default(),
    )
    .unwrap();
    assert!(!v.holds);
    assert_eq!(v.trace.unwrap().len(), 1);
    assert!(v.error.unwrap().contains("inconsistent"));
}

#[test]
fn invariants_on_random_programs() {
    let mut report = LawReport::default();
    for seed in 0..10 {
        report.merge(verifier_laws(seed, 8, 6));
    }
    assert!(report.checked >= 60, "{report:?}");
    assert!(report.tally.ok(), "{:#?}", report.tally.failures);
}
