mod common;

use common::{actions, sale};
use scl_core::dsl;
use scl_core::golog::{Interpreter, Procedures};
use scl_core::{ExecBounds, Formula, Program, Trace};
use scl_testkit::{brute_force_agreement, golog_laws, LawReport};

fn run(c: &dsl::Contract, src: &str, bounds: ExecBounds) -> (Vec<String>, bool) {
    let p = dsl::parse_program(src, c).unwrap_or_else(|d| panic!("{src}: {d}"));
    let out = Interpreter::new(&c.theory, &c.procs, bounds).run(&p).unwrap();
    let traces = out
        .results
        .iter()
        .map(|r| {
            r.actions
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect();
    (traces, out.truncated)
}

#[test]
fn basic_programs() {
    let c = sale();
    let b = ExecBounds::default();
    assert_eq!(run(&c, "nil", b).0, vec![""]);
    assert!(run(&c, "test(false)", b).0.is_empty());
    assert_eq!(
        run(&c, "pay(widget)@1 ; deliver(widget)@5", b).0,
        vec!["pay(widget)@1, deliver(widget)@5"]
    );
    assert_eq!(
        run(&c, "pay(widget)@1 | test(true)", b).0,
        vec!["pay(widget)@1", ""]
    );
    assert!(run(&c, "deliver(widget)@1", b).0.is_empty());
}

#[test]
fn symbolic_times_take_the_current_start() {
    let c = sale();
    let (t, _) = run(&c, "noop@3 ; pay(widget)@?", ExecBounds::default());
    assert_eq!(t, vec!["noop@3, pay(widget)@3"]);
}

#[test]
fn step_bound_truncates() {
    let c = sale();
    let b = ExecBounds {
        max_steps: 1,
        ..ExecBounds::default()
    };
    let (t, truncated) = run(
        &c,
        "pay(widget)@1 ; oblige(seller, delivered(widget), deadline 10)@2 ; deliver(widget)@5",
        b,
    );
    assert!(t.is_empty());
    assert!(truncated);
    let (t, truncated) = run(&c, "star(noop@?)", ExecBounds::default());
    assert_eq!(t.len(), 4);
    assert!(truncated);
}

#[test]
fn control_structures() {
    let c = sale();
    let b = ExecBounds::default();
    assert_eq!(
        run(&c, "if paid(widget) then noop@1 else pay(widget)@1", b).0,
        vec!["pay(widget)@1"]
    );
    assert_eq!(
        run(&c, "while not delivered(widget) do (pick i: Item . (pay(i)@? | deliver(i)@?))", b).0,
        vec!["pay(widget)@0, deliver(widget)@0"]
    );
}

#[test]
fn procedures_may_recurse() {
    let src = r#"contract C {
      sort Item = {widget};
      action tick at t;
      proc ticks() = tick@? ; (nil | ticks());
      program main = ticks();
    }"#;
    let c = dsl::load(src).unwrap_or_else(|d| panic!("{d:?}"));
    let b = ExecBounds {
        max_steps: 3,
        ..ExecBounds::default()
    };
    let (t, truncated) = run(&c, "ticks()", b);
    assert_eq!(t.len(), 3);
    assert!(truncated);
}

#[test]
fn step_view() {
    let c = sale();
    let it = Interpreter::new(&c.theory, &c.procs, ExecBounds::default());
    let s0 = Trace::initial(&c.theory);
    let pay = actions(&c, "pay(widget)@1").remove(0);
    let p = Program::prim(pay.clone());
    assert_eq!(it.step(&p, &s0).unwrap(), vec![(Program::Nil, Some(pay.clone()))]);
    let star = Program::star(p.clone());
    assert!(it.is_final(&star, &s0).unwrap());
    assert!(!it.is_final(&p, &s0).unwrap());
    assert!(it.is_final(&Program::while_(Formula::False, p.clone()), &s0).unwrap());
    assert_eq!(it.closure_results(&star).unwrap().len(), 2);
}

#[test]
fn first_solution_is_head_of_run() {
    let c = sale();
    let it = Interpreter::new(&c.theory, &c.procs, ExecBounds::default());
    assert!(it.first_solution(&Program::Test(Formula::False)).unwrap().is_none());
    let main = &c.programs["main"];
    let first = it.first_solution(main).unwrap().unwrap();
    assert_eq!(
        first.actions,
        actions(
            &c,
            "pay(widget)@1, oblige(seller, delivered(widget), deadline 10)@2, deliver(widget)@5"
        )
    );
    let p = dsl::parse_program("star(pick i: Item . (pay(i)@? | noop@?))", &c).unwrap();
    let all = it.run(&p).unwrap().results;
    assert_eq!(it.first_solution(&p).unwrap().unwrap().actions, all[0].actions);
}

#[test]
fn results_are_executable_and_carry_obligations() {
    let c = sale();
    let it = Interpreter::new(&c.theory, &c.procs, ExecBounds::default());
    let r = it.first_solution(&c.programs["main"]).unwrap().unwrap();
    assert_eq!(r.obligations.len(), 4);
    assert!(r.obligations[2].len() == 1 && r.obligations[0].is_empty());
    assert!(scl_core::executable(&r.situation, &c.theory));
}

#[test]
fn laws_on_random_programs() {
    let mut report = LawReport::default();
    for seed in 0..12 {
        report.merge(golog_laws(seed, 5, 8));
    }
    assert!(report.checked >= 50, "{report:?}");
    assert!(report.tally.ok(), "{:#?}", report.tally.failures);
}

#[test]
fn run_matches_brute_force() {
    let mut report = LawReport::default();
    for seed in 0..12 {
        report.merge(brute_force_agreement(seed, 5, 8));
    }
    assert!(report.checked >= 50, "{report:?}");
    assert!(report.tally.ok(), "{:#?}", report.tally.failures);
}

#[test]
fn empty_procedures_table() {
    let c = sale();
    let procs = Procedures::new();
    let it = Interpreter::new(&c.theory, &procs, ExecBounds::default());
    let call = Program::Call(scl_core::term::name("missing"), Vec::new());
    assert!(it.run(&call).is_err());
}
