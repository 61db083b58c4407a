mod common;

use common::{actions, sale, situation};
use scl_core::obligation::{obligations_at, status, status_with};
use scl_core::term::time;
use scl_core::theory::{action_time, start, GroundAtom};
use scl_core::{
    executable, precedes, progress, situation_actions, ContractTheory, Method, ObligationLiteral,
    ObligationStatus, State, Term,
};
use scl_testkit::{foundational_axioms, non_interference_on, persistence_on, scenario, Tally};

fn widget(th: &ContractTheory) -> Term {
    th.constant("widget").unwrap()
}

fn delivered_obligation(c: &scl_core::dsl::Contract) -> ObligationLiteral {
    let a = &actions(c, "oblige(seller, delivered(widget), deadline 10)@2")[0];
    ObligationLiteral::from_atom(&GroundAtom {
        symbol: scl_core::term::name(scl_core::theory::OBL),
        args: a.args.clone(),
    })
    .unwrap()
}

#[test]
fn foundational_axioms_depth_four() {
    let t = foundational_axioms(4);
    assert!(t.cases > 1000);
    assert!(t.ok(), "{:#?}", t.failures);
}

#[test]
fn situation_structure() {
    let c = sale();
    let s1 = situation(&c, "pay(widget)@1");
    assert!(precedes(&Term::S0, &s1).unwrap());
    assert!(!precedes(&s1, &Term::S0).unwrap());
    assert!(!precedes(&s1, &s1).unwrap());
    assert!(situation_actions(&Term::S0).unwrap().is_empty());
    let s2 = situation(&c, "pay(widget)@1, deliver(widget)@5");
    let acts = situation_actions(&s2).unwrap();
    assert_eq!(acts, actions(&c, "pay(widget)@1, deliver(widget)@5"));
    assert_eq!(acts.len(), s2.do_depth());
    assert_eq!(action_time(&acts[0]).unwrap(), time(1));
    assert_eq!(start(&Term::S0, &c.theory).unwrap(), time(0));
    assert_eq!(start(&s2, &c.theory).unwrap(), time(5));
}

#[test]
fn executability() {
    let c = sale();
    assert!(executable(&Term::S0, &c.theory));
    assert!(executable(&situation(&c, "pay(widget)@1, deliver(widget)@5"), &c.theory));
    assert!(!executable(&situation(&c, "pay(widget)@5, deliver(widget)@1"), &c.theory));
    assert!(!executable(&situation(&c, "deliver(widget)@1"), &c.theory));
}

#[test]
fn progression_examples() {
    let c = sale();
    let th = &c.theory;
    let s0 = State::initial(th);
    let paid = GroundAtom {
        symbol: scl_core::term::name("paid"),
        args: vec![widget(th)],
    };
    let s1 = progress(&s0, &actions(&c, "pay(widget)@1")[0], th).unwrap();
    assert_eq!(s1.facts.iter().collect::<Vec<_>>(), vec![&paid]);
    let s2 = progress(
        &s1,
        &actions(&c, "oblige(seller, delivered(widget), deadline 10)@2")[0],
        th,
    )
    .unwrap();
    assert_eq!(s2.facts.len(), 2);
    assert!(s2.holds(&paid));
    let s3 = progress(&s2, &actions(&c, "noop@4")[0], th).unwrap();
    assert_eq!(s3.facts, s2.facts);
    assert_eq!(s3.start, time(4));
}

#[test]
fn obligation_lifecycle() {
    let c = sale();
    let th = &c.theory;
    let o = delivered_obligation(&c);
    let st = |s: &str| status(&o, &situation(&c, s), th).unwrap();
    assert_eq!(st(""), ObligationStatus::Absent);
    assert_eq!(
        st("pay(widget)@1, oblige(seller, delivered(widget), deadline 10)@2"),
        ObligationStatus::Pending
    );
    assert_eq!(
        st("pay(widget)@1, oblige(seller, delivered(widget), deadline 10)@2, deliver(widget)@5"),
        ObligationStatus::Fulfilled
    );
    assert_eq!(
        st("pay(widget)@1, oblige(seller, delivered(widget), deadline 10)@2, noop@11"),
        ObligationStatus::Violated
    );
    assert_eq!(
        st("oblige(seller, delivered(widget), deadline 10)@2, release(seller, delivered(widget), deadline 10)@3"),
        ObligationStatus::Absent
    );
    // unrelated actions leave the obligation in force
    assert_eq!(
        st("oblige(seller, delivered(widget), deadline 10)@2, pay(widget)@4"),
        ObligationStatus::Pending
    );
    // both methods classify alike
    let s = situation(&c, "pay(widget)@1, oblige(seller, delivered(widget), deadline 10)@2, noop@11");
    assert_eq!(
        status_with(&o, &s, th, Method::Regression).unwrap(),
        status_with(&o, &s, th, Method::Progression).unwrap()
    );
}

#[test]
fn obligation_sets() {
    let c = sale();
    let at = |s: &str| obligations_at(&situation(&c, s), &c.theory).unwrap();
    assert!(at("").is_empty());
    assert_eq!(
        at("oblige(seller, delivered(widget), deadline 10)@2, oblige(buyer, paid(widget), deadline 3)@2").len(),
        2
    );
    assert!(at("oblige(seller, delivered(widget), deadline 10)@2, release(seller, delivered(widget), deadline 10)@2").is_empty());
}

#[test]
fn persistence_and_non_interference() {
    let mut persist = Tally::default();
    let mut inter = Tally::default();
    for seed in 0..15 {
        let sc = scenario(seed, 4);
        persist.merge(persistence_on(&sc));
        inter.merge(non_interference_on(&sc));
    }
    assert!(persist.cases > 100 && inter.cases > 100);
    assert!(persist.ok(), "{:#?}", persist.failures);
    assert!(inter.ok(), "{:#?}", inter.failures);
}
