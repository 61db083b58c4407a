mod common;

use common::{formula, sale, situation};
use proptest::prelude::*;
use scl_core::eval::evaluate_initial;
use scl_core::regression::{is_regressable, regress_step, regress_stepwise, Regressor};
use scl_core::{holds, regress, simplify, Formula, Method, Term};
use scl_testkit::{random_formula_at, random_theory, regression_equivalence, seeded, TheoryShape};

#[test]
fn regressability() {
    let c = sale();
    let s = situation(&c, "pay(widget)@1");
    assert!(is_regressable(&formula(&c, "paid(widget)").at(&s)));
    assert!(!is_regressable(&Formula::Precedes(Term::S0, s)));
    let free = Formula::fluent(
        "paid",
        vec![c.theory.constant("widget").unwrap()],
        Term::var("s", scl_core::Sort::Situation),
    );
    assert!(!is_regressable(&free));
}

#[test]
fn single_steps() {
    let c = sale();
    let paid = formula(&c, "paid(widget)");
    let after_pay = paid.at(&situation(&c, "pay(widget)@1"));
    assert_eq!(simplify(&regress_step(&after_pay, &c.theory).unwrap()), Formula::True);
    let after_deliver = paid.at(&situation(&c, "deliver(widget)@5"));
    assert_eq!(
        simplify(&regress_step(&after_deliver, &c.theory).unwrap()),
        paid.at(&Term::S0)
    );
    let uniform = paid.at(&Term::S0);
    assert_eq!(regress(&uniform, &c.theory).unwrap(), uniform);
}

#[test]
fn full_regression_examples() {
    let c = sale();
    let s = situation(&c, "oblige(seller, delivered(widget), deadline 10)@2");
    let obl = formula(&c, "Obl(seller, delivered(widget), 10)");
    assert_eq!(regress(&obl.at(&s), &c.theory).unwrap(), Formula::True);
    let s = situation(&c, "pay(widget)@1, deliver(widget)@5");
    let del = formula(&c, "delivered(widget)");
    assert_eq!(regress(&del.at(&s), &c.theory).unwrap(), Formula::True);
    for m in [Method::Regression, Method::Progression] {
        assert!(holds(&del, &s, &c.theory, m).unwrap());
        assert!(!holds(&del, &Term::S0, &c.theory, m).unwrap());
    }
}

#[test]
fn initial_database_is_closed_world() {
    let c = sale();
    let f = |s: &str| formula(&c, s).at(&Term::S0);
    assert!(!evaluate_initial(&f("paid(widget)"), &c.theory).unwrap());
    assert!(evaluate_initial(&f("exists i: Item . not paid(i)"), &c.theory).unwrap());
    assert!(evaluate_initial(&f("forall x: Agent . x = buyer | x = seller"), &c.theory).unwrap());
    let g = formula(&c, "not paid(widget) & start = 0");
    assert_eq!(
        holds(&g, &Term::S0, &c.theory, Method::Progression).unwrap(),
        evaluate_initial(&g.at(&Term::S0), &c.theory).unwrap()
    );
}

#[test]
fn random_theories_agree() {
    let mut total = scl_testkit::Tally::default();
    for seed in 1000..1012 {
        total.merge(regression_equivalence(seed, 4, 20));
    }
    assert!(total.cases > 10_000, "{} cases", total.cases);
    assert!(total.ok(), "{:#?}", total.failures);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The memoized atom-wise regressor decides the same as iterated
    /// single steps.
    #[test]
    fn stepwise_agrees(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let th = random_theory(&mut rng, TheoryShape::default());
        let acts: Vec<_> = th
            .ground_actions()
            .unwrap()
            .into_iter()
            .filter(|a| !scl_core::theory::is_reserved_action(&a.symbol))
            .map(|a| a.with_time(th.init.start))
            .collect();
        let s1 = scl_core::situation_of(&acts[..1]);
        let s2 = scl_core::situation_of(&acts[..acts.len().min(3)]);
        let sits = [Term::S0, s1.clone(), s2.clone()];
        let f = random_formula_at(&mut rng, &th, &[], 3, &sits, &acts);
        let a = Regressor::new(&th).regress(&f).and_then(|g| evaluate_initial(&g, &th));
        let b = regress_stepwise(&f, &th).and_then(|g| evaluate_initial(&g, &th));
        prop_assert_eq!(a.ok(), b.ok());
    }
}
