//! Invalid documents are rejected with located diagnostics.

use std::path::PathBuf;

use proptest::prelude::*;
use scl_core::dsl;

fn fixtures() -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../contracts/invalid"));
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let src = std::fs::read_to_string(&p).unwrap();
            (p, src)
        })
        .collect();
    out.sort();
    out
}

fn within(src: &str, d: &scl_core::Diagnostic) -> bool {
    let Some(sp) = d.span else { return false };
    let lines = src.split('\n').count() as u32;
    sp.start <= sp.end && sp.end <= src.len() && sp.line >= 1 && sp.line <= lines && sp.col >= 1
}

#[test]
fn every_fixture_fails_with_located_diagnostics() {
    let fx = fixtures();
    assert!(fx.len() >= 10);
    for (path, src) in fx {
        let ds = match dsl::load(&src) {
            Ok(_) => panic!("{} loaded", path.display()),
            Err(ds) => ds,
        };
        assert!(!ds.is_empty());
        for d in &ds {
            assert!(within(&src, d), "{}: {d:?}", path.display());
        }
    }
}

fn messages(name: &str) -> Vec<(u32, String)> {
    let (_, src) = fixtures()
        .into_iter()
        .find(|(p, _)| p.file_name().unwrap() == name)
        .unwrap();
    dsl::load(&src)
        .err()
        .unwrap()
        .into_iter()
        .map(|d| (d.span.unwrap().line, d.message))
        .collect()
}

#[test]
fn specific_messages() {
    let m = messages("unknown_sort.scl");
    assert_eq!(m, vec![(4, "unknown sort Unknown".to_string())]);
    let m = messages("duplicate_fluent.scl");
    assert_eq!(m.len(), 1);
    assert_eq!(m[0].0, 4);
    assert!(messages("reserved_effect.scl")[0].1.contains("reserved"));
    assert!(messages("obl_effect.scl")[0].1.contains("Obl"));
    assert_eq!(messages("missing_semicolon.scl")[0].0, 3);
}

#[test]
fn minimal_contract() {
    let spec = dsl::parse("contract C { }").unwrap();
    assert_eq!(spec.name.text, "C");
    assert!(spec.items.is_empty());
    let c = dsl::load("contract C { }").unwrap();
    assert!(c.theory.init.facts.is_empty());
    assert_eq!(c.theory.init.start, scl_core::term::time(0));
    let text = dsl::render(&spec);
    assert_eq!(dsl::parse(&text).unwrap(), spec);
}

#[test]
fn sale_structure() {
    let src = include_str!("../../../contracts/sale.scl");
    let spec = dsl::parse(src).unwrap();
    // counted on the syntax tree, independently of lowering
    let count = |pred: fn(&dsl::ast::Item) -> bool| spec.items.iter().filter(|i| pred(i)).count();
    assert_eq!(count(|i| matches!(i, dsl::ast::Item::Fluent { .. })), 2);
    let user_actions = spec
        .items
        .iter()
        .filter(|i| matches!(i, dsl::ast::Item::Action(a) if a.name.text != "noop"))
        .count();
    assert_eq!(user_actions, 2);
    let c = dsl::load(src).unwrap();
    assert_eq!(c.theory.ssas.len(), 3);
    assert!(scl_core::validate(&c.theory).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Arbitrary input never panics; diagnostics stay inside the input
    /// and parsing is deterministic.
    #[test]
    fn arbitrary_text(src in "[ -~\n]{0,120}") {
        let a = dsl::load(&src).err();
        let b = dsl::load(&src).err();
        prop_assert_eq!(&a, &b);
        for d in a.unwrap_or_default() {
            prop_assert!(within(&src, &d), "{:?}", d);
        }
    }

    /// Mutations of a valid document: deleting one character.
    #[test]
    fn truncated_sale(cut in 0usize..900) {
        let src = include_str!("../../../contracts/sale.scl");
        let cut = cut.min(src.len() - 1);
        let mut s = src.to_string();
        if s.is_char_boundary(cut) {
            s.remove(cut);
        }
        match dsl::load(&s) {
            Ok(c) => { let _ = dsl::render(&dsl::parse(&s).unwrap()); drop(c); }
            Err(ds) => for d in ds { prop_assert!(within(&s, &d), "{:?}", d); },
        }
    }
}
