//! Every contract under `contracts/` loads, round-trips through the
//! canonical rendering, and has checkable properties.

use std::path::PathBuf;

use scl_core::dsl;
use scl_core::{verify, ExecBounds};

fn corpus() -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../contracts"));
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scl"))
        .map(|p| {
            let src = std::fs::read_to_string(&p).unwrap();
            (p, src)
        })
        .collect();
    out.sort();
    out
}

#[test]
fn corpus_is_large_enough() {
    assert!(corpus().len() >= 20);
}

#[test]
fn corpus_loads_and_round_trips() {
    for (path, src) in corpus() {
        let spec = dsl::parse(&src).unwrap_or_else(|d| panic!("{}: {d:?}", path.display()));
        let text = dsl::render(&spec);
        let again = dsl::parse(&text).unwrap_or_else(|d| panic!("{}: {d:?}\n{text}", path.display()));
        assert_eq!(again, spec, "{}", path.display());
        assert_eq!(dsl::render(&again), text, "{}", path.display());
    }
}

#[test]
fn corpus_properties_evaluate() {
    for (path, src) in corpus() {
        let c = dsl::load(&src).unwrap();
        for (name, def) in &c.properties {
            let v = verify(
                &def.property,
                &c.programs[&def.program],
                &c.procs,
                &c.theory,
                ExecBounds::default(),
            );
            let v = v.unwrap_or_else(|e| panic!("{} {name}: {e}", path.display()));
            println!("{} {name}: {} ({} executions)", path.display(), v.label(), v.executions);
        }
    }
}

#[test]
fn layout_variants_share_one_canonical_form() {
    let canon = |f: &str| {
        let src = corpus()
            .into_iter()
            .find(|(p, _)| p.file_name().unwrap() == f)
            .unwrap()
            .1;
        dsl::render(&dsl::parse(&src).unwrap())
    };
    let base = canon("sale.scl");
    for v in ["sale_compact.scl", "sale_commented.scl", "sale_spaced.scl"] {
        assert_eq!(canon(v), base, "{v}");
    }
}
