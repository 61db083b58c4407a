//! Acceptance suite. Prints one `PASS` or `FAIL` line per criterion and
//! exits non-zero if any criterion fails.
//!
//! `SCL_ACCEPT_SEEDS` overrides the number of random theories for the
//! regression criteria (default 200).

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use scl_core::dsl::{self, Contract};
use scl_core::golog::{Event, Interpreter};
use scl_core::theory::cartesian;
use scl_core::{holds, ActionTerm, ExecBounds, Formula, Method, Trace};
use scl_testkit::{LawReport, Tally};

const BUDGET: Duration = Duration::from_secs(300);

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn line(name: &'static str, pass: bool, detail: impl Into<String>) -> Line {
    Line {
        name,
        pass,
        detail: detail.into(),
    }
}

fn tally_line(name: &'static str, t: &Tally, extra: &str) -> Line {
    let mut detail = format!("{} cases, {} failures{extra}", t.cases, t.failures.len());
    if let Some(f) = t.failures.first() {
        detail.push_str(&format!("; first: {f}"));
    }
    line(name, t.ok() && t.cases > 0, detail)
}

fn root() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
}

fn scl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scl"))
        .args(args)
        .env_remove("SCL_COLOR")
        .output()
        .expect("scl binary runs")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn scl_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "scl"))
        .collect();
    v.sort();
    v
}

/// Criteria 1 to 3 share the generated scenarios.
fn situation_criteria(seeds: u64) -> Vec<Line> {
    let t0 = Instant::now();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()) as u64;
    let parts: Vec<(Tally, Tally, Tally, usize)> = std::thread::scope(|sc| {
        let handles: Vec<_> = (0..threads)
            .map(|k| {
                sc.spawn(move || {
                    let (mut eq, mut pe, mut ni, mut traces) =
                        (Tally::default(), Tally::default(), Tally::default(), 0);
                    for seed in (k..seeds).step_by(threads as usize) {
                        let s = scl_testkit::scenario(seed, 5);
                        traces += s.traces.len();
                        eq.merge(scl_testkit::regression_equivalence_on(&s, seed, 50));
                        pe.merge(scl_testkit::persistence_on(&s));
                        ni.merge(scl_testkit::non_interference_on(&s));
                    }
                    (eq, pe, ni, traces)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let elapsed = t0.elapsed();
    let (mut eq, mut pe, mut ni, mut traces) =
        (Tally::default(), Tally::default(), Tally::default(), 0);
    for (a, b, c, n) in parts {
        eq.merge(a);
        pe.merge(b);
        ni.merge(c);
        traces += n;
    }
    let mut first = tally_line(
        "regression-progression equivalence",
        &eq,
        &format!(
            " over {seeds} theories, {traces} traces, 50 formulas each; {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
    if seeds < 200 {
        first.pass = false;
        first.detail.push_str("; fewer than 200 theories");
    }
    if elapsed >= BUDGET {
        first.pass = false;
        first.detail.push_str("; over the 300s budget");
    }
    vec![
        first,
        tally_line("obligation persistence", &pe, ""),
        tally_line("oblige/release non-interference", &ni, ""),
    ]
}

fn foundational() -> Line {
    tally_line(
        "foundational axioms",
        &scl_testkit::foundational_axioms(4),
        " (depth 4, 2 actions)",
    )
}

fn golog() -> Line {
    let (mut laws, mut bf) = (LawReport::default(), LawReport::default());
    for seed in 0..25 {
        laws.merge(scl_testkit::golog_laws(seed, 5, 8));
        bf.merge(scl_testkit::brute_force_agreement(seed, 5, 8));
    }
    let mut t = laws.tally.clone();
    t.merge(bf.tally.clone());
    let mut l = tally_line(
        "GOLOG semantics",
        &t,
        &format!(
            "; laws on {} programs ({} skipped), brute force on {} ({} skipped)",
            laws.checked, laws.skipped, bf.checked, bf.skipped
        ),
    );
    if laws.checked < 100 || bf.checked < 100 {
        l.pass = false;
        l.detail.push_str("; fewer than 100 programs checked");
    }
    l
}

fn sale() -> Line {
    let path = root().join("contracts/sale.scl");
    let p = path.to_str().unwrap();
    let mut problems = Vec::new();

    if scl(&["check", p]).status.code() != Some(0) {
        problems.push("check did not exit 0".to_string());
    }

    let o = scl(&["--json", "run", p, "--first"]);
    let expected = [
        "pay(widget)@1",
        "oblige(seller,delivered(widget),10)@2",
        "deliver(widget)@5",
    ];
    match serde_json::from_str::<serde_json::Value>(text(&o.stdout).trim()) {
        Ok(v) => {
            if v["trace"] != serde_json::json!(expected) {
                problems.push(format!("run --first trace {}", v["trace"]));
            }
            if v["obligations"][0]["status"] != "fulfilled" {
                problems.push(format!("run --first obligations {}", v["obligations"]));
            }
        }
        Err(e) => problems.push(format!("run --first output: {e}")),
    }
    if o.status.code() != Some(0) {
        problems.push("run --first did not exit 0".into());
    }

    let o = scl(&["verify", p, "--property", "done"]);
    if o.status.code() != Some(0) || !text(&o.stdout).starts_with("PASS done") {
        problems.push(format!("verify done: {}", text(&o.stdout)));
    }

    let o = scl(&["verify", p, "--property", "on_time"]);
    let out = text(&o.stdout);
    let cex = "counterexample: [pay(widget)@1, oblige(seller,delivered(widget),10)@2, noop@11]";
    if o.status.code() != Some(1)
        || !out.contains("no_violations")
        || !out.contains(cex)
    {
        problems.push(format!("verify on_time: {out}"));
    }

    line(
        "sale contract end to end",
        problems.is_empty(),
        if problems.is_empty() {
            "check 0; run --first fulfilled; done passes; late delivery fails no_violations with the expected counterexample".into()
        } else {
            problems.join("; ")
        },
    )
}

fn round_trip() -> Line {
    let mut problems = Vec::new();
    let files = scl_files(&root().join("contracts"));
    for f in &files {
        let src = std::fs::read_to_string(f).unwrap();
        let name = f.file_name().unwrap().to_string_lossy();
        match dsl::parse(&src) {
            Ok(spec) => match dsl::parse(&dsl::render(&spec)) {
                Ok(again) if again == spec => {}
                Ok(_) => problems.push(format!("{name}: render changes the parse")),
                Err(d) => problems.push(format!("{name}: rendering does not parse: {d:?}")),
            },
            Err(d) => problems.push(format!("{name}: {d:?}")),
        }
        if scl(&["check", f.to_str().unwrap()]).status.code() != Some(0) {
            problems.push(format!("{name}: check did not exit 0"));
        }
    }
    let invalid = scl_files(&root().join("contracts/invalid"));
    for f in &invalid {
        let p = f.to_str().unwrap();
        let name = f.file_name().unwrap().to_string_lossy();
        let o = scl(&["check", p]);
        let err = text(&o.stderr);
        let located = !err.is_empty()
            && err.lines().all(|l| {
                let rest = l.strip_prefix(p).and_then(|r| r.strip_prefix(':'));
                let mut parts = rest.map(|r| r.splitn(3, ':')).into_iter().flatten();
                let line = parts.next().and_then(|x| x.parse::<u32>().ok());
                let col = parts.next().and_then(|x| x.parse::<u32>().ok());
                let msg = parts.next().unwrap_or("");
                line.is_some() && col.is_some() && msg.starts_with(" error: ")
            });
        if o.status.code() != Some(2) || !located {
            problems.push(format!("{name}: exit {:?}, stderr {err:?}", o.status.code()));
        }
    }
    if files.len() < 20 {
        problems.push(format!("only {} valid specifications", files.len()));
    }
    if invalid.is_empty() {
        problems.push("no invalid fixtures".into());
    }
    line(
        "DSL round trip and diagnostics",
        problems.is_empty(),
        if problems.is_empty() {
            format!(
                "{} specifications round-trip; {} invalid fixtures give located errors and exit 2",
                files.len(),
                invalid.len()
            )
        } else {
            problems.join("; ")
        },
    )
}

/// Every ground user fluent atom, plus the formulas of the contract's
/// properties.
fn probe_formulas(c: &Contract) -> Vec<String> {
    let th = &c.theory;
    let mut out = Vec::new();
    for f in th.user_fluents() {
        let domains: Vec<_> = f.params.iter().map(|s| th.domain(s).unwrap()).collect();
        for args in cartesian(&domains) {
            let args: Vec<String> = args.iter().map(ToString::to_string).collect();
            if args.is_empty() {
                out.push(f.name.to_string());
            } else {
                out.push(format!("{}({})", f.name, args.join(", ")));
            }
        }
    }
    out
}

fn property_formulas(c: &Contract) -> Vec<Formula> {
    use scl_core::verify::Assertion;
    use scl_core::Property;
    c.properties
        .values()
        .filter_map(|d| match &d.property {
            Property::AtTermination(Assertion::Formula(f))
            | Property::Always(f)
            | Property::ExistsExecution(f)
            | Property::SubtraceAll(f) => Some(f.clone()),
            _ => None,
        })
        .collect()
}

/// Distinct execution prefixes of every program, at most `cap`
/// executions per program.
fn corpus_prefixes(c: &Contract, cap: usize) -> Vec<Vec<ActionTerm>> {
    let mut seen = std::collections::BTreeSet::new();
    let it = Interpreter::new(&c.theory, &c.procs, ExecBounds::default());
    for p in c.programs.values() {
        let mut n = 0;
        let _ = it.run_with(p, Trace::initial(&c.theory), &mut |ev| {
            if let Event::Result(r) = ev {
                for k in 0..=r.actions.len() {
                    seen.insert(r.actions[..k].to_vec());
                }
                n += 1;
            }
            if n >= cap {
                std::ops::ControlFlow::Break(())
            } else {
                std::ops::ControlFlow::Continue(())
            }
        });
    }
    seen.into_iter().collect()
}

fn sentinel() -> Line {
    let mut lib = Tally::default();
    let mut calls = 0;
    let mut problems = Vec::new();
    for f in scl_files(&root().join("contracts")) {
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        let c = dsl::load(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let th = &c.theory;
        let atoms = probe_formulas(&c);
        let props = property_formulas(&c);
        let prefixes = corpus_prefixes(&c, 200);
        for actions in &prefixes {
            let trace = match Trace::replay(th, actions) {
                Ok(t) => t,
                Err(e) => {
                    problems.push(format!("{name}: replay: {e}"));
                    continue;
                }
            };
            let mut formulas: Vec<Formula> = atoms
                .iter()
                .map(|a| dsl::parse_formula(a, th).unwrap())
                .collect();
            let obl: Vec<String> = trace
                .states
                .iter()
                .flat_map(|s| s.facts.iter())
                .filter(|a| &*a.symbol == scl_core::theory::OBL)
                .map(ToString::to_string)
                .collect();
            for o in &obl {
                formulas.push(dsl::parse_formula(o, th).unwrap());
            }
            formulas.extend(props.iter().cloned());
            for g in &formulas {
                lib.cases += 1;
                let s = trace.situation();
                let r = holds(g, s, th, Method::Regression);
                let p = holds(g, s, th, Method::Progression);
                match (r, p) {
                    (Ok(a), Ok(b)) if a == b => {}
                    (a, b) => lib.fail(format!("{name}: {g} at {s}: {a:?} vs {b:?}")),
                }
            }
        }
        // the longest prefix and every atom through the binary
        if let Some(longest) = prefixes.iter().max_by_key(|p| p.len()) {
            let after: Vec<String> = longest.iter().map(ToString::to_string).collect();
            let after = after.join(", ");
            let trace = Trace::replay(th, longest).unwrap();
            let mut probes = atoms.clone();
            probes.extend(
                trace
                    .last()
                    .facts
                    .iter()
                    .filter(|a| &*a.symbol == scl_core::theory::OBL)
                    .map(ToString::to_string),
            );
            for q in probes {
                calls += 1;
                let o = scl(&[
                    "query",
                    f.to_str().unwrap(),
                    "--after",
                    &after,
                    "--formula",
                    &q,
                    "--method",
                    "both",
                ]);
                if !matches!(o.status.code(), Some(0 | 1)) {
                    problems.push(format!(
                        "{name}: query {q} after [{after}]: exit {:?} {}",
                        o.status.code(),
                        text(&o.stderr)
                    ));
                }
            }
        }
    }
    let mut l = tally_line(
        "--method both sentinel",
        &lib,
        &format!("; {calls} binary queries"),
    );
    if !problems.is_empty() {
        l.pass = false;
        l.detail.push_str(&format!("; {}", problems.join("; ")));
    }
    l
}

fn main() -> ExitCode {
    // libtest flags such as `--nocapture` are accepted and ignored
    let seeds = std::env::var("SCL_ACCEPT_SEEDS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let mut lines = situation_criteria(seeds);
    lines.push(foundational());
    lines.push(golog());
    lines.push(sale());
    lines.push(round_trip());
    lines.push(sentinel());
    let mut failed = 0;
    for l in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", l.name, l.detail);
        failed += usize::from(!l.pass);
    }
    println!(
        "{} of {} criteria pass",
        lines.len() - failed,
        lines.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
