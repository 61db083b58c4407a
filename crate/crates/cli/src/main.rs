//! `scl`: check, run, query, verify and step `.scl` contract
//! specifications.
//!
//! Exit codes: 0 success (or `true`), 1 a negative answer (no execution,
//! `false`, a failing property), 2 errors in the specification or the
//! request, 3 when regression and progression disagree on a query.

mod repl;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scl_core::dsl::{self, Contract, DEFAULT_PROGRAM};
use scl_core::golog::Interpreter;
use scl_core::{holds, verify, ExecBounds, Method, Term, Trace};

use report::{Out, Style};

#[derive(Parser)]
#[command(name = "scl", version, about = "Situation calculus contract engine")]
struct Cli {
    /// Line-delimited JSON on standard output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, lower and validate a specification
    Check { path: PathBuf },
    /// Execute a program and print its terminating traces
    Run {
        path: PathBuf,
        #[arg(long, default_value = DEFAULT_PROGRAM)]
        program: String,
        /// Every execution (the default)
        #[arg(long, conflicts_with = "first")]
        all: bool,
        /// Only the first execution
        #[arg(long)]
        first: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Decide a formula after a sequence of actions
    Query {
        path: PathBuf,
        /// Comma-separated actions, e.g. "pay(widget)@1, deliver(widget)@5"
        #[arg(long, default_value = "")]
        after: String,
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value = "regression")]
        method: MethodArg,
    },
    /// Check properties over every bounded execution
    Verify {
        path: PathBuf,
        #[arg(long, conflicts_with = "all_properties")]
        property: Option<String>,
        /// Every property (the default)
        #[arg(long)]
        all_properties: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Step through a contract interactively
    Repl { path: PathBuf },
}

#[derive(Args)]
struct BoundArgs {
    /// Primitive actions per execution
    #[arg(long, default_value_t = ExecBounds::default().max_steps)]
    max_steps: usize,
    /// Iterations of any one star
    #[arg(long, default_value_t = ExecBounds::default().max_star)]
    max_star: usize,
}

impl BoundArgs {
    fn bounds(&self) -> ExecBounds {
        ExecBounds {
            max_steps: self.max_steps,
            max_star: self.max_star,
            max_results: None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Regression,
    Progression,
    Both,
}

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const ERROR: u8 = 2;
const DISAGREE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out::new(cli.json, Style::from_env());
    ExitCode::from(dispatch(cli.command, &out))
}

fn dispatch(cmd: Command, out: &Out) -> u8 {
    let path = match &cmd {
        Command::Check { path }
        | Command::Run { path, .. }
        | Command::Query { path, .. }
        | Command::Verify { path, .. }
        | Command::Repl { path } => path.clone(),
    };
    let contract = match load(&path, out) {
        Some(c) => c,
        None => return ERROR,
    };
    match cmd {
        Command::Check { .. } => {
            out.json(&serde_json::json!({ "ok": true }));
            OK
        }
        Command::Run {
            program,
            first,
            bounds,
            ..
        } => cmd_run(&contract, &program, first, bounds.bounds(), out),
        Command::Query {
            after,
            formula,
            method,
            ..
        } => cmd_query(&contract, &after, &formula, method, out),
        Command::Verify {
            property, bounds, ..
        } => cmd_verify(&contract, property.as_deref(), bounds.bounds(), out),
        Command::Repl { .. } => repl::run(&contract, out),
    }
}

/// Reads and loads a specification, reporting diagnostics as
/// `path:line:col: severity: message`.
fn load(path: &Path, out: &Out) -> Option<Contract> {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            out.error(&format!("{}: error: cannot read: {e}", path.display()));
            out.json(&serde_json::json!({ "ok": false, "diagnostics": [
                { "line": null, "col": null, "severity": "error", "message": format!("cannot read: {e}") }
            ]}));
            return None;
        }
    };
    match dsl::load(&src) {
        Ok(c) => Some(c),
        Err(ds) => {
            for d in &ds {
                out.diagnostic(path, d);
            }
            out.json(&serde_json::json!({
                "ok": false,
                "diagnostics": ds.iter().map(report::diagnostic_json).collect::<Vec<_>>(),
            }));
            None
        }
    }
}

fn cmd_run(c: &Contract, program: &str, first: bool, bounds: ExecBounds, out: &Out) -> u8 {
    let Some(p) = c.programs.get(program) else {
        out.error(&format!("error: unknown program {program}"));
        return ERROR;
    };
    let bounds = ExecBounds {
        max_results: first.then_some(1),
        ..bounds
    };
    let outcome = match Interpreter::new(&c.theory, &c.procs, bounds).run(p) {
        Ok(o) => o,
        Err(e) => {
            out.error(&format!("error: {e}"));
            return ERROR;
        }
    };
    for r in &outcome.results {
        out.execution(r);
    }
    if outcome.truncated {
        out.note("search truncated by bounds");
    }
    if outcome.results.is_empty() {
        out.human("no executions");
        NEGATIVE
    } else {
        OK
    }
}

/// Instantiates `@?` in a query prefix to the start of the situation it
/// extends, as programs do.
fn ground_prefix(
    c: &Contract,
    actions: Vec<scl_core::ActionTerm>,
) -> Result<Trace, String> {
    let mut trace = Trace::initial(&c.theory);
    for a in actions {
        let a = if *a.time == Term::Now {
            a.with_time(trace.last().start)
        } else {
            a
        };
        trace.try_push(&c.theory, a).map_err(|f| f.to_string())?;
    }
    Ok(trace)
}

fn cmd_query(c: &Contract, after: &str, formula: &str, method: MethodArg, out: &Out) -> u8 {
    let actions = match dsl::parse_actions(after, &c.theory) {
        Ok(a) => a,
        Err(d) => {
            out.error(&format!("--after: {d}"));
            return ERROR;
        }
    };
    let f = match dsl::parse_formula(formula, &c.theory) {
        Ok(f) => f,
        Err(d) => {
            out.error(&format!("--formula: {d}"));
            return ERROR;
        }
    };
    let trace = match ground_prefix(c, actions) {
        Ok(t) => t,
        Err(e) => {
            out.error(&format!("error: not executable: {e}"));
            return ERROR;
        }
    };
    let s = trace.situation();
    let ask = |m: Method| holds(&f, s, &c.theory, m).map_err(|e| e.to_string());
    let answer = match method {
        MethodArg::Regression => ask(Method::Regression),
        MethodArg::Progression => ask(Method::Progression),
        MethodArg::Both => match (ask(Method::Regression), ask(Method::Progression)) {
            (Ok(a), Ok(b)) if a == b => Ok(a),
            (Ok(a), Ok(b)) => {
                out.error(&format!(
                    "error: regression says {a}, progression says {b}"
                ));
                out.json(&serde_json::json!({ "regression": a, "progression": b }));
                return DISAGREE;
            }
            (Err(e), _) | (_, Err(e)) => Err(e),
        },
    };
    match answer {
        Ok(v) => {
            out.human(if v { "true" } else { "false" });
            out.json(&serde_json::json!({ "result": v }));
            if v {
                OK
            } else {
                NEGATIVE
            }
        }
        Err(e) => {
            out.error(&format!("error: {e}"));
            ERROR
        }
    }
}

fn cmd_verify(c: &Contract, only: Option<&str>, bounds: ExecBounds, out: &Out) -> u8 {
    let selected: Vec<_> = match only {
        Some(n) => match c.properties.get_key_value(n) {
            Some(kv) => vec![kv],
            None => {
                out.error(&format!("error: unknown property {n}"));
                return ERROR;
            }
        },
        None => c.properties.iter().collect(),
    };
    let mut code = OK;
    for (name, def) in selected {
        let program = &c.programs[&def.program];
        match verify(&def.property, program, &c.procs, &c.theory, bounds) {
            Ok(v) => {
                out.verdict(name, &def.property, &v);
                if !v.holds {
                    code = code.max(NEGATIVE);
                }
            }
            Err(e) => {
                out.error(&format!("error: {name}: {e}"));
                code = ERROR;
            }
        }
    }
    code
}
