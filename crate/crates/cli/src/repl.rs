//! Interactive stepping over a single current situation.
//!
//! Commands: `actions`, `do <action>`, `undo`, `show`, `holds <formula>`,
//! `help`, `quit`. An action written with `@?` or without a time occurs
//! one time unit after the current start.

use std::io::{BufRead, IsTerminal, Write};

use scl_core::dsl::{self, Contract};
use scl_core::obligation::obligations_in_state;
use scl_core::term::time;
use scl_core::{holds, ActionTerm, Method, Term, Trace};
use serde_json::json;

use crate::report::{trace_str, Out};

const HELP: &str = "commands: actions | do <action> | undo | show | holds <formula> | quit";

struct Session<'a> {
    contract: &'a Contract,
    trace: Trace,
    out: &'a Out,
}

/// Result of one command: lines to print and whether it succeeded.
type Reply = (bool, Vec<String>);

fn fail(msg: impl Into<String>) -> Reply {
    (false, vec![msg.into()])
}

impl Session<'_> {
    fn next_time(&self) -> scl_core::Time {
        self.trace.last().start + time(1)
    }

    fn instantiate(&self, a: ActionTerm) -> ActionTerm {
        if *a.time == Term::Now {
            a.with_time(self.next_time())
        } else {
            a
        }
    }

    fn actions(&self) -> Reply {
        let th = &self.contract.theory;
        let mut lines = Vec::new();
        for a in th.ground_actions().unwrap_or_default() {
            let a = self.instantiate(a);
            if self.trace.clone().try_push(th, a.clone()).is_ok() {
                lines.push(a.to_string());
            }
        }
        if lines.is_empty() {
            lines.push("no possible actions".into());
        }
        (true, lines)
    }

    fn do_action(&mut self, src: &str) -> Reply {
        let th = &self.contract.theory;
        let mut acts = match dsl::parse_actions(src, th) {
            Ok(a) => a,
            Err(d) => return fail(format!("error: {d}")),
        };
        if acts.len() != 1 {
            return fail("error: expected exactly one action");
        }
        let a = self.instantiate(acts.remove(0));
        match self.trace.try_push(th, a.clone()) {
            Ok(()) => (true, vec![format!("did {a}")]),
            Err(f) => {
                // the step index is always the next one here
                let msg = f.to_string();
                let msg = msg.split_once(": ").map_or(msg.as_str(), |(_, m)| m);
                fail(format!("refused: {msg}"))
            }
        }
    }

    fn undo(&mut self) -> Reply {
        match self.trace.pop() {
            Some(a) => (true, vec![format!("undid {a}")]),
            None => fail("nothing to undo at S0"),
        }
    }

    fn show(&self) -> Reply {
        let state = self.trace.last();
        let mut lines = vec![
            format!("trace: {}", trace_str(&self.trace.actions)),
            format!("start: {}", state.start),
        ];
        let fluents: Vec<String> = state
            .facts
            .iter()
            .filter(|a| &*a.symbol != scl_core::theory::OBL)
            .map(ToString::to_string)
            .collect();
        if fluents.is_empty() {
            lines.push("fluents: none".into());
        } else {
            lines.push(format!("fluents: {}", fluents.join(", ")));
        }
        let obligations = obligations_in_state(state);
        if obligations.is_empty() {
            lines.push("obligations: none".into());
        } else {
            lines.push("obligations:".into());
            for (o, st) in obligations {
                lines.push(format!("  {}", self.out.obligation_line(&o, st)));
            }
        }
        (true, lines)
    }

    fn holds(&self, src: &str) -> Reply {
        let th = &self.contract.theory;
        let f = match dsl::parse_formula(src, th) {
            Ok(f) => f,
            Err(d) => return fail(format!("error: {d}")),
        };
        let s = self.trace.situation();
        match (
            holds(&f, s, th, Method::Regression),
            holds(&f, s, th, Method::Progression),
        ) {
            (Ok(a), Ok(b)) if a == b => (true, vec![a.to_string()]),
            (Ok(a), Ok(b)) => fail(format!(
                "error: regression says {a}, progression says {b}"
            )),
            (Err(e), _) | (_, Err(e)) => fail(format!("error: {e}")),
        }
    }

    /// `None` ends the session.
    fn command(&mut self, line: &str) -> Option<Reply> {
        let line = line.trim();
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        Some(match cmd {
            "" => (true, Vec::new()),
            "quit" | "exit" => return None,
            "help" => (true, vec![HELP.into()]),
            "actions" => self.actions(),
            "do" => self.do_action(rest),
            "undo" => self.undo(),
            "show" => self.show(),
            "holds" => self.holds(rest),
            other => fail(format!("unknown command `{other}`; {HELP}")),
        })
    }
}

pub fn run(contract: &Contract, out: &Out) -> u8 {
    let mut session = Session {
        contract,
        trace: Trace::initial(&contract.theory),
        out,
    };
    let stdin = std::io::stdin();
    let interactive = stdin.is_terminal() && !out.json;
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            print!("scl> ");
            let _ = std::io::stdout().flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        let Some((ok, reply)) = session.command(&line) else {
            break;
        };
        if out.json {
            if !line.trim().is_empty() {
                println!(
                    "{}",
                    json!({ "command": line.trim(), "ok": ok, "output": reply })
                );
            }
        } else {
            for l in reply {
                println!("{l}");
            }
        }
    }
    0
}
