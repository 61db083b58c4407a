//! Human and JSON rendering. JSON goes to standard output one object per
//! line and nothing else is printed there in JSON mode; diagnostics and
//! notes always go to standard error.

use std::path::Path;

use scl_core::golog::ExecutionResult;
use scl_core::obligation::{ObligationLiteral, ObligationStatus};
use scl_core::{ActionTerm, Diagnostic, Property, Time, Verdict};
use serde_json::{json, Value};

#[derive(Clone, Copy)]
pub struct Style {
    color: bool,
}

impl Style {
    /// `SCL_COLOR=1` turns ANSI color on; it is off otherwise.
    pub fn from_env() -> Style {
        Style {
            color: std::env::var("SCL_COLOR").is_ok_and(|v| v == "1"),
        }
    }

    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn red(&self, s: &str) -> String {
        self.paint("31", s)
    }

    pub fn green(&self, s: &str) -> String {
        self.paint("32", s)
    }

    pub fn yellow(&self, s: &str) -> String {
        self.paint("33", s)
    }
}

pub struct Out {
    pub json: bool,
    pub style: Style,
}

pub fn time_str(t: &Time) -> String {
    t.to_string()
}

pub fn trace_json(actions: &[ActionTerm]) -> Value {
    Value::Array(actions.iter().map(|a| json!(a.to_string())).collect())
}

pub fn trace_str(actions: &[ActionTerm]) -> String {
    let items: Vec<String> = actions.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(", "))
}

pub fn obligation_json(o: &ObligationLiteral, st: ObligationStatus) -> Value {
    json!({
        "agent": o.agent.to_string(),
        "condition": o.condition.to_string(),
        "deadline": time_str(&o.deadline),
        "status": st.as_str(),
    })
}

pub fn diagnostic_json(d: &Diagnostic) -> Value {
    json!({
        "line": d.span.map(|s| s.line),
        "col": d.span.map(|s| s.col),
        "severity": d.severity.to_string(),
        "message": d.message,
    })
}

impl Out {
    pub fn new(json: bool, style: Style) -> Out {
        Out { json, style }
    }

    pub fn json(&self, v: &Value) {
        if self.json {
            println!("{v}");
        }
    }

    pub fn human(&self, s: &str) {
        if !self.json {
            println!("{s}");
        }
    }

    pub fn error(&self, s: &str) {
        eprintln!("{s}");
    }

    pub fn note(&self, s: &str) {
        eprintln!("{}: {s}", self.style.yellow("note"));
    }

    pub fn diagnostic(&self, path: &Path, d: &Diagnostic) {
        let sev = d.severity.to_string();
        let sev = match d.severity {
            scl_core::span::Severity::Error => self.style.red(&sev),
            _ => self.style.yellow(&sev),
        };
        match d.span {
            Some(s) => eprintln!("{}:{}:{}: {sev}: {}", path.display(), s.line, s.col, d.message),
            None => eprintln!("{}: {sev}: {}", path.display(), d.message),
        }
    }

    pub fn obligation_line(&self, o: &ObligationLiteral, st: ObligationStatus) -> String {
        let s = st.as_str();
        let s = match st {
            ObligationStatus::Fulfilled => self.style.green(s),
            ObligationStatus::Violated => self.style.red(s),
            _ => s.to_string(),
        };
        format!(
            "{} must see to {} by {}: {s}",
            o.agent,
            o.condition,
            time_str(&o.deadline)
        )
    }

    pub fn execution(&self, r: &ExecutionResult) {
        if self.json {
            println!(
                "{}",
                json!({
                    "trace": trace_json(&r.actions),
                    "obligations": r
                        .final_obligations()
                        .iter()
                        .map(|(o, st)| obligation_json(o, *st))
                        .collect::<Vec<_>>(),
                    "truncated": r.truncated,
                })
            );
            return;
        }
        println!("trace: {}", trace_str(&r.actions));
        for (o, st) in r.final_obligations() {
            println!("  {}", self.obligation_line(o, *st));
        }
    }

    pub fn verdict(&self, name: &str, prop: &Property, v: &Verdict) {
        let kind = match (&v.trace, prop.is_existential() && v.holds) {
            (None, _) => None,
            (Some(_), true) => Some("witness"),
            (Some(_), false) => Some("counterexample"),
        };
        if self.json {
            println!(
                "{}",
                json!({
                    "property": name,
                    "pass": v.holds,
                    "verdict": v.label(),
                    "executions": v.executions,
                    "truncated": v.truncated,
                    "trace_kind": kind,
                    "trace": v.trace.as_deref().map(trace_json),
                    "error": v.error,
                })
            );
            return;
        }
        let tag = if v.holds {
            self.style.green("PASS")
        } else {
            self.style.red("FAIL")
        };
        let n = v.executions;
        println!(
            "{tag} {name} ({}; {n} execution{})",
            v.label(),
            if n == 1 { "" } else { "s" }
        );
        println!("  property: {prop}");
        if let (Some(k), Some(t)) = (kind, &v.trace) {
            println!("  {k}: {}", trace_str(t));
        }
        if let Some(e) = &v.error {
            println!("  error: {e}");
        }
    }
}
