//! Canonical text of a parsed document. Rendering then parsing yields a
//! structurally equal tree.

use std::fmt::Write;

use super::ast::*;
use crate::term::Time;

pub fn render(spec: &Spec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "contract {} {{", spec.name.text);
    for item in &spec.items {
        out.push_str("  ");
        out.push_str(&item_text(item));
        out.push('\n');
    }
    out.push_str("}\n");
    out
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

fn ident(i: &Ident) -> String {
    i.text.clone()
}

fn binder(b: &Binder) -> String {
    format!("{}: {}", b.name.text, b.sort.text)
}

pub fn number(t: &Time) -> String {
    if *t.denom() == 1 {
        t.numer().to_string()
    } else {
        format!("{}/{}", t.numer(), t.denom())
    }
}

fn item_text(item: &Item) -> String {
    match item {
        Item::Sort { name, constants } => {
            format!("sort {} = {{{}}};", name.text, join(constants, ident))
        }
        Item::Fluent { name, params } => format!("fluent {}{};", name.text, sig(params)),
        Item::Predicate { name, params } => format!("predicate {}{};", name.text, sig(params)),
        Item::Action(a) => {
            let mut s = format!("action {}", a.name.text);
            if !a.params.is_empty() {
                let _ = write!(s, "({})", join(&a.params, binder));
            }
            if let Some(t) = &a.time_var {
                let _ = write!(s, " at {}", t.text);
            }
            if let Some(p) = &a.poss {
                let _ = write!(s, "\n    poss: {}", expr(p));
            }
            if !a.causes.is_empty() {
                let _ = write!(
                    s,
                    "\n    causes: {}",
                    a.causes
                        .iter()
                        .map(effect)
                        .collect::<Vec<_>>()
                        .join(",\n      ")
                );
            }
            s.push(';');
            s
        }
        Item::Init { at, atoms, .. } => {
            let mut s = String::from("init ");
            if let Some(t) = at {
                let _ = write!(s, "at {} ", number(t));
            }
            let _ = write!(s, "{{{}}}", join(atoms, atom));
            s
        }
        Item::Proc { name, params, body } => {
            let ps = if params.is_empty() {
                String::new()
            } else {
                format!("({})", join(params, binder))
            };
            format!("proc {}{} = {};", name.text, ps, prog(body))
        }
        Item::Program { name, body } => format!("program {} = {};", name.text, prog(body)),
        Item::Property { name, on, kind } => {
            let on = on
                .as_ref()
                .map(|p| format!(" on {}", p.text))
                .unwrap_or_default();
            format!("property {}{} = {};", name.text, on, prop(kind))
        }
    }
}

fn sig(params: &[Ident]) -> String {
    if params.is_empty() {
        String::new()
    } else {
        format!("({})", join(params, ident))
    }
}

fn effect(e: &Effect) -> String {
    let mut s = String::new();
    if e.negated {
        s.push_str("not ");
    }
    s.push_str(&e.fluent.text);
    if !e.args.is_empty() {
        let _ = write!(s, "({})", join(&e.args, term));
    }
    if !e.vars.is_empty() {
        let _ = write!(s, " for {}", join(&e.vars, binder));
    }
    if let Some(w) = &e.when {
        let _ = write!(s, " when {}", expr(w));
    }
    s
}

fn atom(a: &Atom) -> String {
    if a.args.is_empty() {
        a.name.text.clone()
    } else {
        format!("{}({})", a.name.text, join(&a.args, term))
    }
}

pub fn term(t: &TermAst) -> String {
    match t {
        TermAst::Name(i) => i.text.clone(),
        TermAst::Num(n, _) => number(n),
        TermAst::Start(_) => "start".into(),
        TermAst::App(i, args) => format!("{}({})", i.text, join(args, term)),
        TermAst::NotLit(i, args, _) => {
            if args.is_empty() {
                format!("not {}", i.text)
            } else {
                format!("not {}({})", i.text, join(args, term))
            }
        }
    }
}

// binding strength: 0 implies, 1 or, 2 and, 3 prefix/atom
fn level(e: &Expr) -> u8 {
    match e {
        Expr::Implies(..) => 0,
        Expr::Or(..) => 1,
        Expr::And(..) => 2,
        _ => 3,
    }
}

fn wrap(s: String, yes: bool) -> String {
    if yes {
        format!("({s})")
    } else {
        s
    }
}

/// A quantifier operand is parenthesized whenever anything could follow it.
fn operand(e: &Expr, min: u8) -> String {
    wrap(expr(e), level(e) < min || matches!(e, Expr::Quant(..)))
}

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::True(_) => "true".into(),
        Expr::False(_) => "false".into(),
        Expr::Atom(a) => atom(a),
        Expr::Rel(r, a, b, _) => format!("{} {} {}", term(a), r.symbol(), term(b)),
        Expr::Not(g, _) => format!("not {}", operand(g, 3)),
        Expr::And(a, b) => format!("{} & {}", operand(a, 2), operand(b, 3)),
        Expr::Or(a, b) => format!("{} | {}", operand(a, 1), operand(b, 2)),
        Expr::Implies(a, b) => format!("{} -> {}", operand(a, 1), expr(b)),
        Expr::Quant(q, b, body, _) => {
            let kw = match q {
                Quant::ForAll => "forall",
                Quant::Exists => "exists",
            };
            format!("{kw} {}:{} . {}", b.name.text, b.sort.text, expr(body))
        }
    }
}

fn time(t: &TimeAst) -> String {
    match t {
        TimeAst::Value(v, _) => number(v),
        TimeAst::Unknown(_) => "?".into(),
        TimeAst::Name(i) => i.text.clone(),
    }
}

// binding strength: 0 choice, 1 sequence, 2 prefix
fn plevel(p: &Prog) -> u8 {
    match p {
        Prog::Choice(..) => 0,
        Prog::Seq(..) => 1,
        _ => 2,
    }
}

fn poperand(p: &Prog, min: u8) -> String {
    wrap(prog(p), plevel(p) < min)
}

/// Bodies of prefix forms extend to the right only as far as one prefix
/// program, except that `if`/`while`/`pick` bodies may themselves be
/// prefix forms.
pub fn prog(p: &Prog) -> String {
    match p {
        Prog::Nil(_) => "nil".into(),
        Prog::Step {
            name,
            args,
            time: t,
        } => {
            let mut s = name.text.clone();
            if let Some(args) = args {
                let _ = write!(s, "({})", join(args, term));
            }
            if let Some(t) = t {
                let _ = write!(s, "@{}", time(t));
            }
            s
        }
        Prog::Test(e, _) => format!("test({})", expr(e)),
        Prog::Seq(a, b) => format!("{} ; {}", poperand(a, 1), poperand(b, 2)),
        Prog::Choice(a, b) => format!("{} | {}", poperand(a, 0), poperand(b, 1)),
        Prog::Pick(b, body, _) => format!(
            "pick {}:{} . {}",
            b.name.text,
            b.sort.text,
            poperand(body, 2)
        ),
        Prog::Star(body, _) => format!("star({})", prog(body)),
        Prog::If(c, a, b, _) => format!(
            "if {} then {} else {}",
            expr(c),
            poperand(a, 2),
            poperand(b, 2)
        ),
        Prog::While(c, body, _) => format!("while {} do {}", expr(c), poperand(body, 2)),
    }
}

fn prop(k: &PropKind) -> String {
    match k {
        PropKind::AtEnd(e) => format!("at_end {}", expr(e)),
        PropKind::AtEndStatus {
            status,
            agent,
            literal,
            deadline,
        } => {
            format!(
                "at_end {}({}, {}, {})",
                status.text,
                term(agent),
                term(literal),
                term(deadline)
            )
        }
        PropKind::Always(e) => format!("always {}", expr(e)),
        PropKind::Possible(e) => format!("possible {}", expr(e)),
        PropKind::NoViolations => "no_violations".into(),
        PropKind::Subtraces(e) => format!("subtraces {}", expr(e)),
    }
}
