//! Recursive-descent parser for `.scl` documents.
//!
//! Program operators bind, loosest first: `|` (choice), `;` (sequence),
//! then the prefix forms. Bodies of `pick`, `if` and `while` are single
//! prefix-level programs, so compound bodies need parentheses. Formula
//! operators bind, loosest first: `->` (right-associative), `|`, `&`,
//! `not`; a quantifier body extends as far right as possible.

use num_rational::Rational64;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use crate::span::{Diagnostic, Span};
use crate::term::Time;

pub const KEYWORDS: &[&str] = &[
    "contract",
    "sort",
    "fluent",
    "predicate",
    "action",
    "at",
    "poss",
    "causes",
    "not",
    "for",
    "when",
    "init",
    "proc",
    "program",
    "property",
    "on",
    "nil",
    "test",
    "star",
    "pick",
    "if",
    "then",
    "else",
    "while",
    "do",
    "forall",
    "exists",
    "true",
    "false",
    "start",
    "deadline",
    "at_end",
    "always",
    "possible",
    "no_violations",
    "subtraces",
];

const ITEM_KEYWORDS: &[&str] = &[
    "sort",
    "fluent",
    "predicate",
    "action",
    "init",
    "proc",
    "program",
    "property",
];

pub const STATUS_WORDS: &[&str] = &["pending", "fulfilled", "violated", "absent"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

type PResult<T> = Result<T, Diagnostic>;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(Diagnostic::error(
            format!("expected {expected}, found {}", self.peek()),
            Some(self.span()),
        ))
    }

    fn expect(&mut self, t: &Tok) -> PResult<Span> {
        if self.peek() == t {
            Ok(self.bump().span)
        } else {
            self.error(&t.to_string())
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.at_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                let sp = self.bump().span;
                Ok(Ident {
                    text: s,
                    loc: Loc(sp),
                })
            }
            Tok::Ident(s) => Err(Diagnostic::error(
                format!("expected identifier, found keyword `{s}`"),
                Some(self.span()),
            )),
            _ => self.error("identifier"),
        }
    }

    fn list<T>(
        &mut self,
        close: &Tok,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(&Tok::Comma)?;
        }
    }

    fn binder(&mut self) -> PResult<Binder> {
        let name = self.ident()?;
        self.expect(&Tok::Colon)?;
        let sort = self.ident()?;
        Ok(Binder { name, sort })
    }

    pub fn number(&mut self) -> PResult<Time> {
        let n = match self.peek() {
            Tok::Int(n) => *n,
            _ => return self.error("number"),
        };
        self.bump();
        if self.peek() == &Tok::Slash {
            self.bump();
            let sp = self.span();
            let d = match self.peek() {
                Tok::Int(d) => *d,
                _ => return self.error("denominator"),
            };
            self.bump();
            if d == 0 {
                return Err(Diagnostic::error("zero denominator", Some(sp)));
            }
            return Ok(Rational64::new(n, d));
        }
        Ok(Rational64::from_integer(n))
    }

    // ---- document ----

    pub fn spec(&mut self) -> Result<Spec, Vec<Diagnostic>> {
        let head = (|| -> PResult<(Ident, Span)> {
            let sp = self.expect_kw("contract")?;
            let name = self.ident()?;
            self.expect(&Tok::LBrace)?;
            Ok((name, sp))
        })()
        .map_err(|d| vec![d])?;
        let mut items = Vec::new();
        let mut diags = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Eof => {
                    diags.push(Diagnostic::error(
                        "expected `}` closing the contract",
                        Some(self.span()),
                    ));
                    break;
                }
                _ => {}
            }
            match self.item() {
                Ok(it) => items.push(it),
                Err(d) => {
                    diags.push(d);
                    self.recover();
                }
            }
        }
        if diags.is_empty() && self.peek() != &Tok::Eof {
            diags.push(Diagnostic::error(
                format!("unexpected {} after the contract", self.peek()),
                Some(self.span()),
            ));
        }
        if diags.is_empty() {
            Ok(Spec {
                name: head.0,
                items,
                loc: Loc(head.1.to(self.prev_span())),
            })
        } else {
            Err(diags)
        }
    }

    /// Skips to the start of the next item.
    fn recover(&mut self) {
        let mut depth = 0i32;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::LBrace | Tok::LParen => depth += 1,
                Tok::RParen => depth -= 1,
                Tok::RBrace => {
                    if depth <= 0 {
                        return;
                    }
                    depth -= 1;
                }
                Tok::Semi if depth <= 0 => {
                    self.bump();
                    if ITEM_KEYWORDS.iter().any(|k| self.at_kw(k)) || self.peek() == &Tok::RBrace {
                        return;
                    }
                    continue;
                }
                Tok::Ident(s)
                    if depth <= 0 && ITEM_KEYWORDS.contains(&s.as_str()) && self.pos > 0 =>
                {
                    return;
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn item(&mut self) -> PResult<Item> {
        let kw = match self.peek() {
            Tok::Ident(s) if ITEM_KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return self.error("a declaration"),
        };
        let start = self.bump().span;
        let item = match kw.as_str() {
            "sort" => {
                let name = self.ident()?;
                self.expect(&Tok::Eq)?;
                self.expect(&Tok::LBrace)?;
                let constants = self.list(&Tok::RBrace, |p| p.ident())?;
                self.expect(&Tok::Semi)?;
                Item::Sort { name, constants }
            }
            "fluent" | "predicate" => {
                let name = self.ident()?;
                let params = if self.eat(&Tok::LParen) {
                    self.list(&Tok::RParen, |p| p.ident())?
                } else {
                    Vec::new()
                };
                self.expect(&Tok::Semi)?;
                if kw == "fluent" {
                    Item::Fluent { name, params }
                } else {
                    Item::Predicate { name, params }
                }
            }
            "action" => Item::Action(self.action()?),
            "init" => {
                let at = if self.eat_kw("at") {
                    Some(self.number()?)
                } else {
                    None
                };
                self.expect(&Tok::LBrace)?;
                let atoms = self.list(&Tok::RBrace, |p| p.atom())?;
                self.eat(&Tok::Semi);
                Item::Init {
                    at,
                    atoms,
                    loc: Loc(start.to(self.prev_span())),
                }
            }
            "proc" => {
                let name = self.ident()?;
                let params = if self.eat(&Tok::LParen) {
                    self.list(&Tok::RParen, |p| p.binder())?
                } else {
                    Vec::new()
                };
                self.expect(&Tok::Eq)?;
                let body = self.prog()?;
                self.expect(&Tok::Semi)?;
                Item::Proc { name, params, body }
            }
            "program" => {
                let name = self.ident()?;
                self.expect(&Tok::Eq)?;
                let body = self.prog()?;
                self.expect(&Tok::Semi)?;
                Item::Program { name, body }
            }
            _ => {
                let name = self.ident()?;
                let on = if self.eat_kw("on") {
                    Some(self.ident()?)
                } else {
                    None
                };
                self.expect(&Tok::Eq)?;
                let kind = self.prop()?;
                self.expect(&Tok::Semi)?;
                Item::Property { name, on, kind }
            }
        };
        Ok(item)
    }

    fn action(&mut self) -> PResult<ActionItem> {
        let name = self.ident()?;
        let params = if self.eat(&Tok::LParen) {
            self.list(&Tok::RParen, |p| p.binder())?
        } else {
            Vec::new()
        };
        let time_var = if self.eat_kw("at") {
            Some(self.ident()?)
        } else {
            None
        };
        let poss = if self.eat_kw("poss") {
            self.expect(&Tok::Colon)?;
            Some(self.expr()?)
        } else {
            None
        };
        let mut causes = Vec::new();
        if self.eat_kw("causes") {
            self.expect(&Tok::Colon)?;
            loop {
                causes.push(self.effect()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::Semi)?;
        Ok(ActionItem {
            name,
            params,
            time_var,
            poss,
            causes,
        })
    }

    fn effect(&mut self) -> PResult<Effect> {
        let start = self.span();
        let negated = self.eat_kw("not");
        let fluent = self.ident()?;
        let args = if self.eat(&Tok::LParen) {
            self.list(&Tok::RParen, |p| p.term())?
        } else {
            Vec::new()
        };
        let mut vars = Vec::new();
        if self.eat_kw("for") {
            loop {
                vars.push(self.binder()?);
                // another binder follows only as `, name :`
                let more = self.peek() == &Tok::Comma
                    && matches!(self.peek_at(1), Tok::Ident(_))
                    && self.peek_at(2) == &Tok::Colon;
                if !more {
                    break;
                }
                self.bump();
            }
        }
        let when = if self.eat_kw("when") {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(Effect {
            negated,
            fluent,
            args,
            vars,
            when,
            loc: Loc(start.to(self.prev_span())),
        })
    }

    pub fn atom(&mut self) -> PResult<Atom> {
        let name = self.ident()?;
        let args = if self.eat(&Tok::LParen) {
            self.list(&Tok::RParen, |p| p.term())?
        } else {
            Vec::new()
        };
        Ok(Atom { name, args })
    }

    // ---- terms ----

    pub fn term(&mut self) -> PResult<TermAst> {
        let sp = self.span();
        match self.peek().clone() {
            Tok::Int(_) => Ok(TermAst::Num(self.number()?, Loc(sp.to(self.prev_span())))),
            Tok::Ident(s) if s == "start" => {
                self.bump();
                Ok(TermAst::Start(Loc(sp)))
            }
            Tok::Ident(s) if s == "deadline" => {
                self.bump();
                self.term()
            }
            Tok::Ident(s) if s == "not" => {
                self.bump();
                let a = self.atom()?;
                Ok(TermAst::NotLit(
                    a.name,
                    a.args,
                    Loc(sp.to(self.prev_span())),
                ))
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if self.eat(&Tok::LParen) {
                    let args = self.list(&Tok::RParen, |p| p.term())?;
                    Ok(TermAst::App(name, args))
                } else {
                    Ok(TermAst::Name(name))
                }
            }
            _ => self.error("a term"),
        }
    }

    // ---- formulas ----

    pub fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.or_expr()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.expr()?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.and_expr()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary_expr()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary_expr()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> PResult<Expr> {
        let sp = self.span();
        if self.eat_kw("not") {
            let e = self.unary_expr()?;
            return Ok(Expr::Not(Box::new(e), Loc(sp.to(self.prev_span()))));
        }
        for (kw, q) in [("forall", Quant::ForAll), ("exists", Quant::Exists)] {
            if self.eat_kw(kw) {
                let b = self.binder()?;
                self.expect(&Tok::Dot)?;
                let body = self.expr()?;
                return Ok(Expr::Quant(
                    q,
                    b,
                    Box::new(body),
                    Loc(sp.to(self.prev_span())),
                ));
            }
        }
        if self.eat_kw("true") {
            return Ok(Expr::True(Loc(sp)));
        }
        if self.eat_kw("false") {
            return Ok(Expr::False(Loc(sp)));
        }
        if self.eat(&Tok::LParen) {
            let e = self.expr()?;
            self.expect(&Tok::RParen)?;
            return Ok(e);
        }
        let lhs = self.term()?;
        let rel = match self.peek() {
            Tok::Eq => Some(Rel::Eq),
            Tok::Ne => Some(Rel::Ne),
            Tok::Lt => Some(Rel::Lt),
            Tok::Le => Some(Rel::Le),
            Tok::Gt => Some(Rel::Gt),
            Tok::Ge => Some(Rel::Ge),
            _ => None,
        };
        if let Some(rel) = rel {
            self.bump();
            let rhs = self.term()?;
            return Ok(Expr::Rel(rel, lhs, rhs, Loc(sp.to(self.prev_span()))));
        }
        match lhs {
            TermAst::Name(name) => Ok(Expr::Atom(Atom {
                name,
                args: Vec::new(),
            })),
            TermAst::App(name, args) => Ok(Expr::Atom(Atom { name, args })),
            _ => self.error("a comparison operator"),
        }
    }

    // ---- programs ----

    pub fn prog(&mut self) -> PResult<Prog> {
        let mut lhs = self.seq_prog()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.seq_prog()?;
            lhs = Prog::Choice(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn starts_prog(&self) -> bool {
        match self.peek() {
            Tok::LParen => true,
            Tok::Ident(s) => {
                !is_keyword(s)
                    || ["nil", "test", "star", "pick", "if", "while"].contains(&s.as_str())
            }
            _ => false,
        }
    }

    fn seq_prog(&mut self) -> PResult<Prog> {
        let mut lhs = self.unary_prog()?;
        while self.peek() == &Tok::Semi && {
            let save = self.pos;
            self.bump();
            let more = self.starts_prog();
            self.pos = save;
            more
        } {
            self.bump();
            let rhs = self.unary_prog()?;
            lhs = Prog::Seq(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary_prog(&mut self) -> PResult<Prog> {
        let sp = self.span();
        let loc = |p: &Self| Loc(sp.to(p.prev_span()));
        if self.eat_kw("nil") {
            return Ok(Prog::Nil(Loc(sp)));
        }
        if self.eat_kw("test") {
            self.expect(&Tok::LParen)?;
            let e = self.expr()?;
            self.expect(&Tok::RParen)?;
            return Ok(Prog::Test(e, loc(self)));
        }
        if self.eat_kw("star") {
            self.expect(&Tok::LParen)?;
            let p = self.prog()?;
            self.expect(&Tok::RParen)?;
            return Ok(Prog::Star(Box::new(p), loc(self)));
        }
        if self.eat_kw("pick") {
            let b = self.binder()?;
            self.expect(&Tok::Dot)?;
            let body = self.unary_prog()?;
            return Ok(Prog::Pick(b, Box::new(body), loc(self)));
        }
        if self.eat_kw("if") {
            let c = self.expr()?;
            self.expect_kw("then")?;
            let p = self.unary_prog()?;
            self.expect_kw("else")?;
            let q = self.unary_prog()?;
            return Ok(Prog::If(c, Box::new(p), Box::new(q), loc(self)));
        }
        if self.eat_kw("while") {
            let c = self.expr()?;
            self.expect_kw("do")?;
            let p = self.unary_prog()?;
            return Ok(Prog::While(c, Box::new(p), loc(self)));
        }
        if self.eat(&Tok::LParen) {
            let p = self.prog()?;
            self.expect(&Tok::RParen)?;
            return Ok(p);
        }
        self.step()
    }

    pub fn step(&mut self) -> PResult<Prog> {
        let name = self.ident()?;
        let args = if self.eat(&Tok::LParen) {
            Some(self.list(&Tok::RParen, |p| p.term())?)
        } else {
            None
        };
        let time = if self.eat(&Tok::At) {
            let sp = self.span();
            Some(match self.peek() {
                Tok::Question => {
                    self.bump();
                    TimeAst::Unknown(Loc(sp))
                }
                Tok::Int(_) => TimeAst::Value(self.number()?, Loc(sp.to(self.prev_span()))),
                Tok::Ident(_) => TimeAst::Name(self.ident()?),
                _ => return self.error("a time, `?` or a time variable"),
            })
        } else {
            None
        };
        Ok(Prog::Step { name, args, time })
    }

    // ---- properties ----

    fn prop(&mut self) -> PResult<PropKind> {
        if self.eat_kw("at_end") {
            let status = matches!(
                (self.peek(), self.peek_at(1)),
                (Tok::Ident(s), Tok::LParen) if STATUS_WORDS.contains(&s.as_str())
            );
            if status {
                let status = self.ident()?;
                self.expect(&Tok::LParen)?;
                let agent = self.term()?;
                self.expect(&Tok::Comma)?;
                let literal = self.term()?;
                self.expect(&Tok::Comma)?;
                let deadline = self.term()?;
                self.expect(&Tok::RParen)?;
                return Ok(PropKind::AtEndStatus {
                    status,
                    agent,
                    literal,
                    deadline,
                });
            }
            return Ok(PropKind::AtEnd(self.expr()?));
        }
        if self.eat_kw("always") {
            return Ok(PropKind::Always(self.expr()?));
        }
        if self.eat_kw("possible") {
            return Ok(PropKind::Possible(self.expr()?));
        }
        if self.eat_kw("subtraces") {
            return Ok(PropKind::Subtraces(self.expr()?));
        }
        if self.eat_kw("no_violations") {
            return Ok(PropKind::NoViolations);
        }
        self.error("`at_end`, `always`, `possible`, `subtraces` or `no_violations`")
    }

    pub fn at_eof(&self) -> bool {
        self.peek() == &Tok::Eof
    }

    pub fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    pub fn eat_comma(&mut self) -> bool {
        self.eat(&Tok::Comma)
    }
}

/// Parses a whole document without resolving names.
pub fn parse_syntax(src: &str) -> Result<Spec, Vec<Diagnostic>> {
    let mut p = Parser::new(src).map_err(|d| vec![d])?;
    p.spec()
}
