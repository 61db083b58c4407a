//! Tokens of the `.scl` language. Comments are `// line` and `/* block */`.

use std::fmt;

use crate::span::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Amp,
    Bar,
    Arrow,
    At,
    Question,
    Slash,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::At => "@",
            Tok::Question => "?",
            Tok::Slash => "/",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    // advance over n bytes of the current line
    macro_rules! bump {
        ($n:expr) => {{
            for _ in 0..$n {
                if bytes[i] == b'\n' {
                    line += 1;
                    col = 1;
                } else if (bytes[i] & 0xC0) != 0x80 {
                    col += 1;
                }
                i += 1;
            }
        }};
    }
    while i < bytes.len() {
        let c = bytes[i];
        let (start, l0, c0) = (i, line, col);
        if c.is_ascii_whitespace() {
            bump!(1);
            continue;
        }
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                bump!(1);
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            bump!(2);
            loop {
                if i >= bytes.len() {
                    return Err(Diagnostic::error(
                        "unterminated block comment",
                        Some(Span::new(start, i, l0, c0)),
                    ));
                }
                if src[i..].starts_with("*/") {
                    bump!(2);
                    break;
                }
                bump!(1);
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            let mut j = i;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            let word = src[i..j].to_string();
            bump!(j - i);
            Tok::Ident(word)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let n: i64 = src[i..j].parse().map_err(|_| {
                Diagnostic::error("number out of range", Some(Span::new(i, j, l0, c0)))
            })?;
            bump!(j - i);
            Tok::Int(n)
        } else {
            let two = src.get(i..i + 2).unwrap_or("");
            let (t, n) = match two {
                "!=" => (Tok::Ne, 2),
                "<=" => (Tok::Le, 2),
                ">=" => (Tok::Ge, 2),
                "->" => (Tok::Arrow, 2),
                _ => match c {
                    b'{' => (Tok::LBrace, 1),
                    b'}' => (Tok::RBrace, 1),
                    b'(' => (Tok::LParen, 1),
                    b')' => (Tok::RParen, 1),
                    b',' => (Tok::Comma, 1),
                    b';' => (Tok::Semi, 1),
                    b':' => (Tok::Colon, 1),
                    b'.' => (Tok::Dot, 1),
                    b'=' => (Tok::Eq, 1),
                    b'<' => (Tok::Lt, 1),
                    b'>' => (Tok::Gt, 1),
                    b'&' => (Tok::Amp, 1),
                    b'|' => (Tok::Bar, 1),
                    b'@' => (Tok::At, 1),
                    b'?' => (Tok::Question, 1),
                    b'/' => (Tok::Slash, 1),
                    _ => {
                        let ch = src[i..].chars().next().unwrap();
                        return Err(Diagnostic::error(
                            format!("unexpected character `{ch}`"),
                            Some(Span::new(i, i + ch.len_utf8(), l0, c0)),
                        ));
                    }
                },
            };
            bump!(n);
            t
        };
        out.push(Token {
            tok,
            span: Span::new(start, i, l0, c0),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len(), line, col),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = lex("a // x\n /* y\n */ b<=2").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Ident("b".into()),
                Tok::Le,
                Tok::Int(2),
                Tok::Eof
            ]
        );
        assert_eq!((toks[1].span.line, toks[1].span.col), (3, 5));
    }

    #[test]
    fn unterminated_comment() {
        assert!(lex("a /* b").is_err());
    }
}
