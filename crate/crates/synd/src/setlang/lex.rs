//! Tokenizer with byte-exact positions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Int(i128),
    LParen,
    RParen,
    Comma,
    LBrace,
    RBrace,
    Eq,
    DotDot,
    Dot,
    Pipe,
    Amp,
    Backslash,
    Bang,
    Plus,
    Minus,
    Star,
    Caret,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Eq => "'='".into(),
            Tok::DotDot => "'..'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Backslash => "'\\'".into(),
            Tok::Bang => "'!'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Spanned {
    pub tok: Tok,
    pub pos: usize,
}

/// 1-based line and 0-based byte column of a byte offset.
pub(super) fn position(text: &str, pos: usize) -> (usize, usize) {
    let prefix = &text.as_bytes()[..pos.min(text.len())];
    let line = 1 + prefix.iter().filter(|&&b| b == b'\n').count();
    let line_start = prefix
        .iter()
        .rposition(|&b| b == b'\n')
        .map(|i| i + 1)
        .unwrap_or(0);
    (line, pos - line_start)
}

pub(super) fn syntax_error(text: &str, pos: usize, expected: impl Into<String>) -> Error {
    let (line, column) = position(text, pos);
    Error::Syntax {
        line,
        column,
        expected: expected.into(),
    }
}

pub(super) fn lex(text: &str) -> Result<Vec<Spanned>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let pos = i;
        let tok = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b'=' => Tok::Eq,
            b'|' => Tok::Pipe,
            b'&' => Tok::Amp,
            b'\\' => Tok::Backslash,
            b'!' => Tok::Bang,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'.' => {
                if bytes.get(i + 1) == Some(&b'.') {
                    i += 2;
                    out.push(Spanned {
                        tok: Tok::DotDot,
                        pos,
                    });
                    continue;
                }
                Tok::Dot
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let digits = &text[i..j];
                let value: i128 = digits
                    .parse()
                    .map_err(|_| syntax_error(text, pos, "integer literal within 128 bits"))?;
                i = j;
                out.push(Spanned {
                    tok: Tok::Int(value),
                    pos,
                });
                continue;
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_')
                {
                    j += 1;
                }
                let name = text[i..j].to_string();
                i = j;
                out.push(Spanned {
                    tok: Tok::Ident(name),
                    pos,
                });
                continue;
            }
            _ => return Err(syntax_error(text, pos, "a valid token")),
        };
        i += 1;
        out.push(Spanned { tok, pos });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        pos: bytes.len(),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_tokens() {
        let toks = lex("interval(2, 5)").unwrap();
        assert_eq!(toks.len(), 7);
        assert_eq!(toks[0].tok, Tok::Ident("interval".into()));
        assert_eq!(toks[1].tok, Tok::LParen);
        assert_eq!(toks[1].pos, 8);
        assert_eq!(toks[2].tok, Tok::Int(2));
        assert_eq!(toks[4].tok, Tok::Int(5));
        assert_eq!(toks[4].pos, 12);
        assert_eq!(toks[6].tok, Tok::Eof);
        assert_eq!(toks[6].pos, 14);
    }

    #[test]
    fn dotdot_vs_dot() {
        let toks = lex("1..3 .A").unwrap();
        let kinds: Vec<&Tok> = toks.iter().map(|s| &s.tok).collect();
        assert_eq!(
            kinds,
            vec![
                &Tok::Int(1),
                &Tok::DotDot,
                &Tok::Int(3),
                &Tok::Dot,
                &Tok::Ident("A".into()),
                &Tok::Eof
            ]
        );
    }

    #[test]
    fn line_column_math() {
        let text = "abc\nde\nf";
        assert_eq!(position(text, 0), (1, 0));
        assert_eq!(position(text, 3), (1, 3));
        assert_eq!(position(text, 4), (2, 0));
        assert_eq!(position(text, 6), (2, 2));
        assert_eq!(position(text, 7), (3, 0));
        assert_eq!(position(text, 8), (3, 1));
    }

    #[test]
    fn rejects_stray_bytes() {
        assert!(lex("interval(2, 5) $").is_err());
        assert!(lex("interval(2, 5]").is_err());
    }
}
