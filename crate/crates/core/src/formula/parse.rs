//! Precedence-climbing parser for the ASCII formula grammar.
//!
//! Binding strength, tightest first: `~ [] <>`; `& |`; `|>`; `-> <->`.
//! `->` and `<->` associate to the right, `&` and `|` to the left, and `|>`
//! does not associate at all.

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {pos}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected token {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("`|>` is not associative; parenthesize the chain")]
    NonAssociative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Bottom,
    Top,
    Not,
    Box,
    Diamond,
    And,
    Or,
    Rhd,
    Implies,
    Iff,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom `{a}`"),
            Tok::Bottom => "`F`".into(),
            Tok::Top => "`T`".into(),
            Tok::Not => "`~`".into(),
            Tok::Box => "`[]`".into(),
            Tok::Diamond => "`<>`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Rhd => "`|>`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let starts = |i: usize, pat: &str| text[i..].starts_with(pat);
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = if starts(i, "<->") {
            (Tok::Iff, 3)
        } else if starts(i, "<>") {
            (Tok::Diamond, 2)
        } else if starts(i, "[]") {
            (Tok::Box, 2)
        } else if starts(i, "|>") {
            (Tok::Rhd, 2)
        } else if starts(i, "->") {
            (Tok::Implies, 2)
        } else {
            match c {
                b'~' => (Tok::Not, 1),
                b'&' => (Tok::And, 1),
                b'|' => (Tok::Or, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'F' => (Tok::Bottom, 1),
                b'T' => (Tok::Top, 1),
                b'a'..=b'z' => {
                    let end = text[i..]
                        .find(|ch: char| !(ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '_'))
                        .map_or(text.len(), |k| i + k);
                    (Tok::Atom(text[i..end].to_string()), end - i)
                }
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(ParseError {
                        pos: i,
                        kind: ParseErrorKind::UnexpectedChar(ch),
                    });
                }
            }
        };
        out.push((i, tok));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self) -> ParseError {
        let kind = match self.peek() {
            Some(t) => ParseErrorKind::UnexpectedToken(t.describe()),
            None => ParseErrorKind::UnexpectedEnd,
        };
        ParseError {
            pos: self.offset(),
            kind,
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.interpretation()?;
        match self.peek() {
            Some(Tok::Implies) => {
                self.pos += 1;
                let rhs = self.implication()?;
                Ok(Formula::implies(lhs, rhs))
            }
            Some(Tok::Iff) => {
                self.pos += 1;
                let rhs = self.implication()?;
                Ok(Formula::iff(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn interpretation(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.boolean()?;
        if self.peek() != Some(&Tok::Rhd) {
            return Ok(lhs);
        }
        self.pos += 1;
        let rhs = self.boolean()?;
        if self.peek() == Some(&Tok::Rhd) {
            return Err(ParseError {
                pos: self.offset(),
                kind: ParseErrorKind::NonAssociative,
            });
        }
        Ok(Formula::rhd(lhs, rhs))
    }

    fn boolean(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::And) => {
                    self.pos += 1;
                    acc = Formula::and(acc, self.unary()?);
                }
                Some(Tok::Or) => {
                    self.pos += 1;
                    acc = Formula::or(acc, self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error());
        };
        match tok {
            Tok::Not => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Tok::Box => {
                self.pos += 1;
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::Diamond => {
                self.pos += 1;
                Ok(Formula::diamond(self.unary()?))
            }
            Tok::Atom(name) => {
                self.pos += 1;
                Ok(Formula::atom(&name))
            }
            Tok::Bottom => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Tok::Top => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.implication()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error());
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error()),
        }
    }
}

/// Parses the ASCII grammar into a core formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.implication()?;
    if p.pos != p.toks.len() {
        return Err(p.error());
    }
    Ok(f)
}
