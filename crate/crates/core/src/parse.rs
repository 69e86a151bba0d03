//! Recursive-descent parser for exact polynomial expressions.
//!
//! Grammar: integers, rationals `a/b`, the imaginary unit `i`, declared
//! variable names, `+ - * ^` with `^` taking a non-negative integer literal,
//! and parentheses. No implicit multiplication, no floating literals, `/`
//! only between integer literals. Whitespace is insignificant.

use crate::poly::MultiPoly;
use crate::scalar::{GaussianRational, Rat};
use num_bigint::BigInt;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let b = lx.src[lx.pos];
            let tok = match b {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b'0'..=b'9' => {
                    let mut end = lx.pos;
                    while end < lx.src.len() && lx.src[end].is_ascii_digit() {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap();
                    lx.pos = end;
                    Tok::Int(text.parse().unwrap())
                }
                b if b.is_ascii_alphabetic() || b == b'_' => {
                    let mut end = lx.pos;
                    while end < lx.src.len()
                        && (lx.src[end].is_ascii_alphanumeric() || lx.src[end] == b'_')
                    {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&lx.src[lx.pos..end]).unwrap();
                    lx.pos = end;
                    Tok::Ident(text.to_string())
                }
                other => {
                    return Err(ParseError {
                        pos: start,
                        message: format!("unexpected character {:?}", other as char),
                    })
                }
            };
            out.push((start, tok));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    vars: &'a [String],
    nvars: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.idx += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn err(&self, message: String) -> ParseError {
        ParseError {
            pos: self.pos(),
            message,
        }
    }

    // expr ::= term (('+'|'-') term)*
    fn expr(&mut self) -> Result<MultiPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.idx += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    // term ::= ('-'|'+')* factor ('*' factor)*
    fn term(&mut self) -> Result<MultiPoly, ParseError> {
        let mut negate = false;
        loop {
            match self.peek() {
                Some(Tok::Minus) => {
                    negate = !negate;
                    self.idx += 1;
                }
                Some(Tok::Plus) => {
                    self.idx += 1;
                }
                _ => break,
            }
        }
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.idx += 1;
            acc = &acc * &self.factor()?;
        }
        if negate {
            acc = -acc;
        }
        Ok(acc)
    }

    // factor ::= primary ('^' INT)?
    fn factor(&mut self) -> Result<MultiPoly, ParseError> {
        let base = self.primary()?;
        if let Some(Tok::Caret) = self.peek() {
            self.idx += 1;
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e: u32 = n.try_into().map_err(|_| ParseError {
                        pos: self.pos(),
                        message: "exponent too large".into(),
                    })?;
                    Ok(base.pow(e))
                }
                Some(Tok::Minus) => Err(self.err("negative exponent not allowed".into())),
                _ => Err(self.err("expected integer exponent after '^'".into())),
            }
        } else {
            Ok(base)
        }
    }

    // primary ::= INT ('/' INT)? | 'i' | VAR | '(' expr ')'
    fn primary(&mut self) -> Result<MultiPoly, ParseError> {
        match self.bump() {
            Some(Tok::Int(num)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.idx += 1;
                    match self.bump() {
                        Some(Tok::Int(den)) => {
                            if den == BigInt::from(0) {
                                return Err(self.err("zero denominator".into()));
                            }
                            Ok(MultiPoly::constant(
                                self.nvars,
                                GaussianRational::from_rat(Rat::new(num, den)),
                            ))
                        }
                        _ => Err(self.err("expected integer denominator after '/'".into())),
                    }
                } else {
                    Ok(MultiPoly::constant(
                        self.nvars,
                        GaussianRational::from_rat(Rat::from(num)),
                    ))
                }
            }
            Some(Tok::Ident(name)) => {
                if name == "i" {
                    return Ok(MultiPoly::constant(self.nvars, GaussianRational::i()));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(k) => Ok(MultiPoly::var(self.nvars, k)),
                    None => Err(ParseError {
                        pos: self.toks[self.idx - 1].0,
                        message: format!("unknown variable `{name}`"),
                    }),
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Slash) => Err(ParseError {
                pos: self.toks[self.idx - 1].0,
                message: "'/' is only allowed between integer literals".into(),
            }),
            _ => Err(self.err("expected a number, variable, or '('".into())),
        }
    }
}

/// Parse `src` into an exact polynomial over the named variables.
pub fn parse_poly(src: &str, vars: &[String]) -> Result<MultiPoly, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            pos: 0,
            message: "empty input".into(),
        });
    }
    let toks = Lexer::tokens(src)?;
    let mut parser = Parser {
        toks,
        idx: 0,
        vars,
        nvars: vars.len(),
        end: src.len(),
    };
    let poly = parser.expr()?;
    if parser.idx != parser.toks.len() {
        return Err(parser.err("trailing input".into()));
    }
    Ok(poly)
}
