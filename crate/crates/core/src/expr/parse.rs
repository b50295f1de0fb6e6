//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | power
//! power  := atom ("^" factor)?
//! atom   := number | ident | ident "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-1` is `1/2`.

use std::fmt;

use super::{Expr, Func};
use crate::rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    UnknownFunction(String),
    TrailingInput,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}` at byte {}", self.offset),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input at byte {}", self.offset),
            ParseErrorKind::Expected(what) => write!(f, "expected {what} at byte {}", self.offset),
            ParseErrorKind::UnknownFunction(name) => {
                write!(f, "unknown function `{name}` at byte {}", self.offset)
            }
            ParseErrorKind::TrailingInput => write!(f, "unexpected trailing input at byte {}", self.offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            out.push((start, Tok::Num(src[start..i].to_string())));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or(c);
            return Err(ParseError { offset: i, kind: ParseErrorKind::UnexpectedChar(ch) });
        }
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

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { offset: self.offset(), kind }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc * self.factor()?;
            } else if self.eat('/') {
                acc = acc / self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.factor()?;
            return Ok(base.pow(&e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        let tok = match self.toks.get(self.pos) {
            Some((_, t)) => t.clone(),
            None => return Err(self.err(ParseErrorKind::UnexpectedEnd)),
        };
        self.pos += 1;
        match tok {
            Tok::Num(s) => rational::parse_decimal(&s)
                .map(Expr::num)
                .ok_or(ParseError { offset, kind: ParseErrorKind::Expected("a number") }),
            Tok::Ident(name) => {
                if self.eat('(') {
                    let f = Func::from_name(&name)
                        .ok_or(ParseError { offset, kind: ParseErrorKind::UnknownFunction(name.clone()) })?;
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.err(ParseErrorKind::Expected("`)`")));
                    }
                    Ok(Expr::apply(f, arg))
                } else {
                    Ok(Expr::sym(&name))
                }
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err(ParseErrorKind::Expected("`)`")));
                }
                Ok(e)
            }
            Tok::Op(c) => Err(ParseError { offset, kind: ParseErrorKind::UnexpectedChar(c) }),
        }
    }
}

/// Parses an expression and returns its canonical form.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err(ParseErrorKind::TrailingInput));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;

    #[test]
    fn polynomial_has_six_terms() {
        let p = parse("1 - x^2 + x^3 + x^4/4 - 3*x^5/5 + x^6/6").unwrap();
        match p.node() {
            Node::Add(ch) => assert_eq!(ch.len(), 6),
            _ => panic!("expected add"),
        }
    }

    #[test]
    fn precedence() {
        let x = Expr::sym("x");
        assert_eq!(parse("-x^2").unwrap(), -x.powi(2));
        assert_eq!(parse("2^3^2").unwrap(), Expr::int(512));
        assert_eq!(parse("2^-1").unwrap(), Expr::frac(1, 2));
        assert_eq!(parse("a - b - c").unwrap(), parse("a + -b + -c").unwrap());
        assert_eq!(parse("a/b/c").unwrap(), parse("a/(b*c)").unwrap());
        assert_eq!(parse("0").unwrap(), Expr::zero());
        assert_eq!(parse("0.97").unwrap(), Expr::frac(97, 100));
    }

    #[test]
    fn symbolic_exponent() {
        let e = parse("(1 + x/n)^n").unwrap();
        assert!(matches!(e.node(), Node::Pow(_, ex) if ex.as_symbol().is_some()));
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse("1 + $").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse("foo(x)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownFunction("foo".into()));
        assert_eq!(e.offset, 0);
        let e = parse("(x + 1").unwrap_err();
        assert_eq!(e.offset, 6);
        assert!(parse("x y").is_err());
        assert!(parse("").is_err());
    }
}
