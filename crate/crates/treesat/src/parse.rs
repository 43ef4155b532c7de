//! Concrete syntax for terms and patterns.
//!
//! `f(g(x),?y)` style: applications are written with parentheses, variables
//! with a leading `?`, and a bare identifier abbreviates a nullary
//! application, so `bot` and `bot()` parse the same. A variable's sort is
//! inferred from the argument position it occupies, which is why a variable
//! cannot stand alone at top level.

use std::fmt;

use thiserror::Error;

use crate::alphabet::{RankedAlphabet, SortId};
use crate::term::{Pattern, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl fmt::Display) -> ParseError {
        ParseError {
            offset,
            message: message.to_string(),
        }
    }
}

pub fn parse_term(alphabet: &RankedAlphabet, input: &str) -> Result<Term, ParseError> {
    let pat = Parser::run(alphabet, input, false)?;
    Ok(pat
        .as_term()
        .expect("variables rejected already, conversion is total"))
}

pub fn parse_pattern(alphabet: &RankedAlphabet, input: &str) -> Result<Pattern, ParseError> {
    Parser::run(alphabet, input, true)
}

struct Parser<'a> {
    alphabet: &'a RankedAlphabet,
    bytes: &'a [u8],
    pos: usize,
    allow_vars: bool,
    var_sorts: std::collections::BTreeMap<String, SortId>,
}

impl<'a> Parser<'a> {
    fn run(alphabet: &'a RankedAlphabet, input: &'a str, allow_vars: bool) -> Result<Pattern, ParseError> {
        let mut p = Parser {
            alphabet,
            bytes: input.as_bytes(),
            pos: 0,
            allow_vars,
            var_sorts: Default::default(),
        };
        let pat = p.expr(None)?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(ParseError::new(p.pos, "unexpected trailing input"));
        }
        Ok(pat)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {}
            _ => return Err(ParseError::new(start, "expected an identifier")),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok((text.to_string(), start))
    }

    fn expr(&mut self, expected: Option<SortId>) -> Result<Pattern, ParseError> {
        self.skip_ws();
        if self.peek() == Some(b'?') {
            let mark = self.pos;
            if !self.allow_vars {
                return Err(ParseError::new(mark, "variables are not allowed in a ground term"));
            }
            self.pos += 1;
            let (name, _) = self.ident()?;
            let sort = expected.ok_or_else(|| {
                ParseError::new(mark, format!("cannot infer the sort of `?{name}` at top level"))
            })?;
            if let Some(&prev) = self.var_sorts.get(&name) {
                if prev != sort {
                    return Err(ParseError::new(
                        mark,
                        format!(
                            "variable `?{name}` already used at sort `{}`, here it would be `{}`",
                            self.alphabet.sort_name(prev),
                            self.alphabet.sort_name(sort)
                        ),
                    ));
                }
            } else {
                self.var_sorts.insert(name.clone(), sort);
            }
            return Ok(Pattern::Var(Var { name, sort }));
        }

        let (name, start) = self.ident()?;
        let sym = self
            .alphabet
            .symbol_id(&name)
            .ok_or_else(|| ParseError::new(start, format!("unknown symbol `{name}`")))?;
        let symbol = self.alphabet.symbol(sym);
        if let Some(want) = expected {
            if symbol.result != want {
                return Err(ParseError::new(
                    start,
                    format!(
                        "symbol `{name}` has sort `{}`, expected `{}`",
                        self.alphabet.sort_name(symbol.result),
                        self.alphabet.sort_name(want)
                    ),
                ));
            }
        }

        self.skip_ws();
        let mut children = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() != Some(b')') {
                loop {
                    let idx = children.len();
                    let child_sort = symbol.args.get(idx).copied();
                    if child_sort.is_none() {
                        return Err(ParseError::new(
                            self.pos,
                            format!("symbol `{name}` expects {} arguments", symbol.arity()),
                        ));
                    }
                    let child = self.expr(child_sort)?;
                    children.push(child);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b')') => break,
                        _ => return Err(ParseError::new(self.pos, "expected `,` or `)`")),
                    }
                }
            }
            self.pos += 1; // consume ')'
        }
        if children.len() != symbol.arity() {
            return Err(ParseError::new(
                start,
                format!(
                    "symbol `{name}` expects {} arguments, got {}",
                    symbol.arity(),
                    children.len()
                ),
            ));
        }
        Ok(Pattern::App { sym, children })
    }
}
