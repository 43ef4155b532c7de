//! Front-ends that compile stack-machine models into root rewrite systems.
//!
//! Each family gets a spec type with native step semantics, an encoder that
//! turns the spec into a rewrite system over trees, a codec between native
//! configurations and terms, and a line-oriented file format. The native
//! semantics exist so the generated rules can be checked against them
//! command by command, not trusted.

pub mod apds;
pub mod ompds;
pub mod pds;

use std::collections::BTreeSet;

use thiserror::Error;

/// Parse failure in a front-end file, with a 1-based line number.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FrontendParseError {
    pub line: usize,
    pub message: String,
}

pub(crate) fn err(line: usize, message: impl Into<String>) -> FrontendParseError {
    FrontendParseError {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, keeping original line numbers.
pub(crate) fn logical_lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                None
            } else {
                Some((i + 1, line.to_string()))
            }
        })
        .collect()
}

/// Splits `p : cmd -> q` into its three fields.
pub(crate) fn split_command(line: &str) -> Option<(String, String, String)> {
    let (from, rest) = line.split_once(':')?;
    let (cmd, to) = rest.rsplit_once("->")?;
    Some((
        from.trim().to_string(),
        cmd.trim().to_string(),
        to.trim().to_string(),
    ))
}

/// Tokenizes the inside of a quoted stack word down to the `.` bottom marker.
/// Whitespace separates symbols; an unbroken run that is not itself a symbol
/// is split into characters, each of which must be one, so `"ab."` works for
/// single-letter alphabets while `"sym1 sym2 ."` stays available.
pub(crate) fn parse_word_literal(
    raw: &str,
    symbols: &BTreeSet<String>,
) -> Result<Vec<String>, String> {
    let mut word = Vec::new();
    let mut done = false;
    for chunk in raw.split_whitespace() {
        if done {
            return Err(format!("content after `.` in stack word `{raw}`"));
        }
        let (chunk, ends) = match chunk.strip_suffix('.') {
            Some(rest) => (rest, true),
            None => (chunk, false),
        };
        if !chunk.is_empty() {
            if symbols.contains(chunk) {
                word.push(chunk.to_string());
            } else {
                for c in chunk.chars() {
                    let s = c.to_string();
                    if !symbols.contains(&s) {
                        return Err(format!("unknown stack symbol `{chunk}`"));
                    }
                    word.push(s);
                }
            }
        }
        if ends {
            done = true;
        }
    }
    if !done {
        return Err(format!("stack word `{raw}` does not end with `.`"));
    }
    Ok(word)
}

/// Renders a stack word in the canonical literal form, symbols space
/// separated and `.` for the bottom.
pub(crate) fn word_literal(word: &[String]) -> String {
    let mut out = String::new();
    for sym in word {
        out.push_str(sym);
        out.push(' ');
    }
    out.push('.');
    out
}
