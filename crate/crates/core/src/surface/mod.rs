//! ASCII text syntax for patterns, problems, substitutions and signatures.
//!
//! ```text
//! expr    := ("ex" | "all") IDENT "." expr | iff
//! iff     := imp ("<->" imp)?
//! imp     := or ("->" imp)?
//! or      := and ("\/" and)*
//! and     := rel ("/\" rel)*
//! rel     := unary (("=" | "in" | "subset") unary)?
//! unary   := "!" unary | app
//! app     := primary primary*
//! primary := IDENT | INT | "bot" | "top" | "ceil" | "floor" "(" expr ")" | "(" expr ")"
//! ```
//!
//! A binder may also stand as the right operand of any operator; it then
//! extends to the end of the enclosing parentheses.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

pub use parser::{
    parse_pattern, parse_pattern_with, parse_problem, parse_problem_with, parse_substitution,
    parse_substitution_with, parse_term, ParseOptions,
};
pub use printer::{print_pattern, print_pattern_in, print_problem, print_substitution};

use crate::theory::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Reads a signature file: one `symbol <name> [arity <n>]` per line, with
/// `#` starting a comment.
pub fn parse_signature(src: &str) -> Result<Signature, ParseError> {
    let mut sig = Signature::new();
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        let col = |word: &str| word.as_ptr() as usize - raw.as_ptr() as usize + 1;
        let err = |word: &str, msg: String| ParseError::new(lineno + 1, col(word), msg);
        match words.as_slice() {
            [] => {}
            ["symbol", name] => {
                sig.declare(name, None).map_err(|e| err(name, e.to_string()))?;
            }
            ["symbol", name, "arity", n] => {
                let arity: usize = n.parse().map_err(|_| err(n, format!("`{n}` is not an arity")))?;
                sig.declare(name, Some(arity)).map_err(|e| err(name, e.to_string()))?;
            }
            [first, ..] => {
                return Err(err(first, "expected `symbol <name> [arity <n>]`".to_string()));
            }
        }
    }
    Ok(sig)
}

/// Renders a signature in the file format read by [`parse_signature`].
pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::new();
    for (s, arity) in sig.symbols() {
        match arity {
            Some(n) => out.push_str(&format!("symbol {s} arity {n}\n")),
            None => out.push_str(&format!("symbol {s}\n")),
        }
    }
    out
}
