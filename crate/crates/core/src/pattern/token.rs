//! Splitting cell values into maximal runs of letters, digits or symbols.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error("empty value cannot be tokenized")]
    Empty,
}

/// Character category of a token. Whitespace and non-ASCII characters are symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenKind {
    Letters,
    Digits,
    Symbols,
}

impl TokenKind {
    fn of(c: char) -> TokenKind {
        if c.is_ascii_alphabetic() {
            TokenKind::Letters
        } else if c.is_ascii_digit() {
            TokenKind::Digits
        } else {
            TokenKind::Symbols
        }
    }
}

/// Finer classification used by the hierarchy: digit runs that absorbed a
/// decimal point are their own shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Digits,
    Letters,
    Symbols,
    Decimal,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Digits, Shape::Letters, Shape::Symbols, Shape::Decimal];

    pub fn name(self) -> &'static str {
        match self {
            Shape::Digits => "digits",
            Shape::Letters => "letters",
            Shape::Symbols => "symbols",
            Shape::Decimal => "decimal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token<'a> {
    pub text: &'a str,
    pub kind: TokenKind,
}

impl<'a> Token<'a> {
    /// Length in characters.
    pub fn len(&self) -> usize {
        match self.kind {
            // letter and digit runs are ASCII
            TokenKind::Letters | TokenKind::Digits => self.text.len(),
            TokenKind::Symbols => self.text.chars().count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn shape(&self) -> Shape {
        match self.kind {
            TokenKind::Letters => Shape::Letters,
            TokenKind::Symbols => Shape::Symbols,
            TokenKind::Digits if self.text.contains('.') => Shape::Decimal,
            TokenKind::Digits => Shape::Digits,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenizerOptions {
    /// Fold `d.d` into a single digit token (one decimal point per run).
    pub merge_decimals: bool,
}

/// Tokenizes with default options (decimal points stay separate symbols).
pub fn tokenize(value: &str) -> Result<Vec<Token<'_>>, TokenizeError> {
    tokenize_with(value, TokenizerOptions::default())
}

pub fn tokenize_with(value: &str, opts: TokenizerOptions) -> Result<Vec<Token<'_>>, TokenizeError> {
    if value.is_empty() {
        return Err(TokenizeError::Empty);
    }
    let bytes = value.as_bytes();
    let mut tokens = Vec::new();
    let mut chars = value.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        let kind = TokenKind::of(c);
        let mut end = start + c.len_utf8();
        let mut seen_point = false;
        while let Some(&(i, next)) = chars.peek() {
            if TokenKind::of(next) == kind {
                end = i + next.len_utf8();
                chars.next();
                continue;
            }
            if kind == TokenKind::Digits
                && opts.merge_decimals
                && next == '.'
                && !seen_point
                && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)
            {
                seen_point = true;
                end = i + 1;
                chars.next();
                continue;
            }
            break;
        }
        tokens.push(Token { text: &value[start..end], kind });
    }
    Ok(tokens)
}

/// Number of tokens in `value`, zero for the empty string.
pub fn token_count(value: &str, opts: TokenizerOptions) -> usize {
    tokenize_with(value, opts).map(|t| t.len()).unwrap_or(0)
}
