//! Patterns and their canonical text form.
//!
//! Grammar: class tags `<digit>`, `<digit>{k}`, `<digit>+`, `<num>`,
//! `<letter>{k}`, `<letter>+`, `<alphanum>{k}`, `<alphanum>+`, `<any>`, and
//! literal runs in between. Inside literals `<`, `\` and `{` are escaped with a
//! backslash, as is a `+` directly after a class tag. A literal run is split
//! into one constant per maximal token.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::class::TokenClass;
use super::hierarchy::Hierarchy;
use super::token::{tokenize_with, Token, TokenizerOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternParseError {
    #[error("empty pattern")]
    Empty,
    #[error("unterminated class tag at byte {0}")]
    UnterminatedTag(usize),
    #[error("unknown class tag `<{0}>`")]
    UnknownTag(String),
    #[error("invalid length quantifier at byte {0}")]
    BadLength(usize),
    #[error("dangling escape at end of pattern")]
    DanglingEscape,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    tokens: Vec<TokenClass>,
}

impl Pattern {
    pub fn new(tokens: Vec<TokenClass>) -> Self {
        Pattern { tokens }
    }

    pub fn tokens(&self) -> &[TokenClass] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Canonical key, identical to the `Display` output.
    pub fn key(&self) -> String {
        self.to_string()
    }

    /// The all-`<any>` pattern, which accepts every value of its width.
    pub fn is_trivial(&self) -> bool {
        self.tokens.iter().all(|c| *c == TokenClass::Any)
    }

    pub fn matches(&self, value: &str) -> bool {
        self.matches_with(value, TokenizerOptions::default())
    }

    pub fn matches_with(&self, value: &str, opts: TokenizerOptions) -> bool {
        match tokenize_with(value, opts) {
            Ok(tokens) => self.matches_tokens(&tokens),
            Err(_) => false,
        }
    }

    pub fn matches_tokens(&self, tokens: &[Token<'_>]) -> bool {
        tokens.len() == self.tokens.len() && self.tokens.iter().zip(tokens).all(|(c, t)| c.matches(t))
    }

    /// Summed generalization depth; lower is more specific.
    pub fn depth(&self, hierarchy: &Hierarchy) -> u32 {
        self.tokens.iter().map(|c| hierarchy.depth_of(c)).sum()
    }

    pub fn parse_with(text: &str, opts: TokenizerOptions) -> Result<Self, PatternParseError> {
        let mut tokens = Vec::new();
        let mut literal = String::new();
        let flush = |literal: &mut String, tokens: &mut Vec<TokenClass>| {
            if !literal.is_empty() {
                let toks = tokenize_with(literal, opts).expect("non-empty literal");
                tokens.extend(toks.iter().map(|t| TokenClass::Const(t.text.to_owned())));
                literal.clear();
            }
        };
        let bytes = text.as_bytes();
        let mut chars = text.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => match chars.next() {
                    Some((_, e)) => literal.push(e),
                    None => return Err(PatternParseError::DanglingEscape),
                },
                '<' => {
                    flush(&mut literal, &mut tokens);
                    let close = text[i..].find('>').ok_or(PatternParseError::UnterminatedTag(i))? + i;
                    let name = &text[i + 1..close];
                    while chars.peek().is_some_and(|&(j, _)| j <= close) {
                        chars.next();
                    }
                    let mut fixed = None;
                    let mut plus = false;
                    match bytes.get(close + 1) {
                        Some(b'{') => {
                            let end = text[close..]
                                .find('}')
                                .map(|e| e + close)
                                .ok_or(PatternParseError::BadLength(close + 1))?;
                            let k: usize = text[close + 2..end]
                                .parse()
                                .ok()
                                .filter(|k| *k > 0)
                                .ok_or(PatternParseError::BadLength(close + 1))?;
                            fixed = Some(k);
                            while chars.peek().is_some_and(|&(j, _)| j <= end) {
                                chars.next();
                            }
                        }
                        Some(b'+') => {
                            plus = true;
                            chars.next();
                        }
                        _ => {}
                    }
                    let class = match (name, fixed, plus) {
                        ("digit", Some(k), _) => TokenClass::DigitFixed(k),
                        ("digit", None, true) => TokenClass::DigitPlus,
                        ("digit", None, false) => TokenClass::DigitFixed(1),
                        ("num", None, false) => TokenClass::Num,
                        ("letter", Some(k), _) => TokenClass::LetterFixed(k),
                        ("letter", None, true) => TokenClass::LetterPlus,
                        ("letter", None, false) => TokenClass::LetterFixed(1),
                        ("alphanum", Some(k), _) => TokenClass::AlnumFixed(k),
                        ("alphanum", None, true) => TokenClass::AlnumPlus,
                        ("alphanum", None, false) => TokenClass::AlnumFixed(1),
                        ("any" | "all", None, false) => TokenClass::Any,
                        _ => return Err(PatternParseError::UnknownTag(name.to_owned())),
                    };
                    tokens.push(class);
                }
                c => literal.push(c),
            }
        }
        flush(&mut literal, &mut tokens);
        if tokens.is_empty() {
            return Err(PatternParseError::Empty);
        }
        Ok(Pattern { tokens })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut after_tag = false;
        for class in &self.tokens {
            match class {
                TokenClass::Const(s) => {
                    for (i, c) in s.chars().enumerate() {
                        if matches!(c, '<' | '\\' | '{') || (c == '+' && i == 0 && after_tag) {
                            f.write_char('\\')?;
                        }
                        f.write_char(c)?;
                    }
                    after_tag = false;
                }
                tag => {
                    write!(f, "{tag}")?;
                    after_tag = true;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = PatternParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pattern::parse_with(s, TokenizerOptions::default())
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
