//! Token classes: the alphabet patterns are written in.

use std::fmt;

use super::token::{Token, TokenKind};

/// One position of a pattern. Fixed-length variants carry the run length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenClass {
    Const(String),
    DigitFixed(usize),
    DigitPlus,
    Num,
    LetterFixed(usize),
    LetterPlus,
    AlnumFixed(usize),
    AlnumPlus,
    Any,
}

impl TokenClass {
    pub fn matches(&self, token: &Token<'_>) -> bool {
        let plain_digits = token.kind == TokenKind::Digits && !token.text.contains('.');
        let letters = token.kind == TokenKind::Letters;
        match self {
            TokenClass::Const(s) => s == token.text,
            TokenClass::DigitFixed(k) => plain_digits && token.len() == *k,
            TokenClass::DigitPlus => plain_digits,
            TokenClass::Num => token.kind == TokenKind::Digits,
            TokenClass::LetterFixed(k) => letters && token.len() == *k,
            TokenClass::LetterPlus => letters,
            TokenClass::AlnumFixed(k) => (letters || plain_digits) && token.len() == *k,
            TokenClass::AlnumPlus => letters || plain_digits,
            TokenClass::Any => true,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, TokenClass::Const(_))
    }

    /// Unbounded classes: `<digit>+`, `<num>`, `<letter>+`, `<alphanum>+`, `<any>`.
    pub fn is_open(&self) -> bool {
        matches!(
            self,
            TokenClass::DigitPlus
                | TokenClass::Num
                | TokenClass::LetterPlus
                | TokenClass::AlnumPlus
                | TokenClass::Any
        )
    }
}

/// Renders a class tag. Literals are handled by `Pattern`'s renderer since
/// their escaping depends on the preceding token.
impl fmt::Display for TokenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenClass::Const(s) => f.write_str(s),
            TokenClass::DigitFixed(1) => f.write_str("<digit>"),
            TokenClass::DigitFixed(k) => write!(f, "<digit>{{{k}}}"),
            TokenClass::DigitPlus => f.write_str("<digit>+"),
            TokenClass::Num => f.write_str("<num>"),
            TokenClass::LetterFixed(k) => write!(f, "<letter>{{{k}}}"),
            TokenClass::LetterPlus => f.write_str("<letter>+"),
            TokenClass::AlnumFixed(k) => write!(f, "<alphanum>{{{k}}}"),
            TokenClass::AlnumPlus => f.write_str("<alphanum>+"),
            TokenClass::Any => f.write_str("<any>"),
        }
    }
}
