//! Seeded generation of columns from domain patterns.
//!
//! Open-length classes draw run lengths uniformly from 1 to 5. Letters are
//! lowercase ASCII, digits 0-9. Alphanumeric classes pick letters or digits
//! for the whole run with equal odds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::index::Column;
use crate::pattern::{tokenize, Pattern, TokenClass, TokenKind};

pub const MAX_RUN: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("cannot sample values for `<any>` in {0}")]
    UnsupportedClass(String),
    #[error("positions {1} and {2} of {0} can produce runs of the same kind, which would merge into one token")]
    AmbiguousAdjacency(String, usize, usize),
}

fn kinds(class: &TokenClass) -> Vec<TokenKind> {
    match class {
        TokenClass::Const(s) => tokenize(s).map(|t| t.iter().map(|t| t.kind).collect()).unwrap_or_default(),
        TokenClass::DigitFixed(_) | TokenClass::DigitPlus | TokenClass::Num => vec![TokenKind::Digits],
        TokenClass::LetterFixed(_) | TokenClass::LetterPlus => vec![TokenKind::Letters],
        TokenClass::AlnumFixed(_) | TokenClass::AlnumPlus => vec![TokenKind::Letters, TokenKind::Digits],
        TokenClass::Any => vec![TokenKind::Letters, TokenKind::Digits, TokenKind::Symbols],
    }
}

/// Checks that values sampled from `pattern` tokenize back position by position.
pub fn check_samplable(pattern: &Pattern) -> Result<(), SynthError> {
    let t = pattern.tokens();
    if t.contains(&TokenClass::Any) {
        return Err(SynthError::UnsupportedClass(pattern.key()));
    }
    for i in 1..t.len() {
        let (prev, next) = (kinds(&t[i - 1]), kinds(&t[i]));
        if prev.iter().any(|k| next.contains(k)) {
            return Err(SynthError::AmbiguousAdjacency(pattern.key(), i - 1, i));
        }
    }
    Ok(())
}

fn push_run(out: &mut String, rng: &mut impl Rng, len: usize, letters: bool) {
    for _ in 0..len {
        let c = if letters { b'a' + rng.random_range(0..26u8) } else { b'0' + rng.random_range(0..10u8) };
        out.push(c as char);
    }
}

/// One value of `pattern`; the pattern must pass [`check_samplable`].
pub fn sample_value(pattern: &Pattern, rng: &mut impl Rng) -> String {
    let mut out = String::new();
    for class in pattern.tokens() {
        match class {
            TokenClass::Const(s) => out.push_str(s),
            TokenClass::DigitFixed(k) => push_run(&mut out, rng, *k, false),
            TokenClass::DigitPlus | TokenClass::Num => {
                let len = rng.random_range(1..=MAX_RUN);
                push_run(&mut out, rng, len, false);
            }
            TokenClass::LetterFixed(k) => push_run(&mut out, rng, *k, true),
            TokenClass::LetterPlus => {
                let len = rng.random_range(1..=MAX_RUN);
                push_run(&mut out, rng, len, true);
            }
            TokenClass::AlnumFixed(k) => {
                let letters = rng.random_bool(0.5);
                push_run(&mut out, rng, *k, letters);
            }
            TokenClass::AlnumPlus => {
                let letters = rng.random_bool(0.5);
                let len = rng.random_range(1..=MAX_RUN);
                push_run(&mut out, rng, len, letters);
            }
            TokenClass::Any => unreachable!("rejected by check_samplable"),
        }
    }
    out
}

pub fn sample_column(pattern: &Pattern, n: usize, rng: &mut impl Rng) -> Vec<String> {
    (0..n).map(|_| sample_value(pattern, rng)).collect()
}

/// `columns_per_domain` columns for each domain, ids `d{i}/c{j}`.
pub fn generate_synthetic_corpus(
    domains: &[Pattern],
    columns_per_domain: usize,
    values_per_column: usize,
    seed: u64,
) -> Result<Vec<Column>, SynthError> {
    for d in domains {
        check_samplable(d)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(domains.len() * columns_per_domain);
    for (i, d) in domains.iter().enumerate() {
        for j in 0..columns_per_domain {
            out.push(Column { id: format!("d{i}/c{j}"), values: sample_column(d, values_per_column, &mut rng) });
        }
    }
    Ok(out)
}
