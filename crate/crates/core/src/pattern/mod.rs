//! Tokenization, the generalization hierarchy, pattern spaces and matching.

mod class;
mod enumerate;
mod hierarchy;
pub(crate) mod miner;
#[allow(clippy::module_inception)]
mod pattern;
mod profile;
mod token;

pub use class::TokenClass;
pub use enumerate::{enumerate_value_patterns, hypothesis_space, PatternError, PatternSet, DEFAULT_CAP};
pub(crate) use enumerate::{intersect_column, Product};
pub use hierarchy::{Hierarchy, HierarchyError, Node};
pub use pattern::{Pattern, PatternParseError};
pub use profile::{coarse_patterns, generate_column_patterns, PROFILE_COVERAGE};
pub use token::{token_count, tokenize, tokenize_with, Shape, Token, TokenKind, TokenizeError, TokenizerOptions};

/// `true` iff `value` tokenizes to the same width as `pattern` and every
/// token is accepted by the class at its position.
pub fn pattern_matches(pattern: &Pattern, value: &str) -> bool {
    pattern.matches(value)
}
