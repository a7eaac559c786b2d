//! Column profiling: patterns that cover a given fraction of a column.
//!
//! The first phase keeps only coarse classes (`<digit>+`, `<num>`,
//! `<letter>+`, `<alphanum>+`, literal symbols) and retains those coarse
//! patterns matching enough values. The second phase drills down from every
//! maximal retained coarse pattern to the fixed-length classes and constants
//! below it, keeping specializations that still have enough support.

use std::collections::{BTreeMap, HashMap};

use super::class::TokenClass;
use super::enumerate::PatternSet;
use super::hierarchy::{Hierarchy, Node};
use super::miner::{Miner, Row};
use super::pattern::Pattern;
use super::token::{tokenize_with, Shape, Token};

/// Coverage fraction suggested for interactive profiling.
pub const PROFILE_COVERAGE: f64 = 0.9;

/// Whether `class` is one of the coarse classes emitted for `token`.
pub(crate) fn is_coarse(class: &TokenClass, token: &Token<'_>) -> bool {
    match token.shape() {
        Shape::Digits | Shape::Decimal => {
            matches!(class, TokenClass::DigitPlus | TokenClass::Num | TokenClass::AlnumPlus)
        }
        Shape::Letters => matches!(class, TokenClass::LetterPlus | TokenClass::AlnumPlus),
        Shape::Symbols => class.is_const(),
    }
}

/// `class` lies at or below `coarse` for this token.
fn specializes(class: &TokenClass, coarse: &TokenClass, hierarchy: &Hierarchy) -> bool {
    match (Node::of_class(class), Node::of_class(coarse)) {
        (None, None) => class == coarse,
        (None, Some(_)) => match class {
            TokenClass::Const(text) => tokenize_with(text, hierarchy.tokenizer_options())
                .is_ok_and(|t| t.len() == 1 && coarse.matches(&t[0])),
            _ => false,
        },
        (Some(_), None) => false,
        (Some(c), Some(q)) => c == q || hierarchy.is_ancestor_or_self(c, q),
    }
}

struct Rows<'a> {
    by_width: BTreeMap<usize, Vec<Row<'a>>>,
    threshold: u64,
}

fn rows_of<'a, S: AsRef<str>>(column: &'a [S], hierarchy: &Hierarchy, coverage: f64) -> Rows<'a> {
    let opts = hierarchy.tokenizer_options();
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for v in column {
        *counts.entry(v.as_ref()).or_default() += 1;
    }
    let mut distinct: Vec<(&str, u64)> = counts.into_iter().collect();
    distinct.sort_unstable();
    let mut by_width: BTreeMap<usize, Vec<Row>> = BTreeMap::new();
    for (value, weight) in distinct {
        if let Ok(tokens) = tokenize_with(value, opts) {
            by_width.entry(tokens.len()).or_default().push(Row { tokens, weight, max_depth: u32::MAX });
        }
    }
    let needed = (coverage.clamp(0.0, 1.0) * column.len() as f64 - 1e-9).ceil();
    Rows { by_width, threshold: (needed as u64).max(1) }
}

fn coarse_by_width(rows: &[Row<'_>], hierarchy: &Hierarchy, threshold: u64) -> Vec<Pattern> {
    let mut out = Vec::new();
    Miner::new(hierarchy, threshold, |_, c, t| is_coarse(c, t)).run(rows, &mut |p, _| {
        out.push(Pattern::new(p.to_vec()));
    });
    out
}

/// Phase one only: coarse patterns matching at least `coverage` of the column.
pub fn coarse_patterns<S: AsRef<str>>(column: &[S], hierarchy: &Hierarchy, coverage: f64) -> PatternSet {
    let rows = rows_of(column, hierarchy, coverage);
    let mut out = Vec::new();
    for group in rows.by_width.values() {
        out.extend(coarse_by_width(group, hierarchy, rows.threshold));
    }
    PatternSet::from_unsorted(out, false)
}

/// Both phases: every non-trivial pattern that specializes a retained coarse
/// pattern (or replaces positions with `<any>`) and matches at least
/// `coverage` of the column.
pub fn generate_column_patterns<S: AsRef<str>>(column: &[S], hierarchy: &Hierarchy, coverage: f64) -> PatternSet {
    let rows = rows_of(column, hierarchy, coverage);
    let mut out = Vec::new();
    for group in rows.by_width.values() {
        let coarse = coarse_by_width(group, hierarchy, rows.threshold);
        let maximal: Vec<&Pattern> = coarse
            .iter()
            .filter(|q| {
                !coarse.iter().any(|o| {
                    o != *q && q.tokens().iter().zip(o.tokens()).all(|(a, b)| specializes(a, b, hierarchy))
                })
            })
            .collect();
        for q in maximal {
            let allow = |pos: usize, c: &TokenClass, t: &Token<'_>| {
                let coarse = &q.tokens()[pos];
                *c == TokenClass::Any || (coarse.matches(t) && specializes(c, coarse, hierarchy))
            };
            Miner::new(hierarchy, rows.threshold, allow).run(group, &mut |p, _| {
                if !p.iter().all(|c| *c == TokenClass::Any) {
                    out.push(Pattern::new(p.to_vec()));
                }
            });
        }
    }
    PatternSet::from_unsorted(out, false)
}
