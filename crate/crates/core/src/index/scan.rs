//! Per-column impurity of every pattern the column's values produce.

use std::collections::HashMap;

use crate::pattern::{tokenize_with, Hierarchy, Pattern, Product, TokenizerOptions};
use crate::pattern::miner::{Miner, Row};

/// Default token limit: values with this many tokens or more are not
/// enumerated.
pub const DEFAULT_TAU: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub tau: usize,
    pub cap: u64,
    /// Count each distinct value once.
    pub dedup_values: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { tau: DEFAULT_TAU, cap: crate::pattern::DEFAULT_CAP, dedup_values: false }
    }
}

/// Non-matching values out of all values of the column, kept as integers so
/// aggregation stays exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Impurity {
    pub nonmatching: u64,
    pub total: u64,
}

impl Impurity {
    pub fn ratio(self) -> f64 {
        self.nonmatching as f64 / self.total as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnImpurities {
    pub column_id: String,
    pub entries: HashMap<String, Impurity>,
}

impl ColumnImpurities {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<Impurity> {
        self.entries.get(key).copied()
    }
}

/// Impurity of one pattern on a column, computed directly.
pub fn column_impurity<S: AsRef<str>>(pattern: &Pattern, values: &[S], opts: TokenizerOptions) -> Impurity {
    let matching = values.iter().filter(|v| pattern.matches_with(v.as_ref(), opts)).count() as u64;
    Impurity { nonmatching: values.len() as u64 - matching, total: values.len() as u64 }
}

/// Enumerates patterns from the values narrower than `tau` and scores each
/// against all values, including wide and empty ones.
pub fn scan_column<S: AsRef<str>>(
    column_id: &str,
    values: &[S],
    hierarchy: &Hierarchy,
    opts: &ScanOptions,
) -> ColumnImpurities {
    let mut out = ColumnImpurities { column_id: column_id.to_owned(), entries: HashMap::new() };
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for v in values {
        *counts.entry(v.as_ref()).or_default() += 1;
    }
    let total = if opts.dedup_values { counts.len() as u64 } else { values.len() as u64 };
    let tok_opts = hierarchy.tokenizer_options();

    let mut distinct: Vec<(&str, u64)> = counts.into_iter().collect();
    distinct.sort_unstable();
    let mut by_width: HashMap<usize, Vec<Row>> = HashMap::new();
    for (value, n) in distinct {
        let Ok(tokens) = tokenize_with(value, tok_opts) else { continue };
        if tokens.len() >= opts.tau {
            continue;
        }
        let Some(limit) = Product::of_tokens(&tokens, hierarchy).depth_limit(opts.cap) else {
            continue;
        };
        let weight = if opts.dedup_values { 1 } else { n };
        by_width.entry(tokens.len()).or_default().push(Row { tokens, weight, max_depth: limit.max_depth });
    }

    for rows in by_width.values() {
        Miner::new(hierarchy, 1, |_, _, _| true).run(rows, &mut |classes, support| {
            let key = Pattern::new(classes.to_vec()).key();
            out.entries.insert(key, Impurity { nonmatching: total - support, total });
        });
    }
    out
}
