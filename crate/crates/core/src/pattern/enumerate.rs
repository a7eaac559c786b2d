//! Pattern spaces of a value and of a column.
//!
//! Both are cross products of per-position class options. When a product is
//! larger than the caller's cap it is truncated by whole depth levels: every
//! pattern whose summed generalization depth is at most `L` is kept, for the
//! largest `L` that stays within the cap.

use thiserror::Error;

use super::class::TokenClass;
use super::hierarchy::Hierarchy;
use super::pattern::Pattern;
use super::token::{tokenize_with, Token, TokenizeError};

/// Default per-value enumeration cap.
pub const DEFAULT_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("column has no values")]
    EmptyColumn,
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
}

/// A set of patterns, sorted and deduplicated, plus whether a cap cut it short.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternSet {
    pub patterns: Vec<Pattern>,
    pub truncated: bool,
}

impl PatternSet {
    pub(crate) fn from_unsorted(mut patterns: Vec<Pattern>, truncated: bool) -> Self {
        patterns.sort();
        patterns.dedup();
        PatternSet { patterns, truncated }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn contains(&self, pattern: &Pattern) -> bool {
        self.patterns.binary_search(pattern).is_ok()
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.patterns.iter().any(|p| p.key() == key)
    }

    pub fn keys(&self) -> Vec<String> {
        self.patterns.iter().map(Pattern::key).collect()
    }
}

/// Depth cutoff produced by [`Product::depth_limit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct DepthLimit {
    pub max_depth: u32,
    pub truncated: bool,
}

impl DepthLimit {
    pub const UNLIMITED: DepthLimit = DepthLimit { max_depth: u32::MAX, truncated: false };
}

/// Per-position class options with their depths.
#[derive(Debug, Clone)]
pub(crate) struct Product {
    pub options: Vec<Vec<(TokenClass, u32)>>,
}

impl Product {
    pub fn of_tokens(tokens: &[Token<'_>], hierarchy: &Hierarchy) -> Self {
        Product { options: tokens.iter().map(|t| hierarchy.generalizations_with_depth(t)).collect() }
    }

    /// Number of combinations at each total depth, saturating.
    fn level_counts(&self) -> Vec<u128> {
        let mut counts = vec![1u128];
        for opts in &self.options {
            let max = opts.iter().map(|(_, d)| *d as usize).max().unwrap_or(0);
            let mut next = vec![0u128; counts.len() + max];
            for (level, &n) in counts.iter().enumerate() {
                if n == 0 {
                    continue;
                }
                for (_, d) in opts {
                    let slot = &mut next[level + *d as usize];
                    *slot = slot.saturating_add(n);
                }
            }
            counts = next;
        }
        counts
    }

    /// `None` when not even the shallowest level fits under `cap`.
    pub fn depth_limit(&self, cap: u64) -> Option<DepthLimit> {
        let counts = self.level_counts();
        let total = counts.iter().fold(0u128, |a, &b| a.saturating_add(b));
        if total <= cap as u128 {
            return Some(DepthLimit::UNLIMITED);
        }
        let mut cumulative = 0u128;
        let mut limit = None;
        for (level, &n) in counts.iter().enumerate() {
            cumulative = cumulative.saturating_add(n);
            if cumulative > cap as u128 {
                break;
            }
            if n > 0 {
                limit = Some(level as u32);
            }
        }
        limit.map(|max_depth| DepthLimit { max_depth, truncated: true })
    }

    /// Visits every combination with total depth `<= max_depth`.
    pub fn for_each(&self, max_depth: u32, mut f: impl FnMut(&[TokenClass])) {
        if self.options.iter().any(Vec::is_empty) {
            return;
        }
        let n = self.options.len();
        let mut suffix_min = vec![0u32; n + 1];
        for i in (0..n).rev() {
            let min = self.options[i].iter().map(|(_, d)| *d).min().unwrap_or(0);
            suffix_min[i] = suffix_min[i + 1] + min;
        }
        let mut current = Vec::with_capacity(n);
        self.visit(0, 0, max_depth, &suffix_min, &mut current, &mut f);
    }

    fn visit(
        &self,
        pos: usize,
        depth: u32,
        max_depth: u32,
        suffix_min: &[u32],
        current: &mut Vec<TokenClass>,
        f: &mut impl FnMut(&[TokenClass]),
    ) {
        if pos == self.options.len() {
            f(current);
            return;
        }
        for (class, d) in &self.options[pos] {
            let next = depth + d;
            if next.saturating_add(suffix_min[pos + 1]) > max_depth {
                continue;
            }
            current.push(class.clone());
            self.visit(pos + 1, next, max_depth, suffix_min, current, f);
            current.pop();
        }
    }

    fn collect(&self, cap: u64, skip_trivial: bool) -> PatternSet {
        let Some(limit) = self.depth_limit(cap) else {
            return PatternSet { patterns: Vec::new(), truncated: true };
        };
        let mut out = Vec::new();
        self.for_each(limit.max_depth, |classes| {
            if !(skip_trivial && classes.iter().all(|c| *c == TokenClass::Any)) {
                out.push(Pattern::new(classes.to_vec()));
            }
        });
        PatternSet::from_unsorted(out, limit.truncated)
    }
}

/// `P(v)`: every pattern consistent with `value`.
pub fn enumerate_value_patterns(value: &str, hierarchy: &Hierarchy, cap: u64) -> Result<PatternSet, TokenizeError> {
    let tokens = tokenize_with(value, hierarchy.tokenizer_options())?;
    Ok(Product::of_tokens(&tokens, hierarchy).collect(cap, false))
}

/// Per-position intersection of generalization sets over a column, or `None`
/// when values differ in width or some value does not tokenize.
pub(crate) fn intersect_column<S: AsRef<str>>(column: &[S], hierarchy: &Hierarchy) -> Option<Product> {
    let opts = hierarchy.tokenizer_options();
    let (first, rest) = column.split_first()?;
    let first = tokenize_with(first.as_ref(), opts).ok()?;
    let mut product = Product::of_tokens(&first, hierarchy);
    for value in rest {
        let tokens = tokenize_with(value.as_ref(), opts).ok()?;
        if tokens.len() != first.len() {
            return None;
        }
        for (options, token) in product.options.iter_mut().zip(&tokens) {
            options.retain(|(c, _)| c.matches(token));
        }
    }
    Some(product)
}

/// `H(C)`: patterns consistent with every value of the column, minus the
/// trivial all-`<any>` pattern.
pub fn hypothesis_space<S: AsRef<str>>(column: &[S], hierarchy: &Hierarchy, cap: u64) -> Result<PatternSet, PatternError> {
    if column.is_empty() {
        return Err(PatternError::EmptyColumn);
    }
    Ok(match intersect_column(column, hierarchy) {
        Some(product) => product.collect(cap, true),
        None => PatternSet::default(),
    })
}
