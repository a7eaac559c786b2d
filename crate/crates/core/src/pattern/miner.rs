//! Depth-first enumeration of the patterns shared by a set of equal-width
//! token rows, together with the weight of the rows each pattern matches.
//!
//! Each emitted pattern is visited once, however many rows produce it, so the
//! cost is proportional to the union of the rows' pattern spaces rather than
//! to their sum.

use std::collections::HashMap;

use super::class::TokenClass;
use super::hierarchy::Hierarchy;
use super::token::Token;

pub(crate) struct Row<'a> {
    pub tokens: Vec<Token<'a>>,
    pub weight: u64,
    /// Patterns deeper than this are outside the row's (capped) pattern space.
    pub max_depth: u32,
}

pub(crate) struct Miner<'h, F> {
    hierarchy: &'h Hierarchy,
    min_support: u64,
    allow: F,
}

impl<'h, F> Miner<'h, F>
where
    F: Fn(usize, &TokenClass, &Token<'_>) -> bool,
{
    pub fn new(hierarchy: &'h Hierarchy, min_support: u64, allow: F) -> Self {
        Miner { hierarchy, min_support: min_support.max(1), allow }
    }

    /// Emits `(pattern, support)` for every pattern that matches rows of total
    /// weight `>= min_support` and lies within at least one matching row's
    /// depth limit. All rows must have the same width.
    pub fn run(&self, rows: &[Row<'_>], emit: &mut dyn FnMut(&[TokenClass], u64)) {
        let Some(width) = rows.first().map(|r| r.tokens.len()) else {
            return;
        };
        debug_assert!(rows.iter().all(|r| r.tokens.len() == width));
        let gens: Vec<Vec<Vec<(TokenClass, u32)>>> = rows
            .iter()
            .map(|r| r.tokens.iter().map(|t| self.hierarchy.generalizations_with_depth(t)).collect())
            .collect();
        let all: Vec<u32> = (0..rows.len() as u32).collect();
        let mut current = Vec::with_capacity(width);
        self.visit(rows, &gens, &all, 0, &mut current, emit);
    }

    fn visit(
        &self,
        rows: &[Row<'_>],
        gens: &[Vec<Vec<(TokenClass, u32)>>],
        subset: &[u32],
        depth: u32,
        current: &mut Vec<TokenClass>,
        emit: &mut dyn FnMut(&[TokenClass], u64),
    ) {
        let pos = current.len();
        let mut candidates: HashMap<&TokenClass, (u32, Vec<u32>)> = HashMap::new();
        for &row in subset {
            let token = &rows[row as usize].tokens[pos];
            for (class, d) in &gens[row as usize][pos] {
                if (self.allow)(pos, class, token) {
                    candidates.entry(class).or_insert_with(|| (*d, Vec::new())).1.push(row);
                }
            }
        }
        let last = pos + 1 == gens[subset[0] as usize].len();
        for (class, (d, members)) in candidates {
            let support: u64 = members.iter().map(|&r| rows[r as usize].weight).sum();
            if support < self.min_support {
                continue;
            }
            let next = depth + d;
            let reachable = members.iter().map(|&r| rows[r as usize].max_depth).max().unwrap_or(0);
            if next > reachable {
                continue;
            }
            current.push(class.clone());
            if last {
                emit(current, support);
            } else {
                self.visit(rows, gens, &members, next, current, emit);
            }
            current.pop();
        }
    }
}
