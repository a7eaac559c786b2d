//! Choosing a validation pattern for a query column.
//!
//! Candidates are the patterns consistent with the column. Each is looked up
//! in the corpus index; a candidate is feasible when its estimated FPR is at
//! most `r` and it covers at least `m` corpus columns. Patterns missing from
//! the index have no coverage and are never feasible.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::CorpusIndex;
use crate::pattern::{intersect_column, tokenize_with, Hierarchy, Pattern, Shape, TokenClass, DEFAULT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Lowest estimated false-positive rate.
    #[default]
    FprMin,
    /// Lowest corpus coverage, i.e. the narrowest feasible domain.
    CoverageMin,
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fpr-min" => Ok(Objective::FprMin),
            "coverage-min" => Ok(Objective::CoverageMin),
            other => Err(format!("unknown objective `{other}` (expected fpr-min or coverage-min)")),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::FprMin => "fpr-min",
            Objective::CoverageMin => "coverage-min",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub r: f64,
    pub m: u64,
    pub theta: f64,
    pub objective: Objective,
    /// Cap on the number of candidate patterns enumerated per column.
    pub cap: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams { r: 0.02, m: 100, theta: 0.05, objective: Objective::FprMin, cap: DEFAULT_CAP }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(0.0..=1.0).contains(&self.r) {
            return Err(SolveError::InvalidParams(format!("r must be in [0, 1], got {}", self.r)));
        }
        if self.m < 1 {
            return Err(SolveError::InvalidParams("m must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.theta) {
            return Err(SolveError::InvalidParams(format!("theta must be in [0, 1), got {}", self.theta)));
        }
        if self.cap < 1 {
            return Err(SolveError::InvalidParams("cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error("query column has no values")]
    EmptyColumn,
    #[error("index was built with a different hierarchy")]
    HierarchyMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suggestion {
    pub pattern: Pattern,
    pub fpr: f64,
    pub cov: u64,
    /// Values of the query column the pattern does not match.
    pub train_nonconforming: u64,
    pub train_size: u64,
    pub train_nonconform_ratio: f64,
    /// The candidate space was cut short by the enumeration cap.
    pub truncated: bool,
}

struct Best {
    classes: Vec<TokenClass>,
    key: String,
    fpr: f64,
    cov: u64,
    depth: u32,
}

/// Ranking of two feasible candidates; `Less` means `a` is preferred.
///
/// FPR-min: lowest FPR, then the most specific pattern (lowest summed depth),
/// then highest coverage, then key order. Coverage-min: lowest coverage, then
/// the same chain.
fn rank(objective: Objective, a: (f64, u64, u32, &str), b: (f64, u64, u32, &str)) -> Ordering {
    let by_fpr = a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)).then(b.1.cmp(&a.1)).then(a.3.cmp(b.3));
    match objective {
        Objective::FprMin => by_fpr,
        Objective::CoverageMin => a.1.cmp(&b.1).then(by_fpr),
    }
}

fn check_index(index: &CorpusIndex, hierarchy: &Hierarchy) -> Result<(), SolveError> {
    if index.params.fingerprint != hierarchy.fingerprint() {
        return Err(SolveError::HierarchyMismatch);
    }
    Ok(())
}

fn solve_with<S: AsRef<str>>(
    column: &[S],
    index: &CorpusIndex,
    hierarchy: &Hierarchy,
    params: &SolverParams,
    objective: Objective,
) -> Option<(Pattern, f64, u64, bool)> {
    let product = intersect_column(column, hierarchy)?;
    if product.options.len() >= index.params.tau as usize {
        // nothing this wide was indexed
        return None;
    }
    let limit = product.depth_limit(params.cap)?;
    let mut best: Option<Best> = None;
    let mut key = String::new();
    product.for_each(limit.max_depth, |classes| {
        if classes.iter().all(|c| *c == TokenClass::Any) {
            return;
        }
        key.clear();
        use std::fmt::Write;
        let _ = write!(key, "{}", Pattern::new(classes.to_vec()));
        let Some(entry) = index.lookup_key(&key) else { return };
        if entry.fpr > params.r || entry.cov < params.m {
            return;
        }
        let depth: u32 = classes.iter().map(|c| hierarchy.depth_of(c)).sum();
        let better = match &best {
            None => true,
            Some(b) => {
                rank(objective, (entry.fpr, entry.cov, depth, &key), (b.fpr, b.cov, b.depth, &b.key)) == Ordering::Less
            }
        };
        if better {
            best = Some(Best { classes: classes.to_vec(), key: key.clone(), fpr: entry.fpr, cov: entry.cov, depth });
        }
    });
    best.map(|b| (Pattern::new(b.classes), b.fpr, b.cov, limit.truncated))
}

fn suggest<S: AsRef<str>>(
    column: &[S],
    index: &CorpusIndex,
    hierarchy: &Hierarchy,
    params: &SolverParams,
    objective: Objective,
) -> Result<Option<Suggestion>, SolveError> {
    params.validate()?;
    check_index(index, hierarchy)?;
    if column.is_empty() {
        return Err(SolveError::EmptyColumn);
    }
    let n = column.len() as u64;
    Ok(solve_with(column, index, hierarchy, params, objective).map(|(pattern, fpr, cov, truncated)| {
        debug_assert!(fpr <= params.r && cov >= params.m);
        Suggestion {
            pattern,
            fpr,
            cov,
            train_nonconforming: 0,
            train_size: n,
            train_nonconform_ratio: 0.0,
            truncated,
        }
    }))
}

/// The feasible pattern consistent with every value that has the lowest
/// estimated FPR.
pub fn solve_fmdv<S: AsRef<str>>(
    column: &[S],
    index: &CorpusIndex,
    hierarchy: &Hierarchy,
    params: &SolverParams,
) -> Result<Option<Suggestion>, SolveError> {
    suggest(column, index, hierarchy, params, params.objective)
}

/// The feasible pattern consistent with every value that has the lowest
/// corpus coverage.
pub fn solve_cmdv<S: AsRef<str>>(
    column: &[S],
    index: &CorpusIndex,
    hierarchy: &Hierarchy,
    params: &SolverParams,
) -> Result<Option<Suggestion>, SolveError> {
    suggest(column, index, hierarchy, params, Objective::CoverageMin)
}

/// Coarse shape of a value: digit runs become `<num>`, letter runs
/// `<letter>+`, symbols stay literal. Empty or untokenizable values get `None`.
pub fn coarse_shape(value: &str, hierarchy: &Hierarchy) -> Option<String> {
    let tokens = tokenize_with(value, hierarchy.tokenizer_options()).ok()?;
    let classes = tokens
        .iter()
        .map(|t| match t.shape() {
            Shape::Digits | Shape::Decimal => TokenClass::Num,
            Shape::Letters => TokenClass::LetterPlus,
            Shape::Symbols => TokenClass::Const(t.text.to_owned()),
        })
        .collect();
    Some(Pattern::new(classes).key())
}

/// Tolerant variant: keeps the largest group of values sharing a coarse
/// shape, provided it holds at least `(1 - theta)` of the column, and solves
/// on that group. The returned pattern is checked against the whole column.
pub fn solve_fmdv_h<S: AsRef<str>>(
    column: &[S],
    index: &CorpusIndex,
    hierarchy: &Hierarchy,
    params: &SolverParams,
) -> Result<Option<Suggestion>, SolveError> {
    params.validate()?;
    check_index(index, hierarchy)?;
    if params.theta <= 0.0 {
        return Err(SolveError::InvalidParams("theta must be positive for the tolerant solver".into()));
    }
    if column.is_empty() {
        return Err(SolveError::EmptyColumn);
    }
    let n = column.len() as u64;
    let required = ((1.0 - params.theta) * n as f64 - 1e-9).ceil().max(0.0) as u64;

    let mut groups: BTreeMap<Option<String>, Vec<&str>> = BTreeMap::new();
    for v in column {
        groups.entry(coarse_shape(v.as_ref(), hierarchy)).or_default().push(v.as_ref());
    }
    // largest group; ties go to the first shape in key order
    let mut plurality: Option<(&Option<String>, &Vec<&str>)> = None;
    for (shape, values) in &groups {
        if shape.is_some() && plurality.is_none_or(|(_, best)| values.len() > best.len()) {
            plurality = Some((shape, values));
        }
    }
    let Some((_, kept)) = plurality else { return Ok(None) };
    if (kept.len() as u64) < required {
        return Ok(None);
    }
    let Some((pattern, fpr, cov, truncated)) = solve_with(kept, index, hierarchy, params, params.objective) else {
        return Ok(None);
    };
    let opts = hierarchy.tokenizer_options();
    let matching = column.iter().filter(|v| pattern.matches_with(v.as_ref(), opts)).count() as u64;
    if matching < required {
        return Ok(None);
    }
    let nonconforming = n - matching;
    Ok(Some(Suggestion {
        pattern,
        fpr,
        cov,
        train_nonconforming: nonconforming,
        train_size: n,
        train_nonconform_ratio: nonconforming as f64 / n as f64,
        truncated,
    }))
}
