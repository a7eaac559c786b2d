//! Validation rules: a chosen pattern plus what is needed to test later
//! snapshots against the training column.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::{Hierarchy, Pattern, PatternParseError, TokenizerOptions};
use crate::solver::{Objective, SolverParams, Suggestion};

/// Version of the pattern grammar written into rule records.
pub const GRAMMAR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    #[default]
    FisherExact,
    ChiSquaredYates,
}

impl std::str::FromStr for TestKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fisher-exact" | "fisher" => Ok(TestKind::FisherExact),
            "chi-squared-yates" | "chi-squared" => Ok(TestKind::ChiSquaredYates),
            other => Err(format!("unknown test `{other}` (expected fisher-exact or chi-squared-yates)")),
        }
    }
}

impl std::fmt::Display for TestKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TestKind::FisherExact => "fisher-exact",
            TestKind::ChiSquaredYates => "chi-squared-yates",
        })
    }
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("malformed rule record: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rule pattern: {0}")]
    Pattern(#[from] PatternParseError),
    #[error("rule uses grammar version {0}, this build understands {GRAMMAR_VERSION}")]
    GrammarVersion(u32),
    #[error("invalid rule: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleParams {
    pub r: f64,
    pub m: u64,
    pub theta: f64,
    pub objective: Objective,
    pub tau: u32,
    pub cap: u64,
}

/// Serialized form; the pattern is kept as text until the tokenizer options
/// are known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RuleRecord {
    id: String,
    grammar_version: u32,
    pattern: String,
    fpr: f64,
    cov: u64,
    theta_train: f64,
    train_size: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    train_nonconforming: Option<u64>,
    alpha: f64,
    test: TestKind,
    params: RuleParams,
    hierarchy_fingerprint: String,
    #[serde(default)]
    merge_decimals: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRule {
    pub id: String,
    pub pattern: Pattern,
    pub fpr: f64,
    pub cov: u64,
    pub theta_train: f64,
    pub train_size: u64,
    /// Exact training count when known; otherwise derived from `theta_train`.
    pub train_nonconforming: Option<u64>,
    pub alpha: f64,
    pub test: TestKind,
    pub params: RuleParams,
    pub hierarchy_fingerprint: String,
    pub tokenizer: TokenizerOptions,
}

pub const DEFAULT_ALPHA: f64 = 0.01;

impl ValidationRule {
    pub fn from_suggestion(
        id: impl Into<String>,
        suggestion: &Suggestion,
        solver: &SolverParams,
        tau: u32,
        hierarchy: &Hierarchy,
        alpha: f64,
        test: TestKind,
    ) -> Self {
        ValidationRule {
            id: id.into(),
            pattern: suggestion.pattern.clone(),
            fpr: suggestion.fpr,
            cov: suggestion.cov,
            theta_train: suggestion.train_nonconform_ratio,
            train_size: suggestion.train_size,
            train_nonconforming: Some(suggestion.train_nonconforming),
            alpha,
            test,
            params: RuleParams {
                r: solver.r,
                m: solver.m,
                theta: solver.theta,
                objective: solver.objective,
                tau,
                cap: solver.cap,
            },
            hierarchy_fingerprint: hierarchy.fingerprint_hex(),
            tokenizer: hierarchy.tokenizer_options(),
        }
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        let bad = |m: &str| Err(RuleError::Invalid(m.into()));
        if !(0.0..=1.0).contains(&self.theta_train) {
            return bad("theta_train must be in [0, 1]");
        }
        if self.train_size < 1 {
            return bad("train_size must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must be in (0, 1)");
        }
        if self.train_nonconforming.is_some_and(|k| k > self.train_size) {
            return bad("train_nonconforming exceeds train_size");
        }
        Ok(())
    }

    /// Training non-conforming count: the stored exact count, or the ratio
    /// times the size rounded to the nearest integer.
    pub fn train_counts(&self) -> (u64, u64) {
        let k = self
            .train_nonconforming
            .unwrap_or_else(|| (self.theta_train * self.train_size as f64).round() as u64)
            .min(self.train_size);
        (k, self.train_size)
    }

    pub fn to_json(&self) -> String {
        let record = RuleRecord {
            id: self.id.clone(),
            grammar_version: GRAMMAR_VERSION,
            pattern: self.pattern.key(),
            fpr: self.fpr,
            cov: self.cov,
            theta_train: self.theta_train,
            train_size: self.train_size,
            train_nonconforming: self.train_nonconforming,
            alpha: self.alpha,
            test: self.test,
            params: self.params,
            hierarchy_fingerprint: self.hierarchy_fingerprint.clone(),
            merge_decimals: self.tokenizer.merge_decimals,
        };
        serde_json::to_string(&record).expect("rule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, RuleError> {
        let record: RuleRecord = serde_json::from_str(text)?;
        if record.grammar_version != GRAMMAR_VERSION {
            return Err(RuleError::GrammarVersion(record.grammar_version));
        }
        let tokenizer = TokenizerOptions { merge_decimals: record.merge_decimals };
        let rule = ValidationRule {
            id: record.id,
            pattern: Pattern::parse_with(&record.pattern, tokenizer)?,
            fpr: record.fpr,
            cov: record.cov,
            theta_train: record.theta_train,
            train_size: record.train_size,
            train_nonconforming: record.train_nonconforming,
            alpha: record.alpha,
            test: record.test,
            params: record.params,
            hierarchy_fingerprint: record.hierarchy_fingerprint,
            tokenizer,
        };
        rule.validate()?;
        Ok(rule)
    }
}
