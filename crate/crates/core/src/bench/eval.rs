//! Precision and recall of rule learners on a column benchmark.
//!
//! Each column is split into a 10% training prefix and a 90% test suffix. A
//! learner sees only the training prefix. Its rule has perfect precision on a
//! case when it raises no alarm on the test suffix; its recall is the share
//! of the other cases' columns it flags. A rule with a false alarm gets
//! recall 0.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::drift::validate;
use crate::index::{Column, CorpusIndex};
use crate::pattern::{Hierarchy, Pattern, TokenizerOptions};
use crate::rule::{TestKind, ValidationRule, DEFAULT_ALPHA};
use crate::solver::{solve_fmdv, solve_fmdv_h, SolverParams};

/// Columns shorter than this are left out of a benchmark.
pub const MIN_CASE_VALUES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkCase {
    pub column_id: String,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl BenchmarkCase {
    pub fn all_values(&self) -> impl Iterator<Item = &String> {
        self.train.iter().chain(&self.test)
    }
}

/// Splits columns into cases. `value_cap` keeps only the first values of
/// each column. Returns the cases and the ids of columns that were too short.
pub fn make_benchmark(columns: &[Column], value_cap: Option<usize>) -> (Vec<BenchmarkCase>, Vec<String>) {
    let mut cases = Vec::new();
    let mut excluded = Vec::new();
    for col in columns {
        let n = value_cap.map_or(col.values.len(), |cap| col.values.len().min(cap));
        if n < MIN_CASE_VALUES {
            log::warn!("excluding {} from the benchmark: {n} values", col.id);
            excluded.push(col.id.clone());
            continue;
        }
        let split = n / 10;
        cases.push(BenchmarkCase {
            column_id: col.id.clone(),
            train: col.values[..split].to_vec(),
            test: col.values[split..n].to_vec(),
        });
    }
    (cases, excluded)
}

/// A learned rule, judged per column.
pub trait Rule: Send {
    /// `true` when the rule raises an alarm on this column.
    fn column_fails(&self, values: &[String]) -> bool;
}

pub trait Learner: Sync {
    fn name(&self) -> &str;
    fn learn(&self, case: &BenchmarkCase) -> Option<Box<dyn Rule>>;
}

/// Alarms on any value that does not match the pattern.
pub struct PatternRule {
    pub pattern: Pattern,
    pub tokenizer: TokenizerOptions,
}

impl Rule for PatternRule {
    fn column_fails(&self, values: &[String]) -> bool {
        values.iter().any(|v| !self.pattern.matches_with(v, self.tokenizer))
    }
}

/// Alarms when the non-conforming fraction drifts significantly.
pub struct DriftRule(pub ValidationRule);

impl Rule for DriftRule {
    fn column_fails(&self, values: &[String]) -> bool {
        !values.is_empty() && validate(&self.0, values).is_ok_and(|v| v.drift_detected)
    }
}

/// Learns patterns with the corpus index. In tolerant mode the rule checks
/// drift of the non-conforming fraction instead of single values.
pub struct FmdvLearner<'a> {
    pub index: &'a CorpusIndex,
    pub hierarchy: &'a Hierarchy,
    pub params: SolverParams,
    pub tolerant: bool,
}

impl Learner for FmdvLearner<'_> {
    fn name(&self) -> &str {
        if self.tolerant {
            "fmdv-h"
        } else {
            "fmdv"
        }
    }

    fn learn(&self, case: &BenchmarkCase) -> Option<Box<dyn Rule>> {
        let tokenizer = self.hierarchy.tokenizer_options();
        if !self.tolerant {
            let s = solve_fmdv(&case.train, self.index, self.hierarchy, &self.params).ok()??;
            return Some(Box::new(PatternRule { pattern: s.pattern, tokenizer }));
        }
        let s = solve_fmdv_h(&case.train, self.index, self.hierarchy, &self.params).ok()??;
        let rule = ValidationRule::from_suggestion(
            case.column_id.clone(),
            &s,
            &self.params,
            self.index.params.tau,
            self.hierarchy,
            DEFAULT_ALPHA,
            TestKind::FisherExact,
        );
        Some(Box::new(DriftRule(rule)))
    }
}

/// Accepts exactly the distinct training values.
pub struct DictionaryLearner;

struct DictionaryRule(HashSet<String>);

impl Rule for DictionaryRule {
    fn column_fails(&self, values: &[String]) -> bool {
        values.iter().any(|v| !self.0.contains(v))
    }
}

/// The rule the dictionary baseline learns from `train`.
pub fn dictionary_baseline(train: &[String]) -> Box<dyn Rule> {
    Box::new(DictionaryRule(train.iter().cloned().collect()))
}

impl Learner for DictionaryLearner {
    fn name(&self) -> &str {
        "dictionary"
    }

    fn learn(&self, case: &BenchmarkCase) -> Option<Box<dyn Rule>> {
        Some(dictionary_baseline(&case.train))
    }
}

/// Returns the known ground-truth pattern of each case.
pub struct OracleLearner {
    pub patterns: HashMap<String, Pattern>,
}

impl Learner for OracleLearner {
    fn name(&self) -> &str {
        "oracle"
    }

    fn learn(&self, case: &BenchmarkCase) -> Option<Box<dyn Rule>> {
        let pattern = self.patterns.get(&case.column_id)?.clone();
        Some(Box::new(PatternRule { pattern, tokenizer: TokenizerOptions::default() }))
    }
}

/// Never alarms.
pub struct AcceptAllLearner;

struct AcceptAll;

impl Rule for AcceptAll {
    fn column_fails(&self, _: &[String]) -> bool {
        false
    }
}

impl Learner for AcceptAllLearner {
    fn name(&self) -> &str {
        "accept-all"
    }

    fn learn(&self, _: &BenchmarkCase) -> Option<Box<dyn Rule>> {
        Some(Box::new(AcceptAll))
    }
}

/// Ground-truth labels: cases with the same label are the same domain and
/// are not counted when measuring each other's recall.
pub type Labels = HashMap<String, String>;

/// Reads `column_id<TAB>label` lines; blank lines and `#` comments are skipped.
pub fn read_labels(path: &Path) -> std::io::Result<Labels> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = Labels::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, label) = line.split_once('\t').ok_or_else(|| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("label line {} has no tab", i + 1))
        })?;
        labels.insert(id.to_owned(), label.to_owned());
    }
    Ok(labels)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub column_id: String,
    pub has_rule: bool,
    pub precision: Option<bool>,
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub learner: String,
    pub cases: Vec<CaseResult>,
    pub evaluated: usize,
    pub no_rule: usize,
    pub precision: f64,
    pub recall: f64,
}

pub fn evaluate(learner: &dyn Learner, cases: &[BenchmarkCase], labels: Option<&Labels>) -> EvalReport {
    let full: Vec<Vec<String>> = cases.iter().map(|c| c.all_values().cloned().collect()).collect();
    let results: Vec<CaseResult> = cases
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let Some(rule) = learner.learn(case) else {
                return CaseResult { column_id: case.column_id.clone(), has_rule: false, precision: None, recall: None };
            };
            let precise = !rule.column_fails(&case.test);
            let label = labels.and_then(|l| l.get(&case.column_id));
            let mut flagged = 0usize;
            let mut others = 0usize;
            for (j, other) in cases.iter().enumerate() {
                if j == i || (label.is_some() && labels.and_then(|l| l.get(&other.column_id)) == label) {
                    continue;
                }
                others += 1;
                if rule.column_fails(&full[j]) {
                    flagged += 1;
                }
            }
            let recall = if !precise || others == 0 { 0.0 } else { flagged as f64 / others as f64 };
            CaseResult {
                column_id: case.column_id.clone(),
                has_rule: true,
                precision: Some(precise),
                recall: Some(recall),
            }
        })
        .collect();

    let evaluated: Vec<&CaseResult> = results.iter().filter(|r| r.has_rule).collect();
    let n = evaluated.len();
    let mean = |xs: Vec<f64>| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
    EvalReport {
        learner: learner.name().to_owned(),
        evaluated: n,
        no_rule: results.len() - n,
        precision: mean(evaluated.iter().map(|r| f64::from(u8::from(r.precision == Some(true)))).collect()),
        recall: mean(evaluated.iter().filter_map(|r| r.recall).collect()),
        cases: results,
    }
}
