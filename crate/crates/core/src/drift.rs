//! Checking a new column snapshot against a stored rule.
//!
//! The fraction of values not matching the rule's pattern is compared with
//! the training fraction by a two-sample test on the 2x2 table of
//! (non-conforming, conforming) counts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rule::{TestKind, ValidationRule};
use crate::stats::{chi_squared_yates, fisher_exact_two_tailed};

/// Minimum margin for the chi-squared approximation to be used.
const CHI_SQUARED_MIN_MARGIN: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increase,
    Decrease,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationVerdict {
    pub rule_id: String,
    pub theta_test: f64,
    pub test_size: u64,
    pub test_nonconforming: u64,
    pub p_value: f64,
    pub drift_detected: bool,
    pub direction: Direction,
    /// The test actually applied.
    pub test: TestKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DriftError {
    #[error("column to validate has no values")]
    EmptyColumn,
}

/// Runs the rule's test on explicit counts.
pub fn compare_counts(
    train: (u64, u64),
    test: (u64, u64),
    kind: TestKind,
) -> (f64, TestKind) {
    let (a, n1) = train;
    let (c, n2) = test;
    let (b, d) = (n1 - a, n2 - c);
    if kind == TestKind::ChiSquaredYates && [a + b, c + d, a + c, b + d].iter().all(|&m| m >= CHI_SQUARED_MIN_MARGIN) {
        if let Ok(p) = chi_squared_yates(a, b, c, d) {
            return (p, TestKind::ChiSquaredYates);
        }
    }
    (fisher_exact_two_tailed(a, b, c, d), TestKind::FisherExact)
}

pub fn validate<S: AsRef<str>>(rule: &ValidationRule, column: &[S]) -> Result<ValidationVerdict, DriftError> {
    if column.is_empty() {
        return Err(DriftError::EmptyColumn);
    }
    let n2 = column.len() as u64;
    let matching = column.iter().filter(|v| rule.pattern.matches_with(v.as_ref(), rule.tokenizer)).count() as u64;
    let k2 = n2 - matching;
    let (k1, n1) = rule.train_counts();
    let (p_value, test) = compare_counts((k1, n1), (k2, n2), rule.test);
    let drift_detected = p_value < rule.alpha;
    // compare k2/n2 with k1/n1 without rounding
    let direction = match (k2 as u128 * n1 as u128).cmp(&(k1 as u128 * n2 as u128)) {
        _ if !drift_detected => Direction::None,
        std::cmp::Ordering::Greater => Direction::Increase,
        std::cmp::Ordering::Less => Direction::Decrease,
        std::cmp::Ordering::Equal => Direction::None,
    };
    Ok(ValidationVerdict {
        rule_id: rule.id.clone(),
        theta_test: k2 as f64 / n2 as f64,
        test_size: n2,
        test_nonconforming: k2,
        p_value,
        drift_detected,
        direction,
        test,
    })
}
