//! Two-sample tests on 2x2 contingency tables.
//!
//! Tables are laid out as
//!
//! ```text
//!            non-conforming  conforming
//! sample 1         a              b
//! sample 2         c              d
//! ```

use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("table has a zero margin; the chi-squared test is undefined")]
    ZeroMargin,
}

/// Relative slack when comparing table probabilities to the observed one.
const POINT_SLACK: f64 = 1e-7;

/// Two-tailed Fisher exact test: total probability of all tables with the
/// observed margins that are no more likely than the observed table.
pub fn fisher_exact_two_tailed(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let row1 = a + b;
    let row2 = c + d;
    let col1 = a + c;
    let n = row1 + row2;
    if n == 0 {
        return 1.0;
    }
    let ln_total = ln_binomial(n, col1);
    let ln_p = |x: u64| ln_binomial(row1, x) + ln_binomial(row2, col1 - x) - ln_total;
    let lo = col1.saturating_sub(row2);
    let hi = row1.min(col1);
    let observed = ln_p(a);
    let cutoff = observed + POINT_SLACK.ln_1p();

    // sum from the smallest terms upward for accuracy
    let mut terms: Vec<f64> = (lo..=hi).map(ln_p).filter(|&lp| lp <= cutoff).collect();
    terms.sort_unstable_by(f64::total_cmp);
    let p: f64 = terms.iter().map(|lp| lp.exp()).sum();
    p.clamp(0.0, 1.0)
}

/// Pearson chi-squared statistic with Yates' continuity correction.
pub fn chi_squared_yates_statistic(a: u64, b: u64, c: u64, d: u64) -> Result<f64, StatsError> {
    let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
    let margins = [a + b, c + d, a + c, b + d];
    if margins.iter().any(|&m| m == 0.0) {
        return Err(StatsError::ZeroMargin);
    }
    let n = a + b + c + d;
    let diff = ((a * d - b * c).abs() - n / 2.0).max(0.0);
    Ok(n * diff * diff / margins.iter().product::<f64>())
}

/// p-value of the corrected chi-squared test with one degree of freedom.
pub fn chi_squared_yates(a: u64, b: u64, c: u64, d: u64) -> Result<f64, StatsError> {
    let stat = chi_squared_yates_statistic(a, b, c, d)?;
    Ok(erfc((stat / 2.0).sqrt()).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_tables() {
        assert_eq!(fisher_exact_two_tailed(0, 5, 0, 7), 1.0);
        assert_eq!(fisher_exact_two_tailed(0, 0, 0, 1), 1.0);
        assert_eq!(chi_squared_yates(0, 5, 0, 7), Err(StatsError::ZeroMargin));
    }

    #[test]
    fn small_table_against_hand_enumeration() {
        // margins (4,4,4,4): probabilities 1,16,36,16,1 over 70
        let p = fisher_exact_two_tailed(3, 1, 1, 3);
        assert!((p - 34.0 / 70.0).abs() < 1e-12, "{p}");
        assert!((fisher_exact_two_tailed(4, 0, 0, 4) - 2.0 / 70.0).abs() < 1e-12);
    }

    #[test]
    fn equal_proportions() {
        assert_eq!(chi_squared_yates_statistic(10, 90, 10, 90), Ok(0.0));
        assert_eq!(chi_squared_yates(10, 90, 10, 90), Ok(1.0));
        assert!((fisher_exact_two_tailed(10, 90, 10, 90) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn drift_table_rejects() {
        assert!(fisher_exact_two_tailed(1, 999, 50, 950) < 0.01);
        assert!(chi_squared_yates(1, 999, 50, 950).unwrap() < 0.01);
        assert!(fisher_exact_two_tailed(1, 999, 11, 9989) > 0.01);
    }
}
