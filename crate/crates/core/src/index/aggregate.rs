//! Corpus-level aggregates: coverage and summed impurity per pattern.
//!
//! Impurities are summed as fixed-point integers so that merging partial maps
//! is exactly associative and commutative; any partition of the corpus across
//! workers yields the same bits.

use std::collections::HashMap;

use super::scan::{ColumnImpurities, Impurity};

/// Fixed-point scale for impurity sums: `2^60 * 3^4 * 5^4 * 7^2 * 11 * 13`.
/// Divisible by every column size from 1 to 16 and by 10^k for k <= 4, so
/// impurities of such columns are represented without rounding.
pub const IMPURITY_SCALE: u128 = (1u128 << 60) * 81 * 625 * 49 * 11 * 13;

/// Sum of impurities in units of `1 / IMPURITY_SCALE`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ImpuritySum(pub u128);

impl ImpuritySum {
    /// `num / den` rounded half up to the fixed-point grid.
    pub fn from_fraction(num: u64, den: u64) -> Self {
        assert!(den > 0 && num <= den, "impurity fraction out of range");
        let (num, den) = (num as u128, den as u128);
        let q = IMPURITY_SCALE / den;
        let r = IMPURITY_SCALE % den;
        ImpuritySum(num * q + (num * r + den / 2) / den)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / IMPURITY_SCALE as f64
    }
}

impl std::ops::Add for ImpuritySum {
    type Output = ImpuritySum;

    fn add(self, rhs: Self) -> Self {
        ImpuritySum(self.0 + rhs.0)
    }
}

impl From<Impurity> for ImpuritySum {
    fn from(i: Impurity) -> Self {
        ImpuritySum::from_fraction(i.nonmatching, i.total)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PatternAggregate {
    /// Columns in which the pattern matched at least one value.
    pub cov: u64,
    pub imp_sum: ImpuritySum,
}

impl PatternAggregate {
    /// Mean impurity over covering columns. The fraction is reduced before
    /// dividing, so equal ratios always give the same float.
    pub fn fpr(&self) -> f64 {
        if self.cov == 0 || self.imp_sum.0 == 0 {
            return 0.0;
        }
        let g = gcd(self.imp_sum.0, IMPURITY_SCALE);
        let (num, scale) = (self.imp_sum.0 / g, IMPURITY_SCALE / g);
        let g = gcd(num, self.cov as u128);
        let (num, cov) = (num / g, self.cov as u128 / g);
        match scale.checked_mul(cov) {
            Some(den) => num as f64 / den as f64,
            None => (num as f64 / scale as f64) / cov as f64,
        }
    }

    pub fn combine(self, other: Self) -> Self {
        PatternAggregate { cov: self.cov + other.cov, imp_sum: self.imp_sum + other.imp_sum }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub type AggregateMap = HashMap<String, PatternAggregate>;

/// Adds one column's impurities to `map`.
pub fn accumulate(map: &mut AggregateMap, column: &ColumnImpurities) {
    for (key, imp) in &column.entries {
        let add = PatternAggregate { cov: 1, imp_sum: (*imp).into() };
        match map.get_mut(key.as_str()) {
            Some(agg) => *agg = agg.combine(add),
            None => {
                map.insert(key.clone(), add);
            }
        }
    }
}

/// Pointwise sum of two partial maps.
pub fn merge(a: AggregateMap, b: AggregateMap) -> AggregateMap {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (key, agg) in small {
        big.entry(key).and_modify(|x| *x = x.combine(agg)).or_insert(agg);
    }
    big
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agg(cov: u64, num: u64, den: u64) -> PatternAggregate {
        PatternAggregate { cov, imp_sum: ImpuritySum::from_fraction(num, den) }
    }

    #[test]
    fn scale_is_exact_for_common_sizes() {
        for den in (1..=16).chain([100, 1000, 10_000]) {
            assert_eq!(IMPURITY_SCALE % den, 0, "{den}");
        }
    }

    #[test]
    fn merge_adds_componentwise() {
        let a = AggregateMap::from([("p".to_string(), agg(2, 1, 2))]);
        let b = AggregateMap::from([("p".to_string(), agg(3, 1, 10))]);
        let m = merge(a.clone(), b);
        assert_eq!(m["p"].cov, 5);
        assert_eq!(m["p"].imp_sum, ImpuritySum::from_fraction(6, 10));
        assert_eq!(merge(AggregateMap::new(), a.clone()), a);
    }

    #[test]
    fn fpr_is_mean_impurity() {
        // 200 columns at 1% and 4800 pure ones
        let mut total = PatternAggregate::default();
        for i in 0..5000 {
            let a = if i < 200 { agg(1, 1, 100) } else { agg(1, 0, 100) };
            total = total.combine(a);
        }
        assert_eq!(total.cov, 5000);
        assert!((total.fpr() - 0.0004).abs() < 1e-15);
    }

    #[test]
    fn equal_ratios_give_identical_floats() {
        let a = agg(1, 1, 3);
        let b = agg(2, 2, 3);
        assert_eq!(a.fpr().to_bits(), b.combine(agg(1, 1, 3)).fpr().to_bits());
        assert_eq!(a.fpr(), 1.0 / 3.0);
        assert_eq!(agg(3, 1, 1).fpr(), 1.0 / 3.0);
        assert_eq!(agg(5, 1, 4).fpr(), 0.05);
    }

    #[test]
    fn rounding_for_awkward_sizes() {
        let s = ImpuritySum::from_fraction(1, 17);
        assert!((s.as_f64() - 1.0 / 17.0).abs() < 1e-20);
        assert_eq!(ImpuritySum::from_fraction(17, 17).0, IMPURITY_SCALE);
    }
}
