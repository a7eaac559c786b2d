//! Brute-force reference implementations used by the integration and
//! acceptance tests. They share only data types with the library: tokenizing,
//! class matching, pattern spaces, impurity sums and the solver's argmin are
//! all recomputed here from their definitions.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use colpat::pattern::{Pattern, TokenClass};

/// lcm(1..=20): every impurity of a column with at most 20 values is an
/// integer multiple of 1/L.
pub const L: u128 = 232_792_560;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Letters,
    Digits,
    Other,
}

fn kind(c: char) -> Kind {
    if c.is_ascii_alphabetic() {
        Kind::Letters
    } else if c.is_ascii_digit() {
        Kind::Digits
    } else {
        Kind::Other
    }
}

pub fn runs(value: &str) -> Vec<(String, Kind)> {
    let mut out: Vec<(String, Kind)> = Vec::new();
    for c in value.chars() {
        let k = kind(c);
        match out.last_mut() {
            Some((s, last)) if *last == k => s.push(c),
            _ => out.push((c.to_string(), k)),
        }
    }
    out
}

pub fn class_accepts(class: &TokenClass, text: &str, k: Kind) -> bool {
    let n = text.chars().count();
    match class {
        TokenClass::Const(s) => s == text,
        TokenClass::DigitFixed(len) => k == Kind::Digits && n == *len,
        TokenClass::DigitPlus | TokenClass::Num => k == Kind::Digits,
        TokenClass::LetterFixed(len) => k == Kind::Letters && n == *len,
        TokenClass::LetterPlus => k == Kind::Letters,
        TokenClass::AlnumFixed(len) => k != Kind::Other && n == *len,
        TokenClass::AlnumPlus => k != Kind::Other,
        TokenClass::Any => true,
    }
}

pub fn matches(p: &Pattern, value: &str) -> bool {
    let r = runs(value);
    !r.is_empty() && r.len() == p.len() && p.tokens().iter().zip(&r).all(|(c, (t, k))| class_accepts(c, t, *k))
}

/// Every class that accepts the run, from a universe of all classes with
/// lengths up to 40.
pub fn accepting_classes(text: &str, k: Kind) -> Vec<TokenClass> {
    let mut universe = vec![
        TokenClass::Const(text.to_owned()),
        TokenClass::DigitPlus,
        TokenClass::Num,
        TokenClass::LetterPlus,
        TokenClass::AlnumPlus,
        TokenClass::Any,
    ];
    for len in 1..=40 {
        universe.extend([TokenClass::DigitFixed(len), TokenClass::LetterFixed(len), TokenClass::AlnumFixed(len)]);
    }
    universe.into_iter().filter(|c| class_accepts(c, text, k)).collect()
}

fn cross(options: &[Vec<TokenClass>]) -> Vec<Pattern> {
    let mut acc: Vec<Vec<TokenClass>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for prefix in &acc {
            for c in opts {
                let mut p = prefix.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        acc = next;
    }
    acc.into_iter().map(Pattern::new).collect()
}

/// Every pattern consistent with `value`.
pub fn value_patterns(value: &str) -> Vec<Pattern> {
    let r = runs(value);
    if r.is_empty() {
        return Vec::new();
    }
    cross(&r.iter().map(|(t, k)| accepting_classes(t, *k)).collect::<Vec<_>>())
}

/// Patterns consistent with every value, minus the all-`<any>` pattern.
pub fn hypothesis(column: &[&str]) -> BTreeSet<Pattern> {
    let Some(first) = column.first() else { return BTreeSet::new() };
    value_patterns(first)
        .into_iter()
        .filter(|p| !p.tokens().iter().all(|c| *c == TokenClass::Any))
        .filter(|p| column.iter().all(|v| matches(p, v)))
        .collect()
}

/// Depths of the default hierarchy.
pub fn depth(p: &Pattern) -> u32 {
    p.tokens()
        .iter()
        .map(|c| match c {
            TokenClass::Const(_) => 0,
            TokenClass::DigitFixed(_) | TokenClass::LetterFixed(_) => 1,
            TokenClass::DigitPlus | TokenClass::LetterPlus | TokenClass::AlnumFixed(_) => 2,
            TokenClass::Num => 3,
            TokenClass::AlnumPlus => 4,
            TokenClass::Any => 5,
        })
        .sum()
}

/// Coverage and impurity sum (in units of 1/L) per pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Agg {
    pub cov: u64,
    pub imp: u128,
}

impl Agg {
    /// The mean impurity as a reduced fraction.
    pub fn fpr_fraction(&self) -> (u128, u128) {
        let (n, d) = (self.imp, L * self.cov as u128);
        let g = gcd(n, d);
        (n / g, d / g)
    }

    pub fn fpr(&self) -> f64 {
        let (n, d) = self.fpr_fraction();
        n as f64 / d as f64
    }
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Eq. (1) and the corpus average, by a double loop over columns and the
/// patterns of their narrow values.
pub fn index(columns: &[Vec<String>], tau: usize) -> BTreeMap<Pattern, Agg> {
    let mut out: BTreeMap<Pattern, Agg> = BTreeMap::new();
    for col in columns {
        assert!(!col.is_empty() && col.len() <= 20);
        let mut seen = BTreeSet::new();
        for v in col {
            let r = runs(v);
            if !r.is_empty() && r.len() < tau {
                seen.extend(value_patterns(v));
            }
        }
        for p in seen {
            let bad = col.iter().filter(|v| !matches(&p, v)).count() as u128;
            let a = out.entry(p).or_default();
            a.cov += 1;
            a.imp += bad * (L / col.len() as u128);
        }
    }
    out
}

/// The FMDV argmin: lowest FPR, then lowest depth, then highest coverage,
/// then key order.
pub fn fmdv(query: &[&str], index: &BTreeMap<Pattern, Agg>, r: f64, m: u64) -> Option<(Pattern, Agg)> {
    let mut best: Option<(Pattern, Agg)> = None;
    for h in hypothesis(query) {
        let Some(agg) = index.get(&h) else { continue };
        if agg.fpr() > r || agg.cov < m {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bp, ba)) => {
                let (n1, d1) = agg.fpr_fraction();
                let (n2, d2) = ba.fpr_fraction();
                (n1 * d2)
                    .cmp(&(n2 * d1))
                    .then(depth(&h).cmp(&depth(bp)))
                    .then(ba.cov.cmp(&agg.cov))
                    .then(h.key().cmp(&bp.key()))
                    == Ordering::Less
            }
        };
        if better {
            best = Some((h, *agg));
        }
    }
    best
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Two-tailed Fisher p-value by enumerating every table with the observed
/// margins in exact integer arithmetic. A table counts when its probability
/// is at most the observed one times (1 + 1e-7).
pub fn fisher(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let weight = |x: u64| binomial(r1, x) * binomial(r2, c1 - x);
    let observed = weight(a);
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let mut num: u128 = 0;
    for x in lo..=hi {
        let w = weight(x);
        if w * 10_000_000 <= observed * 10_000_001 {
            num += w;
        }
    }
    let total = binomial(r1 + r2, c1);
    num as f64 / total as f64
}

/// Two-tailed Fisher p-value for tables too large for exact integers: the
/// hypergeometric weights are built by the ratio recurrence
/// `w(x+1) / w(x) = (r1-x)(c1-x) / ((x+1)(r2-c1+x+1))`, in log space.
pub fn fisher_large(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let mut logw = vec![0.0f64];
    for x in lo..hi {
        let ratio = ((r1 - x) * (c1 - x)) as f64 / ((x + 1) * (r2 + x + 1 - c1)) as f64;
        logw.push(logw.last().unwrap() + ratio.ln());
    }
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let observed = w[(a - lo) as usize];
    let total: f64 = w.iter().sum();
    w.iter().filter(|&&x| x <= observed * (1.0 + 1e-7)).sum::<f64>() / total
}
