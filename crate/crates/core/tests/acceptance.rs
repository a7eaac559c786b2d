//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) and exits non-zero when any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use colpat::bench::{
    generate_synthetic_corpus, planted_domains, recovery_simulation, run_planted, sample_column, RecoveryConfig,
    PlantedConfig,
};
use colpat::index::{
    build_index, build_index_from_columns, column_impurity, scan_column, BuildOptions, Column, CorpusIndex, Impurity,
    ScanOptions,
};
use colpat::pattern::{enumerate_value_patterns, tokenize, Hierarchy, Pattern, DEFAULT_CAP};
use colpat::solver::{solve_fmdv, solve_fmdv_h, SolverParams};
use colpat::stats::{chi_squared_yates, fisher_exact_two_tailed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn p(s: &str) -> Pattern {
    s.parse().expect("valid pattern")
}

/// The impure date-time column: four single-digit-hour AM values, six
/// two-digit-hour AM values and two PM values.
const DATETIMES: [&str; 12] = [
    "9/12/2019 1:01:32 AM",
    "9/12/2019 3:15:00 AM",
    "9/12/2019 7:45:10 AM",
    "9/12/2019 9:59:59 AM",
    "9/12/2019 10:02:20 AM",
    "9/12/2019 10:30:00 AM",
    "9/12/2019 11:00:01 AM",
    "9/12/2019 11:11:11 AM",
    "9/12/2019 11:20:45 AM",
    "9/12/2019 11:59:00 AM",
    "9/12/2019 12:01:32 PM",
    "9/12/2019 12:30:00 PM",
];

fn worked_examples() -> Outcome {
    let h = Hierarchy::default();
    let opts = h.tokenizer_options();
    let cases = [
        ("<digit>+/<digit>{2}/<digit>{4} <digit>+:<digit>{2}:<digit>{2} AM", 2),
        ("<digit>/<digit>{2}/<digit>{4} <digit>:<digit>{2}:<digit>{2} <letter>{2}", 8),
        ("<digit>+/<digit>{2}/<digit>{4} <digit>+:<digit>{2}:<digit>{2} <letter>+", 0),
    ];
    // 13-token values, so the token limit must exceed 13 for them to be scanned
    let scan = scan_column("D", &DATETIMES, &h, &ScanOptions { tau: 14, ..ScanOptions::default() });
    let mut detail = Vec::new();
    for (key, bad) in cases {
        let expected = Impurity { nonmatching: bad, total: 12 };
        let direct = column_impurity(&p(key), &DATETIMES, opts);
        ensure!(direct == expected, "Imp({key}) = {direct:?}, expected {bad}/12");
        if let Some(scanned) = scan.get(key) {
            ensure!(scanned == expected, "scanned Imp({key}) = {scanned:?}, expected {bad}/12");
        }
        detail.push(format!("{bad}/12"));
    }

    // 4800 pure columns and 200 with one stray value in 100
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let columns: Vec<Column> = (0..5000)
        .map(|i| {
            let mut values: Vec<String> = (0..100)
                .map(|_| format!("{}:{:02}", rng.random_range(1..=12), 15 * rng.random_range(0..4)))
                .collect();
            if i < 200 {
                values[37] = "-".into();
            }
            Column { id: i.to_string(), values }
        })
        .collect();
    let (index, _) = build_index_from_columns(&columns, &h, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let entry = index.lookup(&p("<digit>+:<digit>{2}")).ok_or("pattern missing from index")?;
    ensure!(entry.cov == 5000, "cov = {}", entry.cov);
    ensure!((entry.fpr - 0.0004).abs() <= 1e-12, "FPR = {}", entry.fpr);
    Ok(format!("Imp = {}; FPR = {} over cov {}", detail.join(", "), entry.fpr, entry.cov))
}

/// Size of P(v) by an independent cross product over all accepting classes.
fn oracle_pattern_count(value: &str) -> usize {
    common::runs(value).iter().map(|(t, k)| common::accepting_classes(t, *k).len()).product()
}

fn pattern_space() -> Outcome {
    let h = Hierarchy::default();
    let nine = &tokenize("9").map_err(|e| e.to_string())?[0];
    let gens = h.generalizations(nine);
    ensure!(gens.len() == 7, "digit has {} generalizations", gens.len());
    let set = enumerate_value_patterns("9:07", &h, DEFAULT_CAP).map_err(|e| e.to_string())?;
    for key in ["<digit>:<digit>{2}", "<digit>+:<digit>{2}", "<digit>:<digit>+", "<num>:<digit>+", "9:<digit>{2}"] {
        ensure!(set.contains_key(key), "P(9:07) lacks {key}");
    }
    const PINNED: usize = 98;
    let oracle = oracle_pattern_count("9:07");
    ensure!(oracle == PINNED, "oracle count {oracle} != pinned {PINNED}");
    for _ in 0..3 {
        let again = enumerate_value_patterns("9:07", &h, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure!(again.len() == PINNED && again == set, "|P(9:07)| = {}", again.len());
    }
    Ok(format!("7 generalizations of \"9\"; |P(\"9:07\")| = {PINNED}"))
}

fn recovery() -> Outcome {
    let start = Instant::now();
    let config = RecoveryConfig { corpus_columns: 20, trials: 200, seed: 1000, ..RecoveryConfig::default() };
    let report = recovery_simulation(&config, &Hierarchy::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(report.rate() >= 0.99, "recovered {}/{}", report.recovered, report.trials);
    ensure!(elapsed <= Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!(
        "recovered {}/{} of {} (bound {:.6}) in {:.1?}",
        report.recovered, report.trials, report.ground_truth, report.bound, elapsed
    ))
}

const POOL: [&str; 8] = [
    "<digit>+:<digit>{2}",
    "<digit>{2}:<digit>{2}",
    "<digit>:<digit>{2}",
    "<letter>{2}-<digit>+",
    "<letter>+",
    "<digit>+",
    "<letter>{3}",
    "<alphanum>{2}",
];
const JUNK: [&str; 5] = ["N/A", "-", "", "null", "1-2-3-4-5"];

fn oracle_equivalence() -> Outcome {
    let h = Hierarchy::default();
    let domains: Vec<Pattern> = POOL.iter().map(|s| p(s)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut found = 0;
    for corpus_no in 0..50 {
        let n_cols = rng.random_range(1..=30);
        let mut columns = Vec::new();
        for _ in 0..n_cols {
            let n_vals = rng.random_range(1..=15);
            let first = &domains[rng.random_range(0..domains.len())];
            let second = &domains[rng.random_range(0..domains.len())];
            let mixed = rng.random_bool(0.3);
            let values: Vec<String> = (0..n_vals)
                .map(|_| {
                    if rng.random_bool(0.1) {
                        JUNK[rng.random_range(0..JUNK.len())].to_string()
                    } else if mixed && rng.random_bool(0.5) {
                        sample_column(second, 1, &mut rng).remove(0)
                    } else {
                        sample_column(first, 1, &mut rng).remove(0)
                    }
                })
                .collect();
            columns.push(values);
        }
        let reference = common::index(&columns, 8);
        if reference.is_empty() {
            continue;
        }
        let cols: Vec<Column> =
            columns.iter().enumerate().map(|(i, v)| Column { id: i.to_string(), values: v.clone() }).collect();
        let (index, _) = build_index_from_columns(&cols, &h, &BuildOptions::default()).map_err(|e| e.to_string())?;
        ensure!(index.len() == reference.len(), "corpus {corpus_no}: {} vs {} patterns", index.len(), reference.len());
        for (pat, agg) in &reference {
            let e = index.lookup(pat).ok_or_else(|| format!("corpus {corpus_no}: missing {pat}"))?;
            ensure!(
                e.cov == agg.cov && e.fpr.to_bits() == agg.fpr().to_bits(),
                "corpus {corpus_no}: {pat} = ({}, {}) vs ({}, {})",
                e.fpr,
                e.cov,
                agg.fpr(),
                agg.cov
            );
        }

        for _ in 0..4 {
            let domain = &domains[rng.random_range(0..domains.len())];
            let query = sample_column(domain, rng.random_range(2..=6), &mut rng);
            let qrefs: Vec<&str> = query.iter().map(String::as_str).collect();
            let r = [0.0, 0.1, 0.3, 1.0][rng.random_range(0..4)];
            let m = rng.random_range(1..=3);
            let params = SolverParams { r, m, ..SolverParams::default() };
            let got = solve_fmdv(&query, &index, &h, &params).map_err(|e| e.to_string())?;
            let want = common::fmdv(&qrefs, &reference, r, m);
            let got_key = got.as_ref().map(|s| (s.pattern.key(), s.cov, s.fpr.to_bits()));
            let want_key = want.as_ref().map(|(p, a)| (p.key(), a.cov, a.fpr().to_bits()));
            ensure!(got_key == want_key, "corpus {corpus_no}, query {query:?}, r={r}, m={m}: {got_key:?} vs {want_key:?}");
            found += usize::from(got.is_some());
        }
    }
    Ok(format!("50 corpora, 200 queries identical to brute force ({found} with a rule)"))
}

fn tolerance() -> Outcome {
    let h = Hierarchy::default();
    let domain = p("<digit>{3}-<digit>{4}");
    let domains = [domain.clone(), p("<letter>{2}-<digit>{4}"), p("<digit>{3}.<digit>{4}"), p("<digit>+:<digit>{2}")];
    let corpus = generate_synthetic_corpus(&domains, 150, 20, 9).map_err(|e| e.to_string())?;
    let (index, _) = build_index_from_columns(&corpus, &h, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let params = SolverParams { r: 0.02, m: 100, theta: 0.05, ..SolverParams::default() };
    let junk = ["N/A", "null", "-", "?"];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut detail = Vec::new();
    for (f, expect_rule) in [(0usize, true), (1, true), (4, true), (10, false)] {
        let mut column = sample_column(&domain, 100 - f, &mut rng);
        for i in 0..f {
            let at = rng.random_range(0..=column.len());
            column.insert(at, junk[i % junk.len()].to_string());
        }
        let s = solve_fmdv_h(&column, &index, &h, &params).map_err(|e| e.to_string())?;
        match (s, expect_rule) {
            (Some(s), true) => {
                let matching = column.iter().filter(|v| s.pattern.matches(v)).count();
                ensure!(matching as f64 >= 0.95 * 100.0, "f={f}%: pattern matches only {matching}");
                ensure!(s.train_nonconforming == f as u64, "f={f}%: theta_C count {}", s.train_nonconforming);
                ensure!(s.pattern == domain, "f={f}%: got {}", s.pattern);
                detail.push(format!("f={}: theta_C={}", f as f64 / 100.0, s.train_nonconform_ratio));
            }
            (None, false) => detail.push(format!("f={}: no rule", f as f64 / 100.0)),
            (got, _) => return Err(format!("f={f}%: unexpected result {got:?}")),
        }
    }
    Ok(detail.join("; "))
}

fn statistical_tests() -> Outcome {
    let mut tables = 0u64;
    let mut worst = 0.0f64;
    for n in 1..=60u64 {
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    let d = n - a - b - c;
                    let got = fisher_exact_two_tailed(a, b, c, d);
                    let want = common::fisher(a, b, c, d);
                    let err = (got - want).abs();
                    worst = worst.max(err);
                    ensure!(err <= 1e-10, "table ({a},{b},{c},{d}): {got} vs {want}");
                    tables += 1;
                }
            }
        }
    }
    let drift = fisher_exact_two_tailed(1, 999, 50, 950);
    ensure!(drift < 0.01, "(1,999,50,950) p = {drift}");
    let chi = chi_squared_yates(1, 999, 50, 950).map_err(|e| e.to_string())?;
    ensure!(chi < 0.01, "chi-squared p = {chi}");
    let mild = fisher_exact_two_tailed(1, 999, 11, 9989);
    ensure!(mild >= 0.01, "(1,999,11,9989) p = {mild}");
    Ok(format!("{tables} tables, max error {worst:.1e}; drift p={drift:.2e}; 0.1% vs 0.11% p={mild:.3}"))
}

fn benchmark() -> Outcome {
    let h = Hierarchy::default();
    let domains = planted_domains();
    // expected from the design: domains are pairwise disjoint, so every
    // cross-domain column is flagged by the true pattern
    let probe = generate_synthetic_corpus(&domains, 1, 30, 77).map_err(|e| e.to_string())?;
    let mut disjoint = true;
    for (i, d) in domains.iter().enumerate() {
        for (j, c) in probe.iter().enumerate() {
            if i != j && c.values.iter().any(|v| d.matches(v)) {
                disjoint = false;
            }
        }
    }
    ensure!(disjoint, "planted domains overlap");
    let expected_recall = 1.0;

    let reports = run_planted(&PlantedConfig::default(), &h).map_err(|e| e.to_string())?;
    let (f, d, o) = (&reports.fmdv, &reports.dictionary, &reports.oracle);
    ensure!(o.precision == 1.0 && o.recall == expected_recall, "oracle P={} R={}", o.precision, o.recall);
    ensure!(f.no_rule == 0, "FMDV produced no rule for {} cases", f.no_rule);
    ensure!(f.precision == 1.0 && f.recall == expected_recall, "FMDV P={} R={}", f.precision, f.recall);
    ensure!(d.precision < 0.5, "dictionary P={}", d.precision);
    Ok(format!(
        "FMDV P={} R={}; dictionary P={} R={}; oracle P={} R={}",
        f.precision, f.recall, d.precision, d.recall, o.precision, o.recall
    ))
}

/// Reference-data style columns: each domain has a small shared vocabulary.
fn write_large_corpus(dir: &Path, target_bytes: u64) -> std::io::Result<u64> {
    let templates = [
        "<letter>{2}-<digit>{3}",
        "<digit>{2}:<digit>{2}",
        "<digit>{4}/<digit>{2}",
        "<letter>+_<letter>+",
        "<digit>+.<digit>{2}",
        "<letter>{3}<digit>{2}",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let vocab: Vec<Vec<String>> = templates.iter().map(|t| sample_column(&p(t), 15, &mut rng)).collect();
    let mut written = 0u64;
    let mut file_no = 0;
    while written < target_bytes {
        let d = file_no % templates.len();
        let mut out = std::io::BufWriter::new(fs::File::create(dir.join(format!("col{file_no:05}.txt")))?);
        let mut bytes = 0u64;
        while bytes < 400_000 {
            let v = &vocab[d][rng.random_range(0..vocab[d].len())];
            writeln!(out, "{v}")?;
            bytes += v.len() as u64 + 1;
        }
        out.flush()?;
        written += bytes;
        file_no += 1;
    }
    Ok(written)
}

fn performance() -> Outcome {
    let h = Hierarchy::default();
    // online: an index with at least 1e5 patterns
    let domains: Vec<Pattern> = [
        "<letter>{2}-<digit>{3}",
        "<digit>+:<digit>{2}",
        "<digit>{4}/<digit>{2}/<digit>{2}",
        "<letter>+_<digit>+",
        "<digit>+.<digit>{2}",
        "<letter>{3} <digit>{2}",
        "<alphanum>{4}-<letter>{2}",
        "<digit>{3}-<digit>{4}",
    ]
    .iter()
    .map(|s| p(s))
    .collect();
    let corpus = generate_synthetic_corpus(&domains, 200, 30, 3).map_err(|e| e.to_string())?;
    let (index, _) = build_index_from_columns(&corpus, &h, &BuildOptions::default()).map_err(|e| e.to_string())?;
    ensure!(index.len() >= 100_000, "index has only {} patterns", index.len());
    let params = SolverParams { m: 50, ..SolverParams::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut slowest = Duration::ZERO;
    for d in &domains {
        let query = sample_column(d, 1000, &mut rng);
        let start = Instant::now();
        let s = solve_fmdv(&query, &index, &h, &params).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        ensure!(s.is_some(), "no rule for {d}");
    }
    ensure!(slowest < Duration::from_millis(100), "slowest suggest took {slowest:?}");

    // offline: 100 MB on disk, four workers
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus_bytes = write_large_corpus(dir.path(), 100 * 1024 * 1024).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let opts = BuildOptions { workers: 4, ..BuildOptions::default() };
    let (big, stats) = build_index(dir.path(), &h, &opts).map_err(|e| e.to_string())?;
    let build_time = start.elapsed();
    let index_bytes = big.to_bytes().len() as u64;
    ensure!(build_time < Duration::from_secs(600), "indexing took {build_time:?}");
    ensure!(index_bytes * 100 < corpus_bytes, "index {index_bytes} B for corpus {corpus_bytes} B");
    Ok(format!(
        "suggest <= {slowest:.1?} on {} patterns; indexed {} MB ({} columns) in {build_time:.1?}, index {} KB ({:.3}%)",
        index.len(),
        corpus_bytes / (1024 * 1024),
        stats.columns,
        index_bytes / 1024,
        100.0 * index_bytes as f64 / corpus_bytes as f64
    ))
}

fn determinism() -> Outcome {
    let h = Hierarchy::default();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let domains: Vec<Pattern> =
        ["<digit>+:<digit>{2}", "<letter>{2}-<digit>+", "<digit>{3}", "<letter>+ <letter>+"].iter().map(|s| p(s)).collect();
    let corpus = generate_synthetic_corpus(&domains, 15, 25, 21).map_err(|e| e.to_string())?;
    for (i, col) in corpus.iter().enumerate() {
        fs::write(dir.path().join(format!("c{i:03}.txt")), col.values.join("\n")).map_err(|e| e.to_string())?;
    }
    fs::write(dir.path().join("table.csv"), "a,b\n1:00,x\n2:30,y\n,z\n").map_err(|e| e.to_string())?;
    let build = |workers| build_index(dir.path(), &h, &BuildOptions { workers, ..BuildOptions::default() });
    let reference = build(1).map_err(|e| e.to_string())?.0;
    let bytes = reference.to_bytes();
    for k in [2, 4, 8] {
        let other = build(k).map_err(|e| e.to_string())?.0;
        ensure!(other.to_bytes() == bytes, "{k} workers gave a different index");
    }
    let path = dir.path().join("index.plix");
    reference.save(&path).map_err(|e| e.to_string())?;
    let loaded = CorpusIndex::load(&path).map_err(|e| e.to_string())?;
    ensure!(loaded == reference, "round trip changed the index");
    let lookups: BTreeMap<&str, _> = reference.iter().map(|(k, e)| (k, loaded.lookup_key(k) == Some(e))).collect();
    ensure!(lookups.values().all(|&same| same), "lookup differs after round trip");
    Ok(format!("{} patterns, identical for 1/2/4/8 workers, save/load exact", reference.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("worked-example exactness", worked_examples),
        ("pattern-space fidelity", pattern_space),
        ("planted-pattern recovery", recovery),
        ("oracle equivalence", oracle_equivalence),
        ("tolerant solver", tolerance),
        ("statistical tests", statistical_tests),
        ("benchmark harness", benchmark),
        ("performance", performance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let tag = if outcome.is_ok() { "PASS" } else { "FAIL" };
        let detail = outcome.as_ref().unwrap_or_else(|e| e);
        println!("[{tag}] {}. {name}: {detail} ({:.1?})", i + 1, start.elapsed());
        failed += usize::from(outcome.is_err());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
