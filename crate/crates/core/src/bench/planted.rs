//! Self-contained experiments on generated data: recovery of a planted
//! ground-truth pattern from a corpus, and a benchmark of mutually
//! non-matching planted domains.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::{evaluate, make_benchmark, BenchmarkCase, DictionaryLearner, EvalReport, FmdvLearner, OracleLearner};
use super::synth::{generate_synthetic_corpus, sample_column, SynthError};
use crate::index::{build_index_from_columns, BuildError, BuildOptions, Column, CorpusIndex, ScanOptions};
use crate::pattern::{Hierarchy, Pattern};
use crate::solver::{solve_cmdv, solve_fmdv, SolverParams};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Debug, Clone)]
pub struct RecoveryConfig {
    pub ground_truth: Pattern,
    /// Other domains mixed into the corpus.
    pub distractors: Vec<Pattern>,
    /// Corpus columns drawn from the ground truth (and from each distractor).
    pub corpus_columns: usize,
    pub values_per_column: usize,
    pub query_values: usize,
    pub trials: usize,
    pub seed: u64,
    pub scan: ScanOptions,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            ground_truth: "<digit>+:<digit>{2}".parse().expect("valid pattern"),
            distractors: vec!["<letter>+-<digit>{3}".parse().expect("valid pattern")],
            corpus_columns: 20,
            values_per_column: 10,
            query_values: 10,
            trials: 200,
            seed: 0,
            scan: ScanOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub ground_truth: String,
    pub corpus_columns: usize,
    pub trials: usize,
    /// Trials where FMDV returned exactly the ground truth.
    pub recovered: usize,
    /// Trials where CMDV returned the same pattern as FMDV.
    pub cmdv_agreed: usize,
    /// The `1 - (1/2)^n` lower bound on the recovery rate.
    pub bound: f64,
}

impl RecoveryReport {
    pub fn rate(&self) -> f64 {
        self.recovered as f64 / self.trials.max(1) as f64
    }
}

/// Repeatedly plants the ground truth in a fresh corpus and asks FMDV (with
/// `r = 0`, `m = 1`) to recover it from a fresh query column.
pub fn recovery_simulation(config: &RecoveryConfig, hierarchy: &Hierarchy) -> Result<RecoveryReport, ExperimentError> {
    let mut domains = vec![config.ground_truth.clone()];
    domains.extend(config.distractors.iter().cloned());
    let params = SolverParams { r: 0.0, m: 1, ..SolverParams::default() };
    let build = BuildOptions { scan: config.scan, workers: 1 };
    let mut recovered = 0;
    let mut cmdv_agreed = 0;
    for trial in 0..config.trials {
        let seed = config.seed.wrapping_add(trial as u64);
        let corpus = generate_synthetic_corpus(&domains, config.corpus_columns, config.values_per_column, seed)?;
        let (index, _) = build_index_from_columns(&corpus, hierarchy, &build)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let query = sample_column(&config.ground_truth, config.query_values, &mut rng);
        let fmdv = solve_fmdv(&query, &index, hierarchy, &params).expect("valid parameters");
        let cmdv = solve_cmdv(&query, &index, hierarchy, &params).expect("valid parameters");
        let found = fmdv.as_ref().map(|s| &s.pattern);
        if found == Some(&config.ground_truth) {
            recovered += 1;
        }
        if found == cmdv.as_ref().map(|s| &s.pattern) {
            cmdv_agreed += 1;
        }
    }
    Ok(RecoveryReport {
        ground_truth: config.ground_truth.key(),
        corpus_columns: config.corpus_columns,
        trials: config.trials,
        recovered,
        cmdv_agreed,
        bound: 1.0 - 0.5f64.powi(config.corpus_columns as i32),
    })
}

/// Separators used by the planted domains.
pub const PLANTED_SEPARATORS: [&str; 5] = ["-", ":", "/", "_", "."];

/// Fifty domains, pairwise disjoint: `<letter>{a}S<digit>{6-a}` and
/// `<digit>{6-a}S<letter>{a}` for `a` in 1..=5 and each separator `S`.
pub fn planted_domains() -> Vec<Pattern> {
    let mut out = Vec::new();
    for letters_first in [true, false] {
        for sep in PLANTED_SEPARATORS {
            for a in 1..=5 {
                let (l, d) = (format!("<letter>{{{a}}}"), format!("<digit>{{{}}}", 6 - a));
                let text = if letters_first { format!("{l}{sep}{d}") } else { format!("{d}{sep}{l}") };
                out.push(text.parse().expect("valid pattern"));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct PlantedConfig {
    pub corpus_columns_per_domain: usize,
    pub corpus_values: usize,
    pub case_values: usize,
    pub seed: u64,
    pub params: SolverParams,
    pub scan: ScanOptions,
    pub workers: usize,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            corpus_columns_per_domain: 20,
            corpus_values: 50,
            case_values: 100,
            seed: 0,
            params: SolverParams { m: 10, ..SolverParams::default() },
            scan: ScanOptions::default(),
            workers: 0,
        }
    }
}

pub struct PlantedBenchmark {
    pub domains: Vec<Pattern>,
    pub index: CorpusIndex,
    pub cases: Vec<BenchmarkCase>,
    /// Ground-truth domain of each case.
    pub truth: HashMap<String, Pattern>,
}

/// One benchmark case per planted domain, plus an index over a separate
/// corpus drawn from the same domains.
pub fn planted_benchmark(config: &PlantedConfig, hierarchy: &Hierarchy) -> Result<PlantedBenchmark, ExperimentError> {
    let domains = planted_domains();
    let corpus = generate_synthetic_corpus(&domains, config.corpus_columns_per_domain, config.corpus_values, config.seed)?;
    let build = BuildOptions { scan: config.scan, workers: config.workers };
    let (index, _) = build_index_from_columns(&corpus, hierarchy, &build)?;
    let case_columns: Vec<Column> = generate_synthetic_corpus(&domains, 1, config.case_values, config.seed.wrapping_add(1))?;
    let truth = case_columns.iter().zip(&domains).map(|(c, d)| (c.id.clone(), d.clone())).collect();
    let (cases, _) = make_benchmark(&case_columns, None);
    Ok(PlantedBenchmark { domains, index, cases, truth })
}

pub struct PlantedReports {
    pub fmdv: EvalReport,
    pub dictionary: EvalReport,
    pub oracle: EvalReport,
}

pub fn run_planted(config: &PlantedConfig, hierarchy: &Hierarchy) -> Result<PlantedReports, ExperimentError> {
    let bench = planted_benchmark(config, hierarchy)?;
    let fmdv = FmdvLearner { index: &bench.index, hierarchy, params: config.params, tolerant: false };
    Ok(PlantedReports {
        fmdv: evaluate(&fmdv, &bench.cases, None),
        dictionary: evaluate(&DictionaryLearner, &bench.cases, None),
        oracle: evaluate(&OracleLearner { patterns: bench.truth }, &bench.cases, None),
    })
}
