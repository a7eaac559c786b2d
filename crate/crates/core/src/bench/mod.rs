//! Evaluation harness: synthetic data, benchmark splits, learners and
//! precision/recall reports.

mod eval;
mod planted;
mod synth;

pub use eval::{
    dictionary_baseline, evaluate, make_benchmark, read_labels, AcceptAllLearner, BenchmarkCase, CaseResult,
    DictionaryLearner, DriftRule, EvalReport, FmdvLearner, Labels, Learner, OracleLearner, PatternRule, Rule,
    MIN_CASE_VALUES,
};
pub use planted::{
    planted_benchmark, planted_domains, recovery_simulation, run_planted, ExperimentError, PlantedBenchmark,
    PlantedConfig, PlantedReports, RecoveryConfig, RecoveryReport, PLANTED_SEPARATORS,
};
pub use synth::{check_samplable, generate_synthetic_corpus, sample_column, sample_value, SynthError, MAX_RUN};
