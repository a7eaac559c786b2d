//! `colpat`: index a corpus of columns, suggest validation patterns, check
//! new snapshots for drift and run benchmarks.
//!
//! Exit codes: 0 success or no drift, 1 I/O failure, 2 bad input or config,
//! 3 no feasible pattern, 4 drift detected. Records go to stdout, diagnostics
//! to stderr.

mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use colpat::bench::{
    evaluate, make_benchmark, read_labels, recovery_simulation, run_planted, DictionaryLearner, FmdvLearner,
    PlantedConfig, RecoveryConfig,
};
use colpat::drift::{self, DriftError};
use colpat::index::{
    build_index, read_columns, read_corpus, BuildError, BuildOptions, Column, CorpusError, CorpusIndex,
    IndexFormatError, FORMAT_VERSION,
};
use colpat::pattern::Hierarchy;
use colpat::rule::ValidationRule;
use colpat::solver::{solve_fmdv, solve_fmdv_h, SolveError};
use serde::Serialize;

use config::{Config, ConfigFlags};

const EXIT_IO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NO_RULE: u8 = 3;
const EXIT_DRIFT: u8 = 4;

#[derive(Parser)]
#[command(name = "colpat", version, about = "Infer and check validation patterns for string columns")]
struct Cli {
    #[command(flatten)]
    flags: ConfigFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a corpus directory and write the pattern index
    Index { corpus_dir: PathBuf, index_out: PathBuf },
    /// Suggest a validation rule for each column in a file
    Suggest { column_file: PathBuf, index_file: PathBuf },
    /// Check a column snapshot against a stored rule
    Validate { rule_file: PathBuf, column_file: PathBuf },
    /// Measure precision and recall on a benchmark
    Bench(BenchArgs),
    /// Print index statistics
    Inspect { index_file: PathBuf },
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Directory of benchmark columns
    dir: Option<PathBuf>,
    /// Prebuilt index (default: index the benchmark directory itself)
    #[arg(long)]
    index: Option<PathBuf>,
    /// Run a generated experiment instead of a directory benchmark
    #[arg(long, value_enum, conflicts_with = "dir")]
    synthetic: Option<Synthetic>,
    /// Corpus columns (per domain) for generated experiments
    #[arg(long)]
    n: Option<usize>,
    /// Trials for the recovery experiment
    #[arg(long)]
    trials: Option<usize>,
    /// Also report a baseline learner
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    /// Tab-separated `column_id<TAB>label` file; same-label columns do not count toward recall
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Learn drift-tested rules that tolerate non-conforming values
    #[arg(long)]
    tolerant: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Synthetic {
    /// Recovery of a planted pattern from a generated corpus
    Recovery,
    /// Fifty mutually disjoint planted domains
    Planted,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    Dictionary,
}

/// A failed run: exit code plus message.
struct Failure(u8, String);

impl Failure {
    fn io(msg: impl std::fmt::Display) -> Self {
        Failure(EXIT_IO, msg.to_string())
    }

    fn input(msg: impl std::fmt::Display) -> Self {
        Failure(EXIT_INPUT, msg.to_string())
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => Failure::io(e),
            CorpusError::Csv { .. } => Failure::input(e),
        }
    }
}

impl From<IndexFormatError> for Failure {
    fn from(e: IndexFormatError) -> Self {
        match e {
            IndexFormatError::Io(_) => Failure::io(e),
            _ => Failure::input(e),
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Corpus(e) => e.into(),
            BuildError::Pool(_) => Failure::io(e),
            BuildError::EmptyCorpus | BuildError::InvalidOptions(_) => Failure::input(e),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::HierarchyMismatch => Failure::input(
                "the index was built with a different generalization hierarchy; \
                 rebuild it or pass the matching --hierarchy",
            ),
            e => Failure::input(e),
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("record serializes"));
}

fn file_id(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn load_index(path: &Path, hierarchy: &Hierarchy) -> Result<CorpusIndex, Failure> {
    let index = CorpusIndex::load(path).map_err(|e| match e {
        IndexFormatError::Io(e) => Failure::io(format!("reading {}: {e}", path.display())),
        e => Failure::input(format!("{}: {e}", path.display())),
    })?;
    if index.params.fingerprint != hierarchy.fingerprint() {
        return Err(SolveError::HierarchyMismatch.into());
    }
    Ok(index)
}

fn cmd_index(corpus_dir: &Path, index_out: &Path, config: &Config) -> Result<u8, Failure> {
    let hierarchy = config.load_hierarchy().map_err(Failure::input)?;
    let start = Instant::now();
    let opts = BuildOptions { scan: config.scan(), workers: config.workers };
    let (index, stats) = build_index(corpus_dir, &hierarchy, &opts)?;
    index.save(index_out).map_err(|e| Failure::io(format!("writing {}: {e}", index_out.display())))?;
    eprintln!(
        "indexed {} columns ({} usable, {} unreadable files skipped), {} patterns in {:.2?}",
        stats.columns,
        stats.usable_columns,
        stats.unreadable_files,
        index.len(),
        start.elapsed()
    );
    Ok(0)
}

#[derive(Serialize)]
struct NoRule<'a> {
    column: &'a str,
    status: &'static str,
}

fn cmd_suggest(column_file: &Path, index_file: &Path, config: &Config) -> Result<u8, Failure> {
    let hierarchy = config.load_hierarchy().map_err(Failure::input)?;
    let index = load_index(index_file, &hierarchy)?;
    let columns = read_columns(column_file, &file_id(column_file))?;
    let params = config.solver();
    let mut code = 0;
    for col in &columns {
        let suggestion = if params.theta > 0.0 {
            solve_fmdv_h(&col.values, &index, &hierarchy, &params)
        } else {
            solve_fmdv(&col.values, &index, &hierarchy, &params)
        }
        .map_err(|e| match e {
            SolveError::EmptyColumn => Failure::input(format!("column {} has no values", col.id)),
            e => e.into(),
        })?;
        match suggestion {
            Some(s) => {
                if s.truncated {
                    log::warn!("{}: candidate patterns were cut short by the enumeration cap", col.id);
                }
                let rule = ValidationRule::from_suggestion(
                    col.id.clone(),
                    &s,
                    &params,
                    index.params.tau,
                    &hierarchy,
                    config.alpha,
                    config.test,
                );
                println!("{}", rule.to_json());
            }
            None => {
                print_json(&NoRule { column: &col.id, status: "no-feasible-pattern" });
                code = EXIT_NO_RULE;
            }
        }
    }
    Ok(code)
}

fn single_column(path: &Path) -> Result<Column, Failure> {
    let mut columns = read_columns(path, &file_id(path))?;
    if columns.len() != 1 {
        return Err(Failure::input(format!("{} holds {} columns, expected one", path.display(), columns.len())));
    }
    Ok(columns.remove(0))
}

fn cmd_validate(rule_file: &Path, column_file: &Path, flags: &ConfigFlags) -> Result<u8, Failure> {
    let text =
        std::fs::read_to_string(rule_file).map_err(|e| Failure::io(format!("reading {}: {e}", rule_file.display())))?;
    let mut rule =
        ValidationRule::from_json(text.trim()).map_err(|e| Failure::input(format!("{}: {e}", rule_file.display())))?;
    // explicit flags replace the stored test settings
    if let Some(alpha) = flags.alpha {
        rule.alpha = alpha;
    }
    if let Some(test) = flags.test {
        rule.test = test;
    }
    rule.validate().map_err(Failure::input)?;
    let column = single_column(column_file)?;
    let verdict = drift::validate(&rule, &column.values).map_err(|e| match e {
        DriftError::EmptyColumn => Failure::input(format!("{}: {e}", column_file.display())),
    })?;
    print_json(&verdict);
    Ok(if verdict.drift_detected { EXIT_DRIFT } else { 0 })
}

#[derive(Serialize)]
struct RecoveryLine {
    #[serde(flatten)]
    report: colpat::bench::RecoveryReport,
    rate: f64,
}

fn cmd_bench(args: &BenchArgs, config: &Config, flags: &ConfigFlags) -> Result<u8, Failure> {
    let hierarchy = config.load_hierarchy().map_err(Failure::input)?;
    match (args.synthetic, &args.dir) {
        (Some(Synthetic::Recovery), _) => {
            let mut rc = RecoveryConfig { seed: config.seed, scan: config.scan(), ..RecoveryConfig::default() };
            rc.corpus_columns = args.n.unwrap_or(rc.corpus_columns);
            rc.trials = args.trials.unwrap_or(rc.trials);
            let report = recovery_simulation(&rc, &hierarchy).map_err(Failure::input)?;
            let rate = report.rate();
            print_json(&RecoveryLine { report, rate });
            Ok(0)
        }
        (Some(Synthetic::Planted), _) => {
            let mut pc = PlantedConfig { seed: config.seed, scan: config.scan(), workers: config.workers, ..PlantedConfig::default() };
            pc.corpus_columns_per_domain = args.n.unwrap_or(pc.corpus_columns_per_domain);
            // the planted corpus is small, so only explicit flags change its solver settings
            pc.params.r = flags.r.unwrap_or(pc.params.r);
            pc.params.m = flags.m.unwrap_or(pc.params.m);
            pc.params.objective = config.objective;
            pc.params.validate().map_err(Failure::input)?;
            let reports = run_planted(&pc, &hierarchy).map_err(Failure::input)?;
            print_json(&reports.fmdv);
            if args.baseline.is_some() {
                print_json(&reports.dictionary);
            }
            print_json(&reports.oracle);
            Ok(0)
        }
        (None, Some(dir)) => {
            let columns = read_corpus(dir)?;
            let (cases, excluded) = make_benchmark(&columns, config.value_cap);
            if !excluded.is_empty() {
                eprintln!("excluded {} columns with fewer than 10 values", excluded.len());
            }
            if cases.is_empty() {
                return Err(Failure::input(format!("{} has no usable benchmark columns", dir.display())));
            }
            let index = match &args.index {
                Some(path) => load_index(path, &hierarchy)?,
                None => {
                    log::warn!("no --index given; indexing the benchmark directory itself");
                    let opts = BuildOptions { scan: config.scan(), workers: config.workers };
                    build_index(dir, &hierarchy, &opts)?.0
                }
            };
            let labels = match &args.labels {
                Some(path) => Some(read_labels(path).map_err(|e| match e.kind() {
                    std::io::ErrorKind::InvalidData => Failure::input(format!("{}: {e}", path.display())),
                    _ => Failure::io(format!("reading {}: {e}", path.display())),
                })?),
                None => None,
            };
            let learner = FmdvLearner { index: &index, hierarchy: &hierarchy, params: config.solver(), tolerant: args.tolerant };
            print_json(&evaluate(&learner, &cases, labels.as_ref()));
            if args.baseline.is_some() {
                print_json(&evaluate(&DictionaryLearner, &cases, labels.as_ref()));
            }
            Ok(0)
        }
        (None, None) => Err(Failure::input("bench needs a benchmark directory or --synthetic")),
    }
}

#[derive(Serialize)]
struct IndexSummary {
    format_version: u16,
    tau: u32,
    cap: u64,
    hierarchy_fingerprint: String,
    patterns: usize,
    zero_fpr_patterns: usize,
    /// Pattern counts by coverage bucket `[lo, hi]`, powers of two.
    coverage_histogram: Vec<(u64, u64, usize)>,
}

fn cmd_inspect(index_file: &Path) -> Result<u8, Failure> {
    let index = CorpusIndex::load(index_file)?;
    let mut buckets: BTreeMap<u32, usize> = BTreeMap::new();
    for (_, e) in index.iter() {
        *buckets.entry(e.cov.ilog2()).or_default() += 1;
    }
    let summary = IndexSummary {
        format_version: FORMAT_VERSION,
        tau: index.params.tau,
        cap: index.params.cap,
        hierarchy_fingerprint: index.params.fingerprint.iter().map(|b| format!("{b:02x}")).collect(),
        patterns: index.len(),
        zero_fpr_patterns: index.iter().filter(|(_, e)| e.fpr == 0.0).count(),
        coverage_histogram: buckets
            .into_iter()
            .map(|(k, n)| (1u64 << k, (1u64 << k).saturating_mul(2) - 1, n))
            .collect(),
    };
    print_json(&summary);
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let config = Config::resolve(&cli.flags).map_err(Failure::input)?;
    match &cli.command {
        Command::Index { corpus_dir, index_out } => cmd_index(corpus_dir, index_out, &config),
        Command::Suggest { column_file, index_file } => cmd_suggest(column_file, index_file, &config),
        Command::Validate { rule_file, column_file } => cmd_validate(rule_file, column_file, &cli.flags),
        Command::Bench(args) => cmd_bench(args, &config, &cli.flags),
        Command::Inspect { index_file } => cmd_inspect(index_file),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("colpat: {msg}");
            ExitCode::from(code)
        }
    }
}
